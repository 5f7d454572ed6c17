use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid labels of the discretized domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    points: Vec<f64>,
}

impl Domain {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Dimension("domain needs at least one point".into()));
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Parameter("domain labels must be strictly increasing".into()));
        }
        Ok(Self { points })
    }

    /// `m` equispaced labels on [0, 1] (a single point sits at 0).
    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Dimension("domain needs at least one point".into()));
        }
        if m == 1 {
            return Self::new(vec![0.0]);
        }
        Self::new((0..m).map(|i| i as f64 / (m - 1) as f64).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn spacing(&self) -> Option<f64> {
        (self.points.len() > 1).then(|| self.points[1] - self.points[0])
    }
}

/// Sampling nodes: distinct grid indices, in the order they were chosen.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct SampleDesign {
    indices: Vec<usize>,
}

impl SampleDesign {
    pub fn new(indices: Vec<usize>, m: usize) -> Result<Self> {
        for (pos, &i) in indices.iter().enumerate() {
            if i >= m {
                return Err(Error::Parameter(format!("design index {i} out of range for m = {m}")));
            }
            if indices[..pos].contains(&i) {
                return Err(Error::Parameter(format!("design index {i} repeated")));
            }
        }
        Ok(Self { indices })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.contains(&i)
    }

    /// Appends a node; the caller guarantees it is new and in range.
    pub fn extended(&self, i: usize) -> Self {
        let mut indices = self.indices.clone();
        indices.push(i);
        Self { indices }
    }

    /// Parses the CSV form: indices joined by `;`, empty for n = 0.
    pub fn parse(s: &str, m: usize) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::empty());
        }
        let indices = s
            .split(';')
            .map(|t| t.trim().parse::<usize>().map_err(|e| Error::Parameter(format!("bad design index {t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(indices, m)
    }
}

impl fmt::Display for SampleDesign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join(";"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn design_validation() {
        assert!(SampleDesign::new(vec![0, 2], 3).is_ok());
        assert!(SampleDesign::new(vec![3], 3).is_err());
        assert!(SampleDesign::new(vec![1, 1], 3).is_err());
        assert!(SampleDesign::new(vec![], 1).unwrap().is_empty());
    }

    #[test]
    fn design_text_form() {
        let d = SampleDesign::new(vec![4, 0, 2], 5).unwrap();
        assert_eq!(d.to_string(), "4;0;2");
        assert_eq!(SampleDesign::parse("4;0;2", 5).unwrap(), d);
        assert_eq!(SampleDesign::parse("", 5).unwrap(), SampleDesign::empty());
        assert!(SampleDesign::parse("1;x", 5).is_err());
    }

    #[test]
    fn domain_labels() {
        let d = Domain::uniform(5).unwrap();
        assert_eq!(d.points(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(d.spacing(), Some(0.25));
        assert!(Domain::new(vec![0.0, 0.0]).is_err());
        assert!(Domain::uniform(0).is_err());
    }
}
