//! JSON class descriptions and their expansion into core representations.

use std::path::Path;

use nalgebra::DMatrix;
use serde::Deserialize;

use crate::classes::{lp_ball, random_vpolytope, sobolev_ball, SobolevNorm, SobolevSpec};
use crate::error::{Error, Result};
use crate::geometry::FunctionClass;

/// Norm index written as a number or as `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Exponent {
    Num(f64),
    Name(NamedExponent),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedExponent {
    Inf,
}

impl Exponent {
    pub fn value(self) -> f64 {
        match self {
            Exponent::Num(p) => p,
            Exponent::Name(NamedExponent::Inf) => f64::INFINITY,
        }
    }
}

fn default_radius() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ClassKind {
    Vpolytope {
        vertices: Vec<Vec<f64>>,
    },
    Hpolytope {
        m: usize,
        rows: Vec<Vec<f64>>,
        bounds: Vec<f64>,
        #[serde(default)]
        aux: usize,
    },
    Ellipsoid {
        center: Option<Vec<f64>>,
        map: Vec<Vec<f64>>,
    },
    Pball {
        map: Option<Vec<Vec<f64>>>,
        m: Option<usize>,
        p: f64,
    },
    Sobolev {
        m: usize,
        s: usize,
        p: Exponent,
    },
    Lpball {
        m: usize,
        p: Exponent,
    },
    Random {
        m: usize,
        k: usize,
        #[serde(default = "default_radius")]
        radius: f64,
        #[serde(default)]
        seed: u64,
        #[serde(default = "yes")]
        symmetrize: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ClassConfig {
    #[serde(default)]
    pub id: Option<String>,
    /// overrides the flag a generator would set
    #[serde(default)]
    pub symmetric: Option<bool>,
    #[serde(flatten)]
    pub kind: ClassKind,
}

fn matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || rows.iter().any(|row| row.len() != c) {
        return Err(Error::Dimension("map must be a nonempty rectangular list of rows".into()));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

impl ClassConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parameter(format!("malformed class description: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parameter(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The class id (explicit, or the generated label) and the class.
    pub fn build(&self) -> Result<(String, FunctionClass)> {
        let class = match &self.kind {
            ClassKind::Vpolytope { vertices } => FunctionClass::vpolytope(vertices.clone(), false)?,
            ClassKind::Hpolytope { m, rows, bounds, aux } => FunctionClass::hpolytope(*m, *aux, rows.clone(), bounds.clone(), false)?,
            ClassKind::Ellipsoid { center, map } => {
                let map = matrix(map)?;
                let center = center.clone().unwrap_or_else(|| vec![0.0; map.nrows()]);
                FunctionClass::ellipsoid(center, map)?
            }
            ClassKind::Pball { map, m, p } => {
                let map = match (map, m) {
                    (Some(rows), _) => matrix(rows)?,
                    (None, Some(m)) => DMatrix::identity(*m, *m),
                    (None, None) => return Err(Error::Parameter("pball needs a map or m".into())),
                };
                FunctionClass::pball(map, *p)?
            }
            ClassKind::Sobolev { m, s, p } => sobolev_ball(SobolevSpec::new(*m, *s, SobolevNorm::from_f64(p.value())?)?)?,
            ClassKind::Lpball { m, p } => lp_ball(*m, p.value())?,
            ClassKind::Random { m, k, radius, seed, symmetrize } => random_vpolytope(*m, *k, *radius, *seed, *symmetrize)?,
        };
        let mut class = class;
        if let Some(s) = self.symmetric {
            class.symmetric = s;
        }
        let id = self.id.clone().unwrap_or_else(|| class.label.clone());
        Ok((id, class))
    }
}
