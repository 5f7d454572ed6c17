//! Finite-dimensional function classes: a function on an `m`-point grid is a
//! vector in ℝ^m, and a class is a compact body in that space.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Largest condition number accepted for ellipsoid and p-ball maps.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct VPolytope {
    pub vertices: Vec<Vec<f64>>,
}

/// `{ f : ∃ aux, rows · [f; aux] <= bounds }`.
#[derive(Debug, Clone, PartialEq)]
pub struct HPolytope {
    pub m: usize,
    pub aux: usize,
    pub rows: Vec<Vec<f64>>,
    pub bounds: Vec<f64>,
}

/// `{ center + map·u : ‖u‖₂ <= 1 }`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    pub center: DVector<f64>,
    pub map: DMatrix<f64>,
    inverse: DMatrix<f64>,
}

/// `{ map·u : ‖u‖_p <= 1 }` with the p-quasinorm, `0 < p <= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PBallImage {
    pub map: DMatrix<f64>,
    pub p: f64,
    inverse: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    V(VPolytope),
    H(HPolytope),
    Ellipsoid(Ellipsoid),
    PBall(PBallImage),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionClass {
    pub body: Body,
    /// `F = -F`
    pub symmetric: bool,
    pub label: String,
}

fn check_finite(values: impl IntoIterator<Item = f64>, what: &str) -> Result<()> {
    if values.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{what} contains non-finite entries")))
    }
}

/// Inverse of a square map, rejecting singular or badly conditioned input.
fn checked_inverse(map: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !map.is_square() || map.nrows() == 0 {
        return Err(Error::Dimension(format!("map must be square and nonempty, got {}x{}", map.nrows(), map.ncols())));
    }
    check_finite(map.iter().copied(), "map")?;
    let sv = map.clone().singular_values();
    let smax = sv.max();
    let smin = sv.min();
    if smin <= 0.0 || smax / smin > MAX_CONDITION {
        return Err(Error::Conditioning(format!("condition number {:.3e} exceeds {MAX_CONDITION:e}", smax / smin)));
    }
    map.clone()
        .try_inverse()
        .ok_or_else(|| Error::Conditioning("map is singular".into()))
}

impl Ellipsoid {
    pub fn new(center: DVector<f64>, map: DMatrix<f64>) -> Result<Self> {
        if center.len() != map.nrows() {
            return Err(Error::Dimension(format!("center has length {}, map has {} rows", center.len(), map.nrows())));
        }
        check_finite(center.iter().copied(), "center")?;
        let inverse = checked_inverse(&map)?;
        Ok(Self { center, map, inverse })
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }
}

impl PBallImage {
    pub fn new(map: DMatrix<f64>, p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Parameter(format!("p-ball exponent must lie in (0, 1], got {p}")));
        }
        let inverse = checked_inverse(&map)?;
        Ok(Self { map, p, inverse })
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    /// Convex hull `conv{±map·e_i}`; it equals the body when `p = 1` and
    /// contains it otherwise.
    pub fn hull(&self) -> VPolytope {
        let m = self.map.nrows();
        let mut vertices = Vec::with_capacity(2 * m);
        for i in 0..m {
            let col: Vec<f64> = self.map.column(i).iter().copied().collect();
            vertices.push(col.clone());
            vertices.push(col.iter().map(|v| -v).collect());
        }
        VPolytope { vertices }
    }
}

impl FunctionClass {
    pub fn vpolytope(vertices: Vec<Vec<f64>>, symmetric: bool) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(Error::Parameter("V-polytope needs at least one vertex".into()));
        };
        let m = first.len();
        if m == 0 {
            return Err(Error::Dimension("vertices must have length m >= 1".into()));
        }
        if vertices.iter().any(|v| v.len() != m) {
            return Err(Error::Dimension("vertices have inconsistent lengths".into()));
        }
        check_finite(vertices.iter().flatten().copied(), "vertices")?;
        Ok(Self { body: Body::V(VPolytope { vertices }), symmetric, label: "vpolytope".into() })
    }

    pub fn hpolytope(m: usize, aux: usize, rows: Vec<Vec<f64>>, bounds: Vec<f64>, symmetric: bool) -> Result<Self> {
        if m == 0 {
            return Err(Error::Dimension("m must be >= 1".into()));
        }
        if rows.len() != bounds.len() {
            return Err(Error::Dimension(format!("{} rows but {} bounds", rows.len(), bounds.len())));
        }
        if rows.iter().any(|r| r.len() != m + aux) {
            return Err(Error::Dimension(format!("every row must have m + aux = {} entries", m + aux)));
        }
        check_finite(rows.iter().flatten().copied(), "rows")?;
        check_finite(bounds.iter().copied(), "bounds")?;
        Ok(Self { body: Body::H(HPolytope { m, aux, rows, bounds }), symmetric, label: "hpolytope".into() })
    }

    pub fn ellipsoid(center: Vec<f64>, map: DMatrix<f64>) -> Result<Self> {
        let symmetric = center.iter().all(|c| *c == 0.0);
        let e = Ellipsoid::new(DVector::from_vec(center), map)?;
        Ok(Self { body: Body::Ellipsoid(e), symmetric, label: "ellipsoid".into() })
    }

    pub fn pball(map: DMatrix<f64>, p: f64) -> Result<Self> {
        Ok(Self { body: Body::PBall(PBallImage::new(map, p)?), symmetric: true, label: "pball".into() })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Grid size `m`.
    pub fn dim(&self) -> usize {
        match &self.body {
            Body::V(v) => v.vertices[0].len(),
            Body::H(h) => h.m,
            Body::Ellipsoid(e) => e.center.len(),
            Body::PBall(p) => p.map.nrows(),
        }
    }

    /// False only for p-balls with `p < 1`.
    pub fn is_convex(&self) -> bool {
        !matches!(&self.body, Body::PBall(p) if p.p < 1.0)
    }

    /// Exponent of the quasi-triangle inequality (1 for convex classes).
    pub fn exponent(&self) -> f64 {
        match &self.body {
            Body::PBall(p) => p.p,
            _ => 1.0,
        }
    }

    pub fn check_point(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::Dimension(format!("expected a vector of length {}, got {}", self.dim(), v.len())));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed_input() {
        assert!(matches!(FunctionClass::vpolytope(vec![], false), Err(Error::Parameter(_))));
        assert!(matches!(
            FunctionClass::vpolytope(vec![vec![1.0], vec![1.0, 2.0]], false),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            FunctionClass::vpolytope(vec![vec![f64::NAN]], false),
            Err(Error::Parameter(_))
        ));
        let singular = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(FunctionClass::pball(singular.clone(), 0.5), Err(Error::Conditioning(_))));
        assert!(matches!(FunctionClass::ellipsoid(vec![0.0, 0.0], singular), Err(Error::Conditioning(_))));
        assert!(matches!(FunctionClass::pball(DMatrix::identity(2, 2), 1.5), Err(Error::Parameter(_))));
    }

    #[test]
    fn pball_hull_has_signed_columns() {
        let p = PBallImage::new(DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 1.0, 1.0]), 0.5).unwrap();
        let hull = p.hull();
        assert_eq!(hull.vertices, vec![vec![2.0, 1.0], vec![-2.0, -1.0], vec![0.0, 1.0], vec![-0.0, -1.0]]);
    }

    #[test]
    fn convexity_flag_follows_exponent() {
        let id = DMatrix::identity(3, 3);
        assert!(!FunctionClass::pball(id.clone(), 0.5).unwrap().is_convex());
        assert!(FunctionClass::pball(id, 1.0).unwrap().is_convex());
    }
}
