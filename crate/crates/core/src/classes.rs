//! Benchmark class generators and log-log rate fitting.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{oracle::p_quasinorm, FunctionClass};

/// Norm index of a discretized Sobolev ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SobolevNorm {
    One,
    Two,
    Inf,
}

impl SobolevNorm {
    pub fn from_f64(p: f64) -> Result<Self> {
        if p == 1.0 {
            Ok(Self::One)
        } else if p == 2.0 {
            Ok(Self::Two)
        } else if p.is_infinite() && p > 0.0 {
            Ok(Self::Inf)
        } else {
            Err(Error::Parameter(format!("Sobolev norm index must be 1, 2 or inf, got {p}")))
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Self::One => "1",
            Self::Two => "2",
            Self::Inf => "inf",
        }
    }
}

/// Unit ball of `‖f‖_p + ‖f^{(s)}‖_p` on an `m`-point uniform grid of [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevSpec {
    pub m: usize,
    pub s: usize,
    pub p: SobolevNorm,
}

impl SobolevSpec {
    pub fn new(m: usize, s: usize, p: SobolevNorm) -> Result<Self> {
        if s == 0 {
            return Err(Error::Parameter("smoothness s must be positive".into()));
        }
        if m <= s {
            return Err(Error::Parameter(format!("grid size m = {m} must exceed smoothness s = {s}")));
        }
        Ok(Self { m, s, p })
    }

    pub fn spacing(&self) -> f64 {
        1.0 / (self.m - 1) as f64
    }

    /// s-fold forward differences scaled by `h^{-s}`, an `(m - s) × m` matrix.
    pub fn difference_matrix(&self) -> DMatrix<f64> {
        let h = self.spacing();
        let mut stencil = vec![1.0f64];
        for _ in 0..self.s {
            let mut next = vec![0.0; stencil.len() + 1];
            for (i, c) in stencil.iter().enumerate() {
                next[i] -= c;
                next[i + 1] += c;
            }
            stencil = next;
        }
        let scale = h.powi(-(self.s as i32));
        let rows = self.m - self.s;
        DMatrix::from_fn(rows, self.m, |r, c| {
            if c >= r && c - r < stencil.len() {
                stencil[c - r] * scale
            } else {
                0.0
            }
        })
    }

    /// Direct evaluation of the discrete norm (the ellipsoid norm for p = 2).
    pub fn norm(&self, f: &[f64]) -> Result<f64> {
        if f.len() != self.m {
            return Err(Error::Dimension(format!("expected {} values, got {}", self.m, f.len())));
        }
        let h = self.spacing();
        let df: Vec<f64> = (self.difference_matrix() * DVector::from_column_slice(f)).iter().copied().collect();
        Ok(match self.p {
            SobolevNorm::Inf => p_quasinorm(f, f64::INFINITY) + p_quasinorm(&df, f64::INFINITY),
            SobolevNorm::One => h * (p_quasinorm(f, 1.0) + p_quasinorm(&df, 1.0)),
            SobolevNorm::Two => (h * (f.iter().map(|x| x * x).sum::<f64>() + df.iter().map(|x| x * x).sum::<f64>()))
                .sqrt(),
        })
    }

    pub fn label(&self) -> String {
        format!("sobolev(m={},s={},p={})", self.m, self.s, self.p.tag())
    }
}

/// Discretized Sobolev ball as a core class representation.
///
/// For p = 2 the class is the ellipsoid of `(‖f‖₂² + ‖f^{(s)}‖₂²)^{1/2}`, which
/// is within a factor √2 of the sum norm.
pub fn sobolev_ball(spec: SobolevSpec) -> Result<FunctionClass> {
    let spec = SobolevSpec::new(spec.m, spec.s, spec.p)?;
    let m = spec.m;
    let h = spec.spacing();
    let d = spec.difference_matrix();
    let r = d.nrows();
    let class = match spec.p {
        SobolevNorm::Inf => {
            // aux t >= |f_i|, u >= |(Df)_j|, t + u <= 1
            let mut rows = Vec::with_capacity(2 * m + 2 * r + 1);
            let mut bounds = Vec::new();
            for i in 0..m {
                for sign in [1.0, -1.0] {
                    let mut row = vec![0.0; m + 2];
                    row[i] = sign;
                    row[m] = -1.0;
                    rows.push(row);
                    bounds.push(0.0);
                }
            }
            for j in 0..r {
                for sign in [1.0, -1.0] {
                    let mut row: Vec<f64> = d.row(j).iter().map(|a| sign * a).collect();
                    row.push(0.0);
                    row.push(-1.0);
                    rows.push(row);
                    bounds.push(0.0);
                }
            }
            let mut last = vec![0.0; m + 2];
            last[m] = 1.0;
            last[m + 1] = 1.0;
            rows.push(last);
            bounds.push(1.0);
            FunctionClass::hpolytope(m, 2, rows, bounds, true)?
        }
        SobolevNorm::One => {
            // aux a_i >= |f_i|, b_j >= |(Df)_j|, h Σa + h Σb <= 1
            let aux = m + r;
            let mut rows = Vec::with_capacity(2 * aux + 1);
            let mut bounds = Vec::new();
            for i in 0..m {
                for sign in [1.0, -1.0] {
                    let mut row = vec![0.0; m + aux];
                    row[i] = sign;
                    row[m + i] = -1.0;
                    rows.push(row);
                    bounds.push(0.0);
                }
            }
            for j in 0..r {
                for sign in [1.0, -1.0] {
                    let mut row: Vec<f64> = d.row(j).iter().map(|a| sign * a).collect();
                    row.extend(std::iter::repeat_n(0.0, aux));
                    row[2 * m + j] = -1.0;
                    rows.push(row);
                    bounds.push(0.0);
                }
            }
            let mut last = vec![0.0; m + aux];
            for a in last.iter_mut().skip(m) {
                *a = h;
            }
            rows.push(last);
            bounds.push(1.0);
            FunctionClass::hpolytope(m, aux, rows, bounds, true)?
        }
        SobolevNorm::Two => {
            let q = (DMatrix::identity(m, m) + d.transpose() * &d) * h;
            let eig = q.symmetric_eigen();
            let inv_sqrt = DVector::from_iterator(m, eig.eigenvalues.iter().map(|l| 1.0 / l.sqrt()));
            let map = &eig.eigenvectors * DMatrix::from_diagonal(&inv_sqrt) * eig.eigenvectors.transpose();
            FunctionClass::ellipsoid(vec![0.0; m], map)?
        }
    };
    Ok(class.with_label(spec.label()))
}

/// Unit ball of ℓ_p on m coordinates: p = 1 and p = ∞ as V-polytopes,
/// `0 < p < 1` as a p-ball.
pub fn lp_ball(m: usize, p: f64) -> Result<FunctionClass> {
    if m == 0 {
        return Err(Error::Dimension("m must be >= 1".into()));
    }
    let label = if p.is_infinite() { format!("lpball(m={m},p=inf)") } else { format!("lpball(m={m},p={p})") };
    let class = if p == 1.0 {
        let mut vertices = Vec::with_capacity(2 * m);
        for i in 0..m {
            for sign in [1.0, -1.0] {
                let mut v = vec![0.0; m];
                v[i] = sign;
                vertices.push(v);
            }
        }
        FunctionClass::vpolytope(vertices, true)?
    } else if p.is_infinite() && p > 0.0 {
        if m > 12 {
            return Err(Error::Budget(format!("2^{m} sign vertices exceed the m <= 12 limit")));
        }
        let vertices = (0..1usize << m)
            .map(|bits| (0..m).map(|i| if bits >> i & 1 == 1 { -1.0 } else { 1.0 }).collect())
            .collect();
        FunctionClass::vpolytope(vertices, true)?
    } else if p > 0.0 && p < 1.0 {
        FunctionClass::pball(DMatrix::identity(m, m), p)?
    } else {
        return Err(Error::Parameter(format!("unsupported ℓ_p exponent {p}; use (0, 1], or inf")));
    };
    Ok(class.with_label(label))
}

/// `k` vertices uniform in the sup-norm ball of `radius`, optionally with
/// their negations appended.
pub fn random_vpolytope(m: usize, k: usize, radius: f64, seed: u64, symmetrize: bool) -> Result<FunctionClass> {
    if k == 0 || m == 0 {
        return Err(Error::Parameter("random polytope needs m >= 1 and k >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vertices: Vec<Vec<f64>> =
        (0..k).map(|_| (0..m).map(|_| rng.random_range(-radius..=radius)).collect()).collect();
    if symmetrize {
        let neg: Vec<Vec<f64>> = vertices.iter().map(|v| v.iter().map(|x| -x).collect()).collect();
        vertices.extend(neg);
    }
    let label = format!("random(m={m},k={k},seed={seed}{})", if symmetrize { ",sym" } else { "" });
    Ok(FunctionClass::vpolytope(vertices, symmetrize)?.with_label(label))
}

/// Least-squares fit of `log value = intercept + exponent · log n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub exponent: f64,
    pub intercept: f64,
    /// root-mean-square residual in log space
    pub residual: f64,
    pub n_used: usize,
}

pub fn fit_rate(ns: &[usize], values: &[f64]) -> Result<RateFit> {
    if ns.len() != values.len() {
        return Err(Error::Dimension("ns and values differ in length".into()));
    }
    if ns.len() < 3 {
        return Err(Error::Parameter("rate fit needs at least 3 points".into()));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::Parameter(format!("rate fit needs positive finite values, got {v}")));
    }
    if ns.contains(&0) {
        return Err(Error::Parameter("rate fit needs n >= 1".into()));
    }
    let xs: Vec<f64> = ns.iter().map(|n| (*n as f64).ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Parameter("rate fit needs at least two distinct n".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let residual = (xs.iter().zip(&ys).map(|(x, y)| (y - intercept - exponent * x).powi(2)).sum::<f64>() / k).sqrt();
    Ok(RateFit { exponent, intercept, residual, n_used: ns.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sobolev_inf_examples() {
        let spec = SobolevSpec::new(3, 1, SobolevNorm::Inf).unwrap();
        let class = sobolev_ball(spec).unwrap();
        assert!(class.member(&[0.5, 0.5, 0.5], 1e-9).unwrap());
        assert_abs_diff_eq!(spec.norm(&[0.0, 1.0, 0.0]).unwrap(), 3.0, epsilon = 1e-12);
        assert!(!class.member(&[0.0, 1.0, 0.0], 1e-9).unwrap());
    }

    #[test]
    fn sobolev_one_two_point_formula() {
        // m = 2, h = 1: member iff h(|a| + |b|) + |b - a| <= 1
        let spec = SobolevSpec::new(2, 1, SobolevNorm::One).unwrap();
        let class = sobolev_ball(spec).unwrap();
        for (a, b) in [(0.2, 0.3), (0.5, -0.2), (0.4, 0.4), (-0.3, 0.45), (0.0, 0.5), (0.3, 0.25)] {
            let direct: f64 = (f64::abs(a) + f64::abs(b)) + f64::abs(b - a);
            assert_eq!(class.member(&[a, b], 1e-9).unwrap(), direct <= 1.0 + 1e-9, "({a}, {b})");
        }
    }

    #[test]
    fn sobolev_rejects_small_grid() {
        assert!(SobolevSpec::new(2, 2, SobolevNorm::Inf).is_err());
        assert!(SobolevSpec::new(3, 0, SobolevNorm::Inf).is_err());
        assert!(SobolevNorm::from_f64(3.0).is_err());
    }

    #[test]
    fn second_differences() {
        let spec = SobolevSpec::new(4, 2, SobolevNorm::Inf).unwrap();
        let d = spec.difference_matrix();
        // h = 1/3, stencil (1, -2, 1) * 9
        assert_eq!(d.nrows(), 2);
        assert_abs_diff_eq!(d[(0, 0)], 9.0, epsilon = 1e-9);
        assert_abs_diff_eq!(d[(0, 1)], -18.0, epsilon = 1e-9);
        assert_abs_diff_eq!(d[(1, 3)], 9.0, epsilon = 1e-9);
    }

    #[test]
    fn sobolev_two_is_ellipsoid_of_quadratic_norm() {
        let spec = SobolevSpec::new(5, 1, SobolevNorm::Two).unwrap();
        let class = sobolev_ball(spec).unwrap();
        let f = [0.1, 0.2, 0.1, -0.1, 0.0];
        let n = spec.norm(&f).unwrap();
        let scaled: Vec<f64> = f.iter().map(|x| x / n).collect();
        assert!(class.member(&scaled, 1e-9).unwrap());
        let out: Vec<f64> = scaled.iter().map(|x| x * 1.01).collect();
        assert!(!class.member(&out, 1e-9).unwrap());
    }

    #[test]
    fn lp_ball_examples() {
        let b1 = lp_ball(2, 1.0).unwrap();
        let crate::geometry::Body::V(v) = &b1.body else { panic!() };
        assert_eq!(v.vertices.len(), 4);
        assert!(v.vertices.contains(&vec![0.0, -1.0]));
        let binf = lp_ball(2, f64::INFINITY).unwrap();
        let crate::geometry::Body::V(v) = &binf.body else { panic!() };
        assert_eq!(v.vertices.len(), 4);
        let bh = lp_ball(2, 0.5).unwrap();
        assert!(bh.member(&[1.0, 0.0], 1e-12).unwrap());
        assert!(!bh.member(&[0.5, 0.5], 1e-9).unwrap());
        assert_abs_diff_eq!(p_quasinorm(&[0.5, 0.5], 0.5), 2.0, epsilon = 1e-12);
        assert!(lp_ball(2, 2.0).is_err());
        assert!(matches!(lp_ball(13, f64::INFINITY), Err(Error::Budget(_))));
    }

    #[test]
    fn random_polytope_is_seeded() {
        let a = random_vpolytope(4, 5, 1.0, 9, true).unwrap();
        let b = random_vpolytope(4, 5, 1.0, 9, true).unwrap();
        assert_eq!(a, b);
        let c = random_vpolytope(4, 5, 1.0, 10, true).unwrap();
        assert_ne!(a, c);
        let single = random_vpolytope(3, 1, 1.0, 1, false).unwrap();
        assert_eq!(single.vertex_list().unwrap().len(), 1);
    }

    #[test]
    fn rate_fit_examples() {
        let ns = [1, 2, 4, 8];
        let f = fit_rate(&ns, &ns.map(|n| 4.0 / n as f64)).unwrap();
        assert_abs_diff_eq!(f.exponent, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.residual, 0.0, epsilon = 1e-12);
        let f = fit_rate(&ns, &ns.map(|n| 0.3 / (n * n) as f64)).unwrap();
        assert_abs_diff_eq!(f.exponent, -2.0, epsilon = 1e-12);
        let f = fit_rate(&ns, &[2.0; 4]).unwrap();
        assert_abs_diff_eq!(f.exponent, 0.0, epsilon = 1e-12);
        assert!(fit_rate(&[1, 2], &[1.0, 1.0]).is_err());
        assert!(fit_rate(&[1, 2, 3], &[1.0, 0.0, 1.0]).is_err());
    }
}
