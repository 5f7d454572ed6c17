//! Seeded point samplers over each class representation, mixing boundary and
//! interior points.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::class::{Body, FunctionClass, HPolytope};
use crate::error::{Error, Result};
use crate::lp::{LinExpr, LpBuilder, LpOptions, LpStatus, Relation, VarKind};

/// Probability of emitting a boundary point instead of an interior one.
const BOUNDARY_SHARE: f64 = 0.3;

pub struct ClassSampler<'a> {
    class: &'a FunctionClass,
    walk: Option<HitAndRun<'a>>,
}

impl<'a> ClassSampler<'a> {
    pub fn new(class: &'a FunctionClass) -> Result<Self> {
        let walk = match &class.body {
            Body::H(h) => Some(HitAndRun::new(h)?),
            _ => None,
        };
        Ok(Self { class, walk })
    }

    pub fn sample<R: Rng>(&mut self, rng: &mut R) -> Vec<f64> {
        match &self.class.body {
            Body::V(v) => mixture(&v.vertices, rng),
            Body::H(_) => self.walk.as_mut().expect("walk for H-polytope").next(rng),
            Body::Ellipsoid(e) => {
                let m = e.center.len();
                let u = ball_point(m, 2.0, rng);
                let f = &e.center + &e.map * DVector::from_vec(u);
                f.iter().copied().collect()
            }
            Body::PBall(p) => {
                let m = p.map.nrows();
                let u = ball_point(m, p.p, rng);
                let f = &p.map * DVector::from_vec(u);
                f.iter().copied().collect()
            }
        }
    }
}

/// Random convex combination of vertices: either a vertex, a point on an edge,
/// or a flat Dirichlet mixture.
fn mixture<R: Rng>(vertices: &[Vec<f64>], rng: &mut R) -> Vec<f64> {
    let k = vertices.len();
    let m = vertices[0].len();
    let roll: f64 = rng.random();
    let weights: Vec<(usize, f64)> = if k == 1 || roll < 0.15 {
        vec![(rng.random_range(0..k), 1.0)]
    } else if roll < 0.15 + BOUNDARY_SHARE {
        let a = rng.random_range(0..k);
        let b = rng.random_range(0..k);
        let t: f64 = rng.random();
        vec![(a, t), (b, 1.0 - t)]
    } else {
        let raw: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().enumerate().map(|(i, w)| (i, w / total)).collect()
    };
    let mut out = vec![0.0; m];
    for (i, w) in weights {
        for (o, v) in out.iter_mut().zip(&vertices[i]) {
            *o += w * v;
        }
    }
    out
}

/// Point in the unit ball of the `p`-(quasi)norm; radius 1 with probability
/// `BOUNDARY_SHARE`, otherwise a uniform-ish radius.
fn ball_point<R: Rng>(m: usize, p: f64, rng: &mut R) -> Vec<f64> {
    let g: Vec<f64> = (0..m).map(|_| StandardNormal.sample(rng)).collect();
    // signed powers spread mass toward the axes for small p
    let shaped: Vec<f64> = g.iter().map(|x: &f64| x.signum() * x.abs().powf(2.0 / p.max(1e-3))).collect();
    let norm = super::oracle::p_quasinorm(&shaped, p);
    if norm == 0.0 {
        return vec![0.0; m];
    }
    let r: f64 = if rng.random::<f64>() < BOUNDARY_SHARE {
        1.0
    } else {
        rng.random::<f64>().powf(1.0 / m as f64)
    };
    shaped.iter().map(|x| x / norm * r).collect()
}

/// Hit-and-run walk in the lifted space `(f, aux)` of an H-polytope.
struct HitAndRun<'a> {
    poly: &'a HPolytope,
    state: Vec<f64>,
}

impl<'a> HitAndRun<'a> {
    fn new(poly: &'a HPolytope) -> Result<Self> {
        // Chebyshev-style interior point: maximize the uniform row margin
        let dim = poly.m + poly.aux;
        let mut lp = LpBuilder::new();
        let z = lp.add_vars(dim, VarKind::Free);
        let r = lp.add_var(VarKind::NonNeg);
        for (row, b) in poly.rows.iter().zip(&poly.bounds) {
            let norm = row.iter().map(|a| a * a).sum::<f64>().sqrt();
            let mut e = LinExpr { terms: z.iter().zip(row).map(|(v, a)| (*v, *a)).collect(), constant: 0.0 };
            e.terms.push((r, norm));
            lp.constrain(e, Relation::Le, *b);
        }
        lp.constrain(LinExpr::var(r), Relation::Le, 1.0);
        let state = match lp.maximize(&LinExpr::var(r), LpOptions::default())? {
            LpStatus::Optimal(s) => s.x[..dim].to_vec(),
            LpStatus::Infeasible => return Err(Error::Parameter("H-polytope is empty".into())),
            LpStatus::Unbounded => return Err(Error::Unbounded("interior point LP".into())),
        };
        Ok(Self { poly, state })
    }

    fn chord(&self, dir: &[f64]) -> (f64, f64) {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for (row, b) in self.poly.rows.iter().zip(&self.poly.bounds) {
            let ad: f64 = row.iter().zip(dir).map(|(a, d)| a * d).sum();
            let slack = b - row.iter().zip(&self.state).map(|(a, x)| a * x).sum::<f64>();
            let slack = slack.max(0.0);
            if ad > 1e-15 {
                hi = hi.min(slack / ad);
            } else if ad < -1e-15 {
                lo = lo.max(slack / ad);
            }
        }
        (lo.max(-1e6), hi.min(1e6))
    }

    fn next<R: Rng>(&mut self, rng: &mut R) -> Vec<f64> {
        let dim = self.state.len();
        let mut boundary = None;
        for _ in 0..3 {
            let dir: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
            let (lo, hi) = self.chord(&dir);
            if !(hi >= lo) {
                continue;
            }
            let t = lo + (hi - lo) * rng.random::<f64>();
            for (s, d) in self.state.iter_mut().zip(&dir) {
                *s += t * d;
            }
            if rng.random::<f64>() < BOUNDARY_SHARE {
                let end = if rng.random::<bool>() { hi - t } else { lo - t };
                boundary = Some(self.state.iter().zip(&dir).map(|(s, d)| s + end * d).collect::<Vec<f64>>());
            }
        }
        let point = boundary.unwrap_or_else(|| self.state.clone());
        point[..self.poly.m].to_vec()
    }
}
