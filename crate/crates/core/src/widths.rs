//! Upper bounds for Kolmogorov widths in the sup-norm, the Euclidean
//! ellipsoid oracle, and the width sanity inequality for sampling numbers.

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Body, FunctionClass};
use crate::lp::{LinExpr, LpBuilder, LpOptions, LpStatus, Relation, VarKind};
use crate::recovery::{diameter_interval, sampling_from_diameter};

pub const DEFAULT_WIDTH_ITERS: usize = 50;
const RANDOM_SUBSETS: usize = 8;
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubspaceCandidate {
    /// orthonormal basis vectors
    pub basis: Vec<Vec<f64>>,
    pub worst_error: f64,
    pub origin: String,
    /// worst error after each accepted refinement step
    pub trace: Vec<f64>,
}

/// `min_c ‖v - B c‖_∞` by LP.
pub fn distance_to_span(v: &[f64], basis: &[Vec<f64>], opts: LpOptions) -> Result<f64> {
    if basis.is_empty() {
        return Ok(v.iter().fold(0.0f64, |a, x| a.max(x.abs())));
    }
    let mut lp = LpBuilder::new();
    let c = lp.add_vars(basis.len(), VarKind::Free);
    let t = lp.add_var(VarKind::NonNeg);
    for (i, vi) in v.iter().enumerate() {
        let mut r = LinExpr::constant(*vi);
        for (cj, b) in c.iter().zip(basis) {
            r.terms.push((*cj, -b[i]));
        }
        let mut up = r.clone();
        up.terms.push((t, -1.0));
        lp.constrain(up, Relation::Le, 0.0);
        let mut down = r;
        down.terms.push((t, 1.0));
        lp.constrain(down, Relation::Ge, 0.0);
    }
    match lp.minimize(&LinExpr::var(t), opts)? {
        LpStatus::Optimal(s) => Ok(s.value.max(0.0)),
        other => Err(Error::Solver(format!("distance LP ended {other:?}"))),
    }
}

fn vertex_errors(vertices: &[Vec<f64>], basis: &[Vec<f64>], opts: LpOptions) -> Result<Vec<f64>> {
    vertices.par_iter().map(|v| distance_to_span(v, basis, opts)).collect()
}

/// Gram-Schmidt in order; dependent vectors are replaced by the first unit
/// vectors that raise the rank, so the result spans at least the input.
fn orthonormalize(vectors: &[Vec<f64>], m: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    let push = |out: &mut Vec<Vec<f64>>, v: &[f64]| -> bool {
        let mut w = v.to_vec();
        for _ in 0..2 {
            for q in out.iter() {
                let d: f64 = w.iter().zip(q).map(|(a, b)| a * b).sum();
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= d * qi;
                }
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let scale = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
        if norm > RANK_TOL * scale {
            out.push(w.iter().map(|x| x / norm).collect());
            true
        } else {
            false
        }
    };
    for v in vectors {
        if out.len() == dim {
            break;
        }
        push(&mut out, v);
    }
    for i in 0..m {
        if out.len() >= dim {
            break;
        }
        let mut e = vec![0.0; m];
        e[i] = 1.0;
        push(&mut out, &e);
    }
    out
}

/// Top right singular vectors of the (uncentered) rows.
fn principal_directions(rows: &[Vec<f64>], m: usize, dim: usize) -> Vec<Vec<f64>> {
    if rows.is_empty() || dim == 0 {
        return Vec::new();
    }
    let a = DMatrix::from_fn(rows.len(), m, |i, j| rows[i][j]);
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]).then(i.cmp(&j)));
    order.into_iter().take(dim).map(|i| vt.row(i).iter().copied().collect()).collect()
}

struct Scored {
    basis: Vec<Vec<f64>>,
    errors: Vec<f64>,
    worst: f64,
    origin: &'static str,
}

fn score(vertices: &[Vec<f64>], raw: &[Vec<f64>], dim: usize, origin: &'static str, opts: LpOptions) -> Result<Scored> {
    let m = vertices[0].len();
    let basis = orthonormalize(raw, m, dim);
    let errors = vertex_errors(vertices, &basis, opts)?;
    let worst = errors.iter().copied().fold(0.0, f64::max);
    Ok(Scored { basis, errors, worst, origin })
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Upper bound for `d_n(F, ℓ∞)` over V-polytopes (and p-ball hulls). The
/// worst error over vertices is exact for a given subspace. Dimensions are
/// built up from 0 so each level can extend the previous one, which keeps the
/// bound nonincreasing in `n`.
pub fn kolmogorov_upper(class: &FunctionClass, n: usize, iters: usize, seed: u64, opts: LpOptions) -> Result<SubspaceCandidate> {
    let vertices = class
        .vertex_list()
        .ok_or_else(|| Error::Unsupported(format!("Kolmogorov bounds need a vertex list ({} has none)", class.label)))?;
    let m = class.dim();
    if n >= m {
        let basis = orthonormalize(&[], m, m);
        return Ok(SubspaceCandidate { basis, worst_error: 0.0, origin: "coordinates".into(), trace: vec![0.0] });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = score(&vertices, &[], 0, "vertex-span", opts)?;
    let mut trace = vec![best.worst];
    for dim in 1..=n {
        let mut extended = best.basis.clone();
        extended.push(vertices[argmax(&best.errors)].clone());
        let mut pool = vec![
            score(&vertices, &extended, dim, "vertex-span", opts)?,
            score(&vertices, &principal_directions(&vertices, m, dim), dim, "principal-components", opts)?,
        ];
        for _ in 0..RANDOM_SUBSETS {
            let pick: Vec<Vec<f64>> = sample(&mut rng, vertices.len(), dim.min(vertices.len()))
                .into_iter()
                .map(|i| vertices[i].clone())
                .collect();
            pool.push(score(&vertices, &pick, dim, "vertex-span", opts)?);
        }
        let mut current = pool
            .into_iter()
            .reduce(|a, b| if b.worst < a.worst { b } else { a })
            .expect("nonempty candidate pool");
        trace = vec![current.worst];
        for _ in 0..iters {
            let worst_v = argmax(&current.errors);
            let mut moves = Vec::new();
            for j in 0..dim {
                let mut b = current.basis.clone();
                b[j] = vertices[worst_v].clone();
                moves.push(score(&vertices, &b, dim, "refined", opts)?);
            }
            // re-fit principal directions on the vertices that currently bind
            let binding: Vec<Vec<f64>> = vertices
                .iter()
                .zip(&current.errors)
                .filter(|(_, e)| **e >= 0.5 * current.worst)
                .map(|(v, _)| v.clone())
                .collect();
            moves.push(score(&vertices, &principal_directions(&binding, m, dim), dim, "refined", opts)?);
            let step = moves.into_iter().reduce(|a, b| if b.worst < a.worst { b } else { a }).expect("moves");
            if step.worst < current.worst - 1e-12 {
                current = step;
                trace.push(current.worst);
            } else {
                break;
            }
        }
        best = current;
    }
    Ok(SubspaceCandidate { basis: best.basis, worst_error: best.worst, origin: best.origin.into(), trace })
}

/// `σ_{n+1}` of the ellipsoid map: the Euclidean n-width of a centered
/// ellipsoid.
pub fn ellipsoid_width_euclidean(class: &FunctionClass, n: usize) -> Result<f64> {
    let Body::Ellipsoid(e) = &class.body else {
        return Err(Error::Unsupported("Euclidean width oracle needs an ellipsoid".into()));
    };
    if e.center.iter().any(|c| *c != 0.0) {
        return Err(Error::Unsupported("Euclidean width oracle needs a centered ellipsoid".into()));
    }
    let mut sv: Vec<f64> = e.map.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv.get(n).copied().unwrap_or(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WidthReport {
    pub n: usize,
    pub g: f64,
    pub d_ub: f64,
    pub rhs: f64,
    pub passed: bool,
    /// `g_n / d_ub`, diagnostic only
    pub ratio_g_d: f64,
    /// `d_ub / (n ε_n hi)`, diagnostic only
    pub ratio_d_eps: Option<f64>,
}

/// Checks `g_n <= (n+1) d_n` with the upper bound on `d_n` in place of `d_n`.
pub fn verify_width_inequalities(
    class: &FunctionClass,
    n: usize,
    budget: u64,
    eps_hi: Option<f64>,
    seed: u64,
    opts: LpOptions,
) -> Result<WidthReport> {
    let g = sampling_from_diameter(&diameter_interval(class, n, budget, false, opts)?)?.value.hi;
    let d_ub = kolmogorov_upper(class, n, DEFAULT_WIDTH_ITERS, seed, opts)?.worst_error;
    let rhs = (n + 1) as f64 * d_ub + 1e-6;
    Ok(WidthReport {
        n,
        g,
        d_ub,
        rhs,
        passed: g <= rhs,
        ratio_g_d: g / d_ub,
        ratio_d_eps: eps_hi.filter(|_| n > 0).map(|e| d_ub / (n as f64 * e)),
    })
}
