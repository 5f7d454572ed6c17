//! The inductive construction behind `g_n <= (n+1) ε_n`, run as an algorithm:
//! witness pairs agreeing on earlier nodes, the averaged sign family built
//! from them, and end-to-end checks of the inequality and its p-Banach form.

use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::{entropy_interval, EntropyEstimate, EntropyParams, SeparatedFamily};
use crate::error::{Error, Result};
use crate::geometry::{sup_dist, ClassSampler, FunctionClass, SampleDesign};
use crate::lp::LpOptions;
use crate::recovery::{candidate_pair_diameter, diameter_interval, pball_candidates, sampling_from_diameter, DEFAULT_BUDGET};
use crate::report::CertifiedInterval;

pub const MEMBERSHIP_TOL: f64 = 1e-6;
pub const IDENTITY_TOL: f64 = 1e-8;
/// Default numerical guard as a share of the class sup-radius.
pub const DEFAULT_DELTA_SHARE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstructionTranscript {
    /// `(f_k, g_k)` for `k = 0..=n`
    pub pairs: Vec<(Vec<f64>, Vec<f64>)>,
    pub nodes: Vec<usize>,
    /// gap achieved at step k, `|f_k(x_k) - g_k(x_k)|`
    pub gaps: Vec<f64>,
    pub rho: f64,
    pub delta: f64,
    pub p: f64,
    /// set when `rho <= delta`, so the separation claim carries no content
    pub vacuous: bool,
}

/// `(n+1)^{1/p}`.
pub fn family_denominator(n: usize, p: f64) -> f64 {
    ((n + 1) as f64).powf(1.0 / p)
}

impl ConstructionTranscript {
    pub fn n(&self) -> usize {
        self.pairs.len() - 1
    }

    pub fn denominator(&self) -> f64 {
        family_denominator(self.n(), self.p)
    }

    /// Membership, interpolation on earlier nodes, and gap conditions. Returns
    /// one message per violation.
    pub fn check_invariants(&self, class: &FunctionClass) -> Result<Vec<String>> {
        let mut bad = Vec::new();
        for (k, (f, g)) in self.pairs.iter().enumerate() {
            for (name, v) in [("f", f), ("g", g)] {
                let viol = class.violation(v)?;
                if viol > MEMBERSHIP_TOL {
                    bad.push(format!("{name}_{k} lies outside the class (violation {viol:.3e})"));
                }
            }
            for (j, &x) in self.nodes[..k].iter().enumerate() {
                let d = (f[x] - g[x]).abs();
                if d > IDENTITY_TOL {
                    bad.push(format!("pair {k} differs by {d:.3e} at earlier node x_{j} = {x}"));
                }
            }
            let x = self.nodes[k];
            let gap = (f[x] - g[x]).abs();
            if gap < self.rho - self.delta - IDENTITY_TOL {
                bad.push(format!("pair {k} gap {gap} at its node is below rho - delta = {}", self.rho - self.delta));
            }
        }
        Ok(bad)
    }
}

fn first_max(gaps: &[f64]) -> usize {
    let max = gaps.iter().copied().fold(0.0, f64::max);
    let tol = 1e-12 * max.max(1.0);
    gaps.iter().position(|g| *g >= max - tol).unwrap_or(0)
}

/// Default guard `δ`: a tiny share of the class sup-radius.
pub fn default_delta(class: &FunctionClass, opts: LpOptions) -> Result<f64> {
    Ok(DEFAULT_DELTA_SHARE * class.sup_radius(opts)?.max(1e-300))
}

/// Runs the induction for steps `k = 0..=n`. Each step takes the pair of
/// members agreeing on `x_0..x_{k-1}` that is farthest apart at some
/// coordinate and makes that coordinate `x_k` (smallest index on ties).
/// Non-convex p-balls draw their pairs from the members `{0, ±M e_i}`.
pub fn build_transcript(class: &FunctionClass, n: usize, delta: f64, opts: LpOptions) -> Result<ConstructionTranscript> {
    if !(delta > 0.0) {
        return Err(Error::Parameter("delta must be positive".into()));
    }
    let m = class.dim();
    let candidates = if class.is_convex() { None } else { Some(pball_candidates(class)?) };
    let mut nodes: Vec<usize> = Vec::new();
    let mut pairs = Vec::new();
    let mut gaps = Vec::new();
    for _ in 0..=n {
        let mut distinct = nodes.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let design = SampleDesign::new(distinct, m)?;
        let (x, f, g) = match &candidates {
            None => {
                let witnesses = (0..m)
                    .into_par_iter()
                    .map(|x| class.pair_extreme(&design, None, x, opts))
                    .collect::<Result<Vec<_>>>()?;
                let coord_gaps: Vec<f64> = witnesses.iter().map(|w| w.gap).collect();
                let x = first_max(&coord_gaps);
                let w = witnesses[x].clone();
                (x, w.f, w.g)
            }
            Some(c) => candidate_step(c, &design, m),
        };
        gaps.push((f[x] - g[x]).abs());
        nodes.push(x);
        pairs.push((f, g));
    }
    let rho = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ConstructionTranscript { pairs, nodes, gaps, rho, delta, p: class.exponent(), vacuous: rho <= delta })
}

fn candidate_step(c: &[Vec<f64>], design: &SampleDesign, m: usize) -> (usize, Vec<f64>, Vec<f64>) {
    let agree = |a: &Vec<f64>, b: &Vec<f64>| design.indices().iter().all(|&j| (a[j] - b[j]).abs() <= 1e-12);
    let mut best: (f64, usize, usize, usize) = (-1.0, 0, 0, 0);
    for x in 0..m {
        for i in 0..c.len() {
            for j in 0..c.len() {
                let gap = c[i][x] - c[j][x];
                if gap > best.0 + 1e-12 && agree(&c[i], &c[j]) {
                    best = (gap, x, i, j);
                }
            }
        }
    }
    let (_, x, i, j) = best;
    (x, c[i].clone(), c[j].clone())
}

/// Index bits of a family member: bit `i` of the position is `ξ_i`.
pub fn xi_bits(index: usize, n: usize) -> Vec<bool> {
    (0..=n).map(|i| index >> i & 1 == 1).collect()
}

/// The `2^{n+1}` members `h_ξ = Σ_i (ξ_i f_i + (1-ξ_i) g_i) / (n+1)^{1/p}`,
/// ordered by the integer whose bits are `ξ`.
pub fn build_separated_family(class: &FunctionClass, t: &ConstructionTranscript) -> Result<SeparatedFamily> {
    if (class.exponent() - t.p).abs() > 1e-12 {
        return Err(Error::Parameter(format!("transcript exponent {} does not match class exponent {}", t.p, class.exponent())));
    }
    let n = t.n();
    if n >= 20 {
        return Err(Error::Budget(format!("a family of 2^{} points is too large", n + 1)));
    }
    let m = class.dim();
    let denom = t.denominator();
    let points: Vec<Vec<f64>> = (0..1usize << (n + 1))
        .map(|idx| {
            let mut h = vec![0.0; m];
            for (i, take_f) in xi_bits(idx, n).into_iter().enumerate() {
                let term = if take_f { &t.pairs[i].0 } else { &t.pairs[i].1 };
                for (hx, v) in h.iter_mut().zip(term) {
                    *hx += v;
                }
            }
            h.iter().map(|v| v / denom).collect()
        })
        .collect();
    SeparatedFamily::new(class, points, MEMBERSHIP_TOL)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationReport {
    pub min_separation: f64,
    /// `(ρ - δ)/(n+1)^{1/p}`
    pub bound: f64,
    pub vacuous: bool,
    pub separation_passed: bool,
    pub pairs_checked: usize,
    pub telescoping_max_error: f64,
    pub telescoping_passed: bool,
    pub passed: bool,
}

/// Checks the family's separation against `(ρ-δ)/(n+1)^{1/p}` and, pair by
/// pair, the identity `|h_ξ(x_k) - h_ξ'(x_k)| = |f_k(x_k) - g_k(x_k)|/(n+1)^{1/p}`
/// at the first index `k` where `ξ` and `ξ'` differ.
pub fn verify_separation(t: &ConstructionTranscript, s: &SeparatedFamily) -> SeparationReport {
    let n = t.n();
    let denom = t.denominator();
    let bound = (t.rho - t.delta) / denom;
    let count = s.points.len();
    let per_row: Vec<(f64, f64)> = (0..count)
        .into_par_iter()
        .map(|a| {
            let mut sep = f64::INFINITY;
            let mut err = 0.0f64;
            for b in a + 1..count {
                sep = sep.min(sup_dist(&s.points[a], &s.points[b]));
                let k = (a ^ b).trailing_zeros() as usize;
                if k > n {
                    continue;
                }
                let x = t.nodes[k];
                let lhs = (s.points[a][x] - s.points[b][x]).abs();
                let rhs = (t.pairs[k].0[x] - t.pairs[k].1[x]).abs() / denom;
                err = err.max((lhs - rhs).abs());
            }
            (sep, err)
        })
        .collect();
    let min_separation = per_row.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let telescoping_max_error = per_row.iter().map(|r| r.1).fold(0.0, f64::max);
    let separation_passed = t.vacuous || min_separation >= bound - IDENTITY_TOL;
    let telescoping_passed = telescoping_max_error <= IDENTITY_TOL;
    SeparationReport {
        min_separation,
        bound,
        vacuous: t.vacuous,
        separation_passed,
        pairs_checked: count * count.saturating_sub(1) / 2,
        telescoping_max_error,
        telescoping_passed,
        passed: separation_passed && telescoping_passed,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub passed: bool,
    pub note: String,
}

impl Check {
    fn le(name: &str, lhs: f64, rhs: f64, note: impl Into<String>) -> Self {
        Check { name: name.into(), lhs, rhs, passed: lhs <= rhs, note: note.into() }
    }

    fn flag(name: &str, passed: bool, note: impl Into<String>) -> Self {
        Check { name: name.into(), lhs: f64::NAN, rhs: f64::NAN, passed, note: note.into() }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyParams {
    pub delta: Option<f64>,
    pub budget: u64,
    /// fall back to the heuristic design search when the budget is exceeded
    pub heuristic: bool,
    pub entropy: EntropyParams,
    /// externally supplied packing points, validated before use
    pub packing: Option<Vec<Vec<f64>>>,
}

impl Default for VerifyParams {
    fn default() -> Self {
        Self { delta: None, budget: DEFAULT_BUDGET, heuristic: false, entropy: EntropyParams::default(), packing: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MainReport {
    pub n: usize,
    pub p: f64,
    pub factor: f64,
    pub g: CertifiedInterval,
    pub g0: CertifiedInterval,
    pub g_exact: bool,
    pub design: String,
    pub eps: CertifiedInterval,
    pub eps_ratio: f64,
    pub nodes: Vec<usize>,
    pub gaps: Vec<f64>,
    pub rho: f64,
    pub delta: f64,
    pub vacuous: bool,
    pub family_size: usize,
    pub separation: Option<SeparationReport>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Computes `g_n` and `ε_n ∈ [lo, hi]`, runs the construction, and checks
/// `g_n <= (n+1)^{1/p} ε_n` together with the constructive lower bound
/// `ε_n >= (g⁰_n - δ)/(2 (n+1)^{1/p})`.
pub fn verify_main_inequality(class: &FunctionClass, n: usize, params: &VerifyParams) -> Result<MainReport> {
    let opts = params.entropy.opts;
    let p = class.exponent();
    let factor = family_denominator(n, p);
    let delta = match params.delta {
        Some(d) => d,
        None => default_delta(class, opts)?,
    };
    let mut checks = Vec::new();

    if class.symmetric {
        let mut members = class.vertex_list().unwrap_or_default();
        let mut sampler = ClassSampler::new(class)?;
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(params.entropy.seed);
        members.extend((0..100).map(|_| sampler.sample(&mut rng)));
        let ok = class.check_symmetry(&members, MEMBERSHIP_TOL)?;
        checks.push(Check::flag("symmetry", ok, "negations of tested members lie in the class"));
    }

    let mut extra: Vec<SeparatedFamily> = Vec::new();
    if let Some(points) = &params.packing {
        let worst = points.iter().map(|q| class.violation(q)).collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max);
        let ok = points.len() >= 2 && worst <= MEMBERSHIP_TOL;
        checks.push(Check::le("packing-witness", worst, MEMBERSHIP_TOL, format!("{} supplied points; largest membership violation", points.len())));
        if ok {
            extra.push(SeparatedFamily::new(class, points.clone(), MEMBERSHIP_TOL)?);
        }
    }

    let transcript = build_transcript(class, n, delta, opts)?;
    let bad = transcript.check_invariants(class)?;
    checks.push(Check::flag("transcript", bad.is_empty(), bad.join("; ")));
    let (family_size, separation) = match build_separated_family(class, &transcript) {
        Ok(fam) => {
            let rep = verify_separation(&transcript, &fam);
            checks.push(Check::flag(
                "separation",
                rep.passed,
                if rep.vacuous { "vacuous: the construction ran out of gap".to_string() } else { String::new() },
            ));
            let size = fam.len();
            extra.push(fam);
            (size, Some(rep))
        }
        Err(Error::Parameter(msg)) => {
            checks.push(Check::flag("family-membership", false, msg));
            (0, None)
        }
        Err(e) => return Err(e),
    };

    let g0 = diameter_interval(class, n, params.budget, params.heuristic, opts)?;
    let g = sampling_from_diameter(&g0)?;
    let g_exact = g0.value.hi - g0.value.lo <= 1e-9;

    let extra_refs: Vec<&SeparatedFamily> = extra.iter().collect();
    let eps = entropy_interval(class, n, &params.entropy, &extra_refs)?;
    let eps_iv = eps.interval.clone();

    checks.push(Check::le("main", g.value.hi, factor * eps_iv.hi + 1e-6, format!("g_n <= {factor} * eps_n upper bound")));
    if g_exact && (class.is_convex() || transcript.rho >= g0.value.hi - delta) {
        let need = (g0.value.hi - delta) / (2.0 * factor) - 1e-8;
        checks.push(Check::le("constructive", need, eps_iv.lo, "eps_n lower bound >= (g0_n - delta)/(2 factor)"));
    } else {
        checks.push(Check::flag("constructive", true, "skipped: g0_n is not known exactly"));
    }
    checks.push(Check::le("sandwich", eps_iv.lo, eps_iv.hi + 1e-6, "packing bound below covering bound"));

    let passed = checks.iter().all(|c| c.passed);
    Ok(MainReport {
        n,
        p,
        factor,
        g: g.value.clone(),
        g0: g0.value.clone(),
        g_exact,
        design: g0.best_design.map(|d| d.to_string()).unwrap_or_default(),
        eps_ratio: eps.sandwich_ratio(),
        eps: eps_iv,
        nodes: transcript.nodes.clone(),
        gaps: transcript.gaps.clone(),
        rho: transcript.rho,
        delta,
        vacuous: transcript.vacuous,
        family_size,
        separation,
        checks,
        passed,
    })
}

/// Entropy bounds with the construction's family (default guard) added to
/// the packing candidates; falls back to plain packing when the
/// construction is unavailable.
pub fn entropy_with_construction(class: &FunctionClass, n: usize, params: &EntropyParams) -> Result<EntropyEstimate> {
    let delta = default_delta(class, params.opts)?;
    let family = build_transcript(class, n, delta, params.opts).and_then(|t| build_separated_family(class, &t));
    let extra: Vec<&SeparatedFamily> = family.as_ref().ok().into_iter().collect();
    entropy_interval(class, n, params, &extra)
}

/// `max gap` over candidate pairs agreeing on the transcript nodes.
pub fn candidate_gap(class: &FunctionClass, nodes: &[usize]) -> Result<f64> {
    let mut d = nodes.to_vec();
    d.sort_unstable();
    d.dedup();
    Ok(candidate_pair_diameter(&pball_candidates(class)?, &SampleDesign::new(d, class.dim())?))
}
