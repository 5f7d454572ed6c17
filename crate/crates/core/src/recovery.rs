//! Optimal recovery from point samples: the Chebyshev-center map, the
//! diameter of information, and sampling numbers by design search.
//!
//! For a fixed design, the worst-case error of the coordinate-wise midpoint
//! map is half the largest gap between two class members that share their
//! samples. Minimizing that gap over designs gives the diameter of
//! information, and the sampling number is half of it.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{sup_dist, ClassSampler, FeasibleSection, FunctionClass, SampleDesign};
use crate::lp::LpOptions;
use crate::report::{CertifiedInterval, Quantity, QuantityResult};

/// Default cap on the number of designs enumerated exhaustively.
pub const DEFAULT_BUDGET: u64 = 100_000;

/// Chebyshev-center recovery for a fixed design.
#[derive(Debug, Clone)]
pub struct RecoveryMap<'a> {
    pub class: &'a FunctionClass,
    pub design: SampleDesign,
    pub opts: LpOptions,
}

impl<'a> RecoveryMap<'a> {
    pub fn new(class: &'a FunctionClass, design: SampleDesign, opts: LpOptions) -> Result<Self> {
        if design.indices().iter().any(|&i| i >= class.dim()) {
            return Err(Error::Dimension("design index exceeds class dimension".into()));
        }
        Ok(Self { class, design, opts })
    }

    /// Coordinate-wise midpoint of the section through `y`; zero when no
    /// class member produces `y`.
    pub fn chebyshev_center(&self, y: &[f64]) -> Result<Vec<f64>> {
        let section = FeasibleSection::new(self.class, &self.design, y.to_vec(), self.opts)?;
        let m = self.class.dim();
        let mut center = vec![0.0; m];
        for (x, c) in center.iter_mut().enumerate() {
            match section.extrema(x)? {
                Some((lo, hi)) => *c = 0.5 * (lo + hi),
                None => return Ok(vec![0.0; m]),
            }
        }
        Ok(center)
    }

    pub fn samples_of(&self, f: &[f64]) -> Vec<f64> {
        self.design.indices().iter().map(|&i| f[i]).collect()
    }

    /// Largest observed `‖f - φ*(f|design)‖_∞` over seeded members of the
    /// class. A lower bound on the worst-case error of the map.
    pub fn recovery_error_probe(&self, trials: usize, seed: u64) -> Result<f64> {
        if trials == 0 {
            return Err(Error::Parameter("probe needs at least one trial".into()));
        }
        let mut points = self.class.vertex_list().unwrap_or_default();
        let mut sampler = ClassSampler::new(self.class)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        points.extend((0..trials).map(|_| sampler.sample(&mut rng)));
        let errors: Vec<f64> = points
            .par_iter()
            .map(|f| -> Result<f64> {
                let center = self.chebyshev_center(&self.samples_of(f))?;
                Ok(sup_dist(f, &center))
            })
            .collect::<Result<_>>()?;
        Ok(errors.into_iter().fold(0.0, f64::max))
    }
}

/// `C(m, n)`, saturating at `u64::MAX`.
pub fn binomial(m: usize, n: usize) -> u64 {
    if n > m {
        return 0;
    }
    let n = n.min(m - n);
    let mut acc: u128 = 1;
    for i in 0..n {
        acc = acc * (m - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Coordinates ordered by distance to the nearest design node, farthest first.
fn probe_order(m: usize, design: &SampleDesign) -> Vec<usize> {
    let mut coords: Vec<usize> = (0..m).filter(|x| !design.contains(*x)).collect();
    coords.sort_by_key(|&x| {
        let d = design.indices().iter().map(|&j| x.abs_diff(j)).min().unwrap_or(m);
        (std::cmp::Reverse(d), x)
    });
    coords
}

/// Largest pair gap over coordinates for `design` (with optional slack), or
/// `None` as soon as some coordinate gap exceeds `abort_above`.
pub fn pair_diameter_pruned(
    class: &FunctionClass,
    design: &SampleDesign,
    slack: Option<&[f64]>,
    abort_above: f64,
    opts: LpOptions,
) -> Result<Option<f64>> {
    let mut best = 0.0f64;
    let order = match slack {
        None => probe_order(class.dim(), design),
        Some(_) => probe_order(class.dim(), &SampleDesign::empty()),
    };
    for x in order {
        let gap = class.pair_extreme(design, slack, x, opts)?.gap;
        best = best.max(gap);
        if best > abort_above {
            return Ok(None);
        }
    }
    Ok(Some(best))
}

/// Evenly spaced n-point designs between every pair of end nodes near the
/// two ends of the grid.
fn spread_designs(m: usize, n: usize) -> Vec<SampleDesign> {
    if n < 2 || n > m {
        return Vec::new();
    }
    let reach = (m - 1) / n;
    let mut out = Vec::new();
    for a in 0..=reach {
        for b in (m - 1 - reach).max(a + 1)..m {
            let ix: Vec<usize> = (0..n)
                .map(|i| (a as f64 + i as f64 * (b - a) as f64 / (n - 1) as f64).round() as usize)
                .collect();
            if ix.windows(2).all(|w| w[0] < w[1]) {
                out.push(SampleDesign::new(ix, m).expect("increasing in-range nodes"));
            }
        }
    }
    out
}

fn tie_tolerance(class: &FunctionClass, opts: LpOptions) -> Result<f64> {
    Ok(1e-9 * class.sup_radius(opts)?.max(1.0))
}

/// Exact diameter of information `g⁰_n` by enumerating all n-subsets of the
/// grid, or the budget error when there are too many.
pub fn diameter_of_information(class: &FunctionClass, n: usize, budget: u64, opts: LpOptions) -> Result<QuantityResult> {
    let start = Instant::now();
    let m = class.dim();
    if n > m {
        return Err(Error::Parameter(format!("n = {n} exceeds grid size m = {m}")));
    }
    let count = binomial(m, n);
    if count > budget {
        return Err(Error::Budget(format!(
            "C({m}, {n}) = {count} designs exceed the enumeration budget {budget}; use the heuristic search"
        )));
    }
    let tol = tie_tolerance(class, opts)?;
    let designs: Vec<SampleDesign> = (0..m)
        .combinations(n)
        .map(|ix| SampleDesign::new(ix, m))
        .collect::<Result<_>>()?;
    let best_bits = AtomicU64::new(f64::INFINITY.to_bits());
    let values: Vec<Option<f64>> = designs
        .par_iter()
        .map(|d| -> Result<Option<f64>> {
            let threshold = f64::from_bits(best_bits.load(Ordering::Relaxed)) + tol;
            let v = pair_diameter_pruned(class, d, None, threshold, opts)?;
            if let Some(v) = v {
                // nonnegative doubles order like their bit patterns
                best_bits.fetch_min(v.max(0.0).to_bits(), Ordering::Relaxed);
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;
    let min = values.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let pick = values
        .iter()
        .position(|v| v.is_some_and(|v| v <= min + tol))
        .ok_or_else(|| Error::Solver("design enumeration produced no value".into()))?;
    let value = values[pick].expect("picked a computed design");
    Ok(QuantityResult {
        quantity: Quantity::G0,
        n,
        value: CertifiedInterval::exact(value, "exhaustive")?,
        best_design: Some(designs[pick].clone()),
        method: "exhaustive".into(),
        runtime_ms: start.elapsed().as_millis(),
        seed: 0,
    })
}

/// Greedy forward selection followed by single-node exchanges. Returns only
/// an upper bound on `g⁰_n`.
pub fn diameter_of_information_heuristic(class: &FunctionClass, n: usize, opts: LpOptions) -> Result<QuantityResult> {
    let start = Instant::now();
    let m = class.dim();
    if n > m {
        return Err(Error::Parameter(format!("n = {n} exceeds grid size m = {m}")));
    }
    let tol = tie_tolerance(class, opts)?;
    // best candidate among `candidates`, first in order on ties
    let pick_best = |candidates: Vec<SampleDesign>, incumbent: f64| -> Result<Option<(SampleDesign, f64)>> {
        let best_bits = AtomicU64::new(incumbent.to_bits());
        let vals: Vec<Option<f64>> = candidates
            .par_iter()
            .map(|d| {
                let threshold = f64::from_bits(best_bits.load(Ordering::Relaxed));
                let v = pair_diameter_pruned(class, d, None, threshold, opts)?;
                if let Some(v) = v {
                    best_bits.fetch_min(v.max(0.0).to_bits(), Ordering::Relaxed);
                }
                Ok(v)
            })
            .collect::<Result<_>>()?;
        let min = vals.iter().flatten().copied().fold(f64::INFINITY, f64::min);
        Ok(vals
            .iter()
            .position(|v| v.is_some_and(|v| v <= min + tol))
            .map(|i| (candidates[i].clone(), vals[i].expect("computed"))))
    };

    let mut design = SampleDesign::empty();
    let mut value = class.pair_diameter(&design, opts)?;
    for _ in 0..n {
        let candidates: Vec<SampleDesign> = (0..m).filter(|x| !design.contains(*x)).map(|x| design.extended(x)).collect();
        let (d, v) = pick_best(candidates, f64::INFINITY)?.ok_or_else(|| Error::Solver("greedy step found no design".into()))?;
        design = d;
        value = v;
    }
    if let Some((d, v)) = pick_best(spread_designs(m, n), value)? {
        if v < value - tol {
            design = d;
            value = v;
        }
    }
    // exchange passes: accept strict improvements only
    for _ in 0..4 * m.max(1) {
        if design.is_empty() || design.len() == m {
            break;
        }
        let mut candidates = Vec::new();
        for pos in 0..design.len() {
            for x in (0..m).filter(|x| !design.contains(*x)) {
                let mut ix = design.indices().to_vec();
                ix[pos] = x;
                candidates.push(SampleDesign::new(ix, m)?);
            }
        }
        match pick_best(candidates, value - tol)? {
            Some((d, v)) if v < value - tol => {
                design = d;
                value = v;
            }
            _ => break,
        }
    }
    let mut sorted = design.indices().to_vec();
    sorted.sort_unstable();
    let design = SampleDesign::new(sorted, m)?;
    let value = class.pair_diameter(&design, opts)?;
    Ok(QuantityResult {
        quantity: Quantity::G0,
        n,
        value: CertifiedInterval::new(0.0, value, "trivial", "greedy-exchange")?,
        best_design: Some(design),
        method: "greedy-exchange".into(),
        runtime_ms: start.elapsed().as_millis(),
        seed: 0,
    })
}

/// `g⁰_n`, exhaustive when within budget and heuristic otherwise.
pub fn diameter_of_information_auto(class: &FunctionClass, n: usize, budget: u64, opts: LpOptions) -> Result<QuantityResult> {
    match diameter_of_information(class, n, budget, opts) {
        Err(Error::Budget(_)) => diameter_of_information_heuristic(class, n, opts),
        other => other,
    }
}

/// Halves a `g⁰_n` result into `g_n`.
pub fn sampling_from_diameter(g0: &QuantityResult) -> Result<QuantityResult> {
    if g0.quantity != Quantity::G0 {
        return Err(Error::Parameter("expected a diameter-of-information result".into()));
    }
    let v = &g0.value;
    Ok(QuantityResult {
        quantity: Quantity::G,
        value: CertifiedInterval::new(v.lo / 2.0, v.hi / 2.0, v.lo_method.clone(), v.hi_method.clone())?,
        ..g0.clone()
    })
}

/// Sampling number `g_n = g⁰_n / 2` by exhaustive design search.
pub fn sampling_number(class: &FunctionClass, n: usize, budget: u64, opts: LpOptions) -> Result<QuantityResult> {
    sampling_from_diameter(&diameter_of_information(class, n, budget, opts)?)
}

/// Members `{0, ±M e_i}` of a p-ball image; every pair among them is a valid
/// witness pair for lower bounds.
pub fn pball_candidates(class: &FunctionClass) -> Result<Vec<Vec<f64>>> {
    let mut c = vec![vec![0.0; class.dim()]];
    c.extend(class.vertex_list().ok_or_else(|| Error::Unsupported("class has no vertex list".into()))?);
    Ok(c)
}

/// Largest gap at any coordinate over candidate pairs agreeing on `design`.
pub fn candidate_pair_diameter(candidates: &[Vec<f64>], design: &SampleDesign) -> f64 {
    let mut best = 0.0f64;
    for (i, a) in candidates.iter().enumerate() {
        for b in &candidates[i + 1..] {
            if design.indices().iter().all(|&j| (a[j] - b[j]).abs() <= 1e-12) {
                best = best.max(sup_dist(a, b));
            }
        }
    }
    best
}

/// `g⁰_n` for any supported class. Convex classes go through the design
/// search (exhaustive, or heuristic when `heuristic` is set and the budget is
/// exceeded). Non-convex p-balls get the hull value as upper bound and the
/// candidate-pair value as lower bound.
pub fn diameter_interval(class: &FunctionClass, n: usize, budget: u64, heuristic: bool, opts: LpOptions) -> Result<QuantityResult> {
    if class.is_convex() {
        return if heuristic {
            diameter_of_information_auto(class, n, budget, opts)
        } else {
            diameter_of_information(class, n, budget, opts)
        };
    }
    let start = Instant::now();
    let hull = FunctionClass::vpolytope(class.vertex_list().expect("p-ball hull"), class.symmetric)?;
    let hi = diameter_of_information(&hull, n, budget, opts)?;
    let m = class.dim();
    let cands = pball_candidates(class)?;
    let lo = (0..m)
        .combinations(n)
        .map(|ix| SampleDesign::new(ix, m).map(|d| candidate_pair_diameter(&cands, &d)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(QuantityResult {
        value: CertifiedInterval::new(lo.min(hi.value.hi), hi.value.hi, "candidate-pairs", "hull")?,
        method: "candidate-pairs|hull".into(),
        runtime_ms: start.elapsed().as_millis(),
        ..hi
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{lp_ball, random_vpolytope};
    use approx::assert_abs_diff_eq;

    fn cube2() -> FunctionClass {
        lp_ball(2, f64::INFINITY).unwrap()
    }

    fn segment1() -> FunctionClass {
        FunctionClass::vpolytope(vec![vec![-1.0], vec![1.0]], true).unwrap()
    }

    fn diag_segment() -> FunctionClass {
        FunctionClass::vpolytope(vec![vec![-1.0, -1.0], vec![1.0, 1.0]], true).unwrap()
    }

    fn d(ix: &[usize], m: usize) -> SampleDesign {
        SampleDesign::new(ix.to_vec(), m).unwrap()
    }

    const OPTS: LpOptions = LpOptions { tol: 1e-9, exact: false };

    #[test]
    fn chebyshev_center_examples() {
        let l1 = lp_ball(2, 1.0).unwrap();
        let r = RecoveryMap::new(&l1, d(&[0], 2), OPTS).unwrap();
        let c = r.chebyshev_center(&[0.5]).unwrap();
        assert_abs_diff_eq!(c[0], 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(c[1], 0.0, epsilon = 1e-9);

        let cube = cube2();
        let r = RecoveryMap::new(&cube, d(&[0, 1], 2), OPTS).unwrap();
        let c = r.chebyshev_center(&[0.3, -0.2]).unwrap();
        assert_abs_diff_eq!(c[0], 0.3, epsilon = 1e-9);
        assert_abs_diff_eq!(c[1], -0.2, epsilon = 1e-9);

        let r = RecoveryMap::new(&cube, d(&[0], 2), OPTS).unwrap();
        assert_eq!(r.chebyshev_center(&[5.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn diameter_examples() {
        let l1 = lp_ball(4, 1.0).unwrap();
        let r = diameter_of_information(&l1, 2, DEFAULT_BUDGET, OPTS).unwrap();
        assert_abs_diff_eq!(r.value.hi, 2.0, epsilon = 1e-8);
        assert_eq!(r.best_design.unwrap().indices(), &[0, 1]);
        let r = diameter_of_information(&diag_segment(), 1, DEFAULT_BUDGET, OPTS).unwrap();
        assert_abs_diff_eq!(r.value.hi, 0.0, epsilon = 1e-9);
        let r = diameter_of_information(&cube2(), 1, DEFAULT_BUDGET, OPTS).unwrap();
        assert_abs_diff_eq!(r.value.hi, 2.0, epsilon = 1e-9);
        assert!(matches!(diameter_of_information(&l1, 2, 5, OPTS), Err(Error::Budget(_))));
    }

    #[test]
    fn sampling_number_examples() {
        let g = sampling_number(&segment1(), 0, DEFAULT_BUDGET, OPTS).unwrap();
        assert_abs_diff_eq!(g.value.lo, 1.0, epsilon = 1e-12);
        assert_eq!(g.quantity, Quantity::G);
        let l1 = lp_ball(4, 1.0).unwrap();
        for n in 1..=3 {
            let g = sampling_number(&l1, n, DEFAULT_BUDGET, OPTS).unwrap();
            assert_abs_diff_eq!(g.value.hi, 1.0, epsilon = 1e-8);
        }
        let g = sampling_number(&cube2(), 2, DEFAULT_BUDGET, OPTS).unwrap();
        assert_abs_diff_eq!(g.value.hi, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn heuristic_never_beats_exhaustive() {
        let class = random_vpolytope(5, 6, 1.0, 3, true).unwrap();
        for n in 0..=3 {
            let exact = diameter_of_information(&class, n, DEFAULT_BUDGET, OPTS).unwrap();
            let heur = diameter_of_information_heuristic(&class, n, OPTS).unwrap();
            assert!(heur.value.hi >= exact.value.hi - 1e-9);
            assert_eq!(heur.value.lo, 0.0);
        }
    }

    #[test]
    fn probe_examples() {
        let cube = cube2();
        let r = RecoveryMap::new(&cube, d(&[0], 2), OPTS).unwrap();
        let v = r.recovery_error_probe(1000, 0).unwrap();
        assert!(v <= 1.0 + 1e-8 && v >= 0.9, "{v}");
        let r = RecoveryMap::new(&cube, d(&[0, 1], 2), OPTS).unwrap();
        assert!(r.recovery_error_probe(50, 0).unwrap() <= 1e-8);
        let seg = diag_segment();
        let r = RecoveryMap::new(&seg, d(&[0], 2), OPTS).unwrap();
        assert!(r.recovery_error_probe(50, 0).unwrap() <= 1e-8);
        assert!(matches!(r.recovery_error_probe(0, 0), Err(Error::Parameter(_))));
    }

    #[test]
    fn monotone_in_n_and_symmetric_designs_agree() {
        let l1 = lp_ball(4, 1.0).unwrap();
        let mut prev = f64::INFINITY;
        for n in 0..=4 {
            let g = sampling_number(&l1, n, DEFAULT_BUDGET, OPTS).unwrap();
            assert!(g.value.hi <= prev + 1e-9);
            prev = g.value.hi;
        }
        // permutation-symmetric class: every 2-design has the same pair diameter
        let vals: Vec<f64> = (0..4)
            .combinations(2)
            .map(|ix| l1.pair_diameter(&SampleDesign::new(ix, 4).unwrap(), OPTS).unwrap())
            .collect();
        for v in &vals {
            assert_abs_diff_eq!(*v, vals[0], epsilon = 1e-9);
        }
    }

    #[test]
    fn pball_interval_brackets() {
        let q = FunctionClass::pball(nalgebra::DMatrix::identity(3, 3), 0.5).unwrap();
        for n in 0..=2 {
            let r = diameter_interval(&q, n, DEFAULT_BUDGET, false, OPTS).unwrap();
            assert_abs_diff_eq!(r.value.lo, 2.0, epsilon = 1e-9);
            assert_abs_diff_eq!(r.value.hi, 2.0, epsilon = 1e-9);
        }
        assert!(matches!(sampling_number(&q, 1, DEFAULT_BUDGET, OPTS), Err(Error::Unsupported(_))));
    }

    #[test]
    fn binomial_counts() {
        assert_eq!(binomial(32, 4), 35_960);
        assert_eq!(binomial(4, 0), 1);
        assert_eq!(binomial(3, 4), 0);
    }
}
