//! Two-sided bounds for entropy numbers: packings from inside the class give
//! lower bounds, certified coverings give upper bounds.

use std::borrow::Cow;
use std::sync::atomic::{AtomicU64, Ordering};

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{sup_dist, sup_norm, ClassSampler, FunctionClass, SampleDesign};
use crate::lp::LpOptions;
use crate::recovery::{binomial, pair_diameter_pruned};
use crate::report::{CertifiedInterval, INTERVAL_SLACK};

pub const DEFAULT_REFINE_ITERS: usize = 200;
pub const MAX_PACKING: usize = 1 << 16;
pub const NET_BUDGET: u64 = 10_000_000;
/// Default ℓ₁ mesh on the weight simplex; the net slack is this share of the
/// largest vertex norm.
pub const DEFAULT_MESH: f64 = 0.05;
pub const MAX_NET_DIM: usize = 16;
/// Point lists longer than this are replaced by a hash in JSON output.
pub const ELIDE_ABOVE: usize = 64;
const POOL_SAMPLES: usize = 1024;
const RANDOM_DIRECTIONS: usize = 16;
/// Largest node count for sign-pattern support directions.
const SIGN_PATTERN_NODES: usize = 8;
const KCENTER_ROUNDS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparatedFamily {
    pub points: Vec<Vec<f64>>,
    pub separation: f64,
    pub membership_tol: f64,
}

pub fn min_separation(points: &[Vec<f64>]) -> f64 {
    (0..points.len())
        .into_par_iter()
        .map(|i| points[i + 1..].iter().map(|q| sup_dist(&points[i], q)).fold(f64::INFINITY, f64::min))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

impl SeparatedFamily {
    /// Validates membership of every point and computes the separation.
    pub fn new(class: &FunctionClass, points: Vec<Vec<f64>>, membership_tol: f64) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Parameter("a separated family needs at least two points".into()));
        }
        for (i, p) in points.iter().enumerate() {
            let v = class.violation(p)?;
            if v > membership_tol {
                return Err(Error::Parameter(format!("family point {i} lies outside the class (violation {v:.3e})")));
            }
        }
        let separation = min_separation(&points);
        Ok(Self { points, separation, membership_tol })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Half the separation: a lower bound for `φ_n` whenever the family has
    /// at least `2ⁿ + 1` points.
    pub fn half_separation(&self) -> f64 {
        self.separation / 2.0
    }

    /// Largest `n` with `2ⁿ + 1 <= len`.
    pub fn max_level(&self) -> Option<usize> {
        (0..=usize::BITS as usize - 2).rev().find(|&n| (1usize << n) < self.len())
    }

    pub fn recheck(&self, class: &FunctionClass) -> Result<bool> {
        for p in &self.points {
            if !class.member(p, self.membership_tol)? {
                return Ok(false);
            }
        }
        Ok((min_separation(&self.points) - self.separation).abs() <= 1e-12)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "count": self.points.len(),
            "separation": self.separation,
            "membership_tol": self.membership_tol,
            "points": points_json(&self.points),
        })
    }
}

/// Points inline when short, otherwise a count and SHA-256 over their
/// full-precision text.
pub fn points_json(points: &[Vec<f64>]) -> serde_json::Value {
    if points.len() <= ELIDE_ABOVE {
        return serde_json::json!(points);
    }
    let mut h = Sha256::new();
    for p in points {
        for x in p {
            h.update(format!("{x:.16e},").as_bytes());
        }
        h.update(b"\n");
    }
    serde_json::json!({ "elided": points.len(), "sha256": hex::encode(h.finalize()) })
}

fn candidate_pool(class: &FunctionClass, samples: usize, seed: u64, opts: LpOptions) -> Result<Vec<Vec<f64>>> {
    let m = class.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = class.vertex_list().unwrap_or_default();
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..m {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; m];
            e[i] = s;
            dirs.push(e);
        }
    }
    for _ in 0..RANDOM_DIRECTIONS {
        dirs.push((0..m).map(|_| StandardNormal.sample(&mut rng)).collect());
    }
    // alternating-sign directions on k spread nodes pick out oscillating members
    for k in 1..=m.min(SIGN_PATTERN_NODES) {
        let nodes: Vec<usize> = (0..k).map(|i| (((i as f64 + 0.5) * m as f64 / k as f64) - 0.5).round() as usize).collect();
        for signs in 0..1u32 << k {
            let mut w = vec![0.0; m];
            for (b, &x) in nodes.iter().enumerate() {
                w[x] = if signs >> b & 1 == 1 { -1.0 } else { 1.0 };
            }
            dirs.push(w);
        }
    }
    for d in &dirs {
        pool.push(class.support(d, opts)?.maximizer);
    }
    let mut sampler = ClassSampler::new(class)?;
    pool.extend((0..samples).map(|_| sampler.sample(&mut rng)));
    Ok(pool)
}

fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Farthest-point selection of `count` pool indices, starting from the pool
/// point of largest norm.
fn farthest_points(pool: &[Vec<f64>], count: usize) -> Vec<usize> {
    let norms: Vec<f64> = pool.iter().map(|p| p.iter().fold(0.0f64, |a, x| a.max(x.abs()))).collect();
    let first = argmax_first(&norms);
    let mut chosen = vec![first];
    let mut dist: Vec<f64> = pool.iter().map(|p| sup_dist(p, &pool[first])).collect();
    while chosen.len() < count {
        let next = argmax_first(&dist);
        chosen.push(next);
        let q = &pool[next];
        dist.par_iter_mut().zip(pool).for_each(|(d, p)| *d = d.min(sup_dist(p, q)));
    }
    chosen
}

fn closest_pair(points: &[&Vec<f64>]) -> (usize, usize, f64) {
    let mut best = (0, 1, f64::INFINITY);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = sup_dist(points[i], points[j]);
            if d < best.2 {
                best = (i, j, d);
            }
        }
    }
    best
}

/// Exchange refinement: move one endpoint of the closest pair to the pool
/// point farthest from the rest, while the separation strictly grows.
fn refine(pool: &[Vec<f64>], chosen: &mut [usize], iters: usize) {
    for _ in 0..iters {
        let pts: Vec<&Vec<f64>> = chosen.iter().map(|&i| &pool[i]).collect();
        let (a, b, sep) = closest_pair(&pts);
        let mut improved = false;
        for slot in [a, b] {
            let others: Vec<&Vec<f64>> = pts.iter().enumerate().filter(|(k, _)| *k != slot).map(|(_, p)| *p).collect();
            let rest_sep = if others.len() >= 2 { closest_pair(&others).2 } else { f64::INFINITY };
            let reach: Vec<f64> = pool
                .par_iter()
                .map(|p| others.iter().map(|q| sup_dist(p, q)).fold(f64::INFINITY, f64::min))
                .collect();
            let cand = argmax_first(&reach);
            let new_sep = rest_sep.min(reach[cand]);
            if new_sep > sep + 1e-12 {
                chosen[slot] = cand;
                improved = true;
                break;
            }
        }
        if !improved {
            break;
        }
    }
}

/// Max-min packing of `count` members: farthest-point greedy over a seeded
/// candidate pool, then exchange refinement.
pub fn greedy_packing(class: &FunctionClass, count: usize, seed: u64, refine_iters: usize, opts: LpOptions) -> Result<SeparatedFamily> {
    if count < 2 {
        return Err(Error::Parameter("packing needs at least two points".into()));
    }
    if count > MAX_PACKING {
        return Err(Error::Budget(format!("packing of {count} points exceeds the cap {MAX_PACKING}")));
    }
    let mut pool = candidate_pool(class, POOL_SAMPLES.max(4 * count), seed, opts)?;
    let tol = 1e-6;
    loop {
        let mut chosen = farthest_points(&pool, count);
        refine(&pool, &mut chosen, refine_iters);
        let outside: Vec<usize> = chosen
            .iter()
            .copied()
            .filter(|&i| class.violation(&pool[i]).map_or(true, |v| v > tol))
            .sorted_unstable()
            .dedup()
            .collect();
        if outside.is_empty() {
            return SeparatedFamily::new(class, chosen.iter().map(|&i| pool[i].clone()).collect(), tol);
        }
        for i in outside.into_iter().rev() {
            pool.swap_remove(i);
        }
        if pool.len() < count {
            return Err(Error::Solver("too few candidate points passed the membership check".into()));
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverMethod {
    /// k-center over a δ-net of a V-polytope
    NetCover,
    /// cells of a quantized sample design, radius from the slack pair gap
    SectionCover,
}

impl CoverMethod {
    pub fn tag(self) -> &'static str {
        match self {
            CoverMethod::NetCover => "net-cover",
            CoverMethod::SectionCover => "section-cover",
        }
    }
}

/// Partition of the class by quantized sample values: node `nodes[i]` is cut
/// into `2^bits[i]` cells of width `widths[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionPartition {
    pub nodes: Vec<usize>,
    pub bits: Vec<u32>,
    pub widths: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringCertificate {
    pub method: CoverMethod,
    pub centers: Vec<Vec<f64>>,
    pub radius: f64,
    pub net_mesh: f64,
    pub net_slack: f64,
    pub net_size: u64,
    pub partition: Option<SectionPartition>,
}

impl CoveringCertificate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "method": self.method.tag(),
            "radius": self.radius,
            "net_mesh": self.net_mesh,
            "net_slack": self.net_slack,
            "net_size": self.net_size,
            "center_count": self.centers.len(),
            "centers": points_json(&self.centers),
            "partition": self.partition,
        })
    }

    /// Re-checks a net cover against a freshly built net: every net point must
    /// lie within `radius - net_slack` of a center.
    pub fn verify_net(&self, class: &FunctionClass) -> Result<bool> {
        if self.method != CoverMethod::NetCover {
            return Err(Error::Unsupported("only net covers carry explicit centers".into()));
        }
        let net = SimplexNet::new(class, self.net_mesh, NET_BUDGET)?;
        let inner = self.radius - self.net_slack;
        let worst = net
            .points
            .par_chunks(net.m)
            .map(|p| self.centers.iter().map(|c| sup_dist(p, c)).fold(f64::INFINITY, f64::min))
            .collect::<Vec<_>>()
            .into_iter()
            .fold(0.0, f64::max);
        Ok(worst <= inner + 1e-9)
    }
}

/// Convex combinations of the vertices with weights on the grid of step
/// `1/N`; every member is within `slack` of some net point.
struct SimplexNet {
    m: usize,
    points: Vec<f64>,
    slack: f64,
    size: u64,
}

impl SimplexNet {
    fn vertices(class: &FunctionClass) -> Result<Vec<Vec<f64>>> {
        class
            .vertex_list()
            .ok_or_else(|| Error::Unsupported(format!("net cover needs a vertex list ({} has none)", class.label)))
    }

    fn size_for(k: usize, mesh: f64) -> (usize, u64) {
        let steps = (k as f64 / mesh).ceil() as usize;
        (steps, binomial(steps + k - 1, k - 1))
    }

    fn new(class: &FunctionClass, mesh: f64, budget: u64) -> Result<Self> {
        if !(mesh > 0.0) {
            return Err(Error::Parameter("mesh must be positive".into()));
        }
        let m = class.dim();
        if m > MAX_NET_DIM {
            return Err(Error::Unsupported(format!("net covers are limited to m <= {MAX_NET_DIM}")));
        }
        let verts = Self::vertices(class)?;
        let k = verts.len();
        let (steps, size) = Self::size_for(k, mesh);
        if size > budget {
            return Err(Error::Budget(format!("net of {size} points exceeds {budget}; use a coarser mesh")));
        }
        let radius = verts.iter().map(|v| sup_norm(v)).collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max);
        let mut points = Vec::with_capacity(size as usize * m);
        let mut weights = vec![0usize; k];
        compositions(&mut weights, 0, steps, &mut |w| {
            for x in 0..m {
                points.push(w.iter().zip(&verts).map(|(c, v)| *c as f64 * v[x]).sum::<f64>() / steps as f64);
            }
        });
        Ok(Self { m, points, slack: mesh * radius, size })
    }

    fn len(&self) -> usize {
        self.points.len() / self.m.max(1)
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.m..(i + 1) * self.m]
    }
}

fn compositions(w: &mut Vec<usize>, pos: usize, left: usize, visit: &mut impl FnMut(&[usize])) {
    if pos + 1 == w.len() {
        w[pos] = left;
        visit(w);
        return;
    }
    for c in (0..=left).rev() {
        w[pos] = c;
        compositions(w, pos + 1, left - c, visit);
    }
}

fn bbox_mid(points: &[&[f64]], m: usize) -> Vec<f64> {
    (0..m)
        .map(|x| {
            let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[x]), hi.max(p[x])));
            0.5 * (lo + hi)
        })
        .collect()
}

fn nearest(p: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, c) in centers.iter().enumerate() {
        let d = sup_dist(p, c);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

/// Gonzalez k-center on the net, then rounds of reassignment with each
/// cluster recentered at its bounding-box midpoint.
fn kcenter(net: &SimplexNet, k: usize) -> (Vec<Vec<f64>>, f64) {
    let len = net.len();
    if k >= len {
        return ((0..len).map(|i| net.point(i).to_vec()).collect(), 0.0);
    }
    let mut centers = vec![net.point(0).to_vec()];
    let mut dist: Vec<f64> = (0..len).into_par_iter().map(|i| sup_dist(net.point(i), &centers[0])).collect();
    while centers.len() < k {
        let next = argmax_first(&dist);
        let c = net.point(next).to_vec();
        dist.par_iter_mut().enumerate().for_each(|(i, d)| *d = d.min(sup_dist(net.point(i), &c)));
        centers.push(c);
    }
    let mut best = (centers.clone(), dist.iter().copied().fold(0.0, f64::max));
    for _ in 0..KCENTER_ROUNDS {
        let assign: Vec<usize> = (0..len).into_par_iter().map(|i| nearest(net.point(i), &centers).0).collect();
        let mut clusters: Vec<Vec<&[f64]>> = vec![Vec::new(); centers.len()];
        for (i, a) in assign.iter().enumerate() {
            clusters[*a].push(net.point(i));
        }
        for (c, members) in centers.iter_mut().zip(&clusters) {
            if !members.is_empty() {
                *c = bbox_mid(members, net.m);
            }
        }
        let radius = (0..len)
            .into_par_iter()
            .map(|i| nearest(net.point(i), &centers).1)
            .collect::<Vec<_>>()
            .into_iter()
            .fold(0.0, f64::max);
        if radius < best.1 - 1e-15 {
            best = (centers.clone(), radius);
        } else {
            break;
        }
    }
    best
}

/// Upper bound for `ε_n` from `2ⁿ` centers placed on a δ-net of the class
/// (V-polytopes and p-ball hulls).
pub fn net_cover_upper(class: &FunctionClass, n: usize, mesh: f64) -> Result<CoveringCertificate> {
    let net = SimplexNet::new(class, mesh, NET_BUDGET)?;
    let k = 1usize.checked_shl(n as u32).unwrap_or(usize::MAX);
    let (centers, radius) = kcenter(&net, k);
    Ok(CoveringCertificate {
        method: CoverMethod::NetCover,
        centers,
        radius: radius + net.slack,
        net_mesh: mesh,
        net_slack: net.slack,
        net_size: net.size,
        partition: None,
    })
}

/// Non-convex p-balls are covered through their convex hull.
fn cover_target(class: &FunctionClass) -> Result<Cow<'_, FunctionClass>> {
    if class.is_convex() {
        return Ok(Cow::Borrowed(class));
    }
    let verts = class.vertex_list().ok_or_else(|| Error::Unsupported("non-convex class without hull".into()))?;
    Ok(Cow::Owned(FunctionClass::vpolytope(verts, class.symmetric)?))
}

/// Upper bound for `ε_n` by splitting sample values into `2^{a_j}` cells at
/// chosen nodes with `Σ a_j <= n`; each cell is covered by one ball whose
/// radius is half the largest slack pair gap. Bits are allocated greedily.
pub fn section_cover_upper(class: &FunctionClass, n: usize, opts: LpOptions) -> Result<CoveringCertificate> {
    let target = cover_target(class)?;
    let class = target.as_ref();
    let m = class.dim();
    let bbox = class.bounding_box(opts)?;
    let range: Vec<f64> = bbox.iter().map(|(lo, hi)| (hi - lo).max(0.0)).collect();
    let mut bits = vec![0u32; m];
    let mut radius = range.iter().copied().fold(0.0, f64::max) / 2.0;
    let layout = |bits: &[u32]| -> (SampleDesign, Vec<f64>) {
        let nodes: Vec<usize> = (0..m).filter(|&j| bits[j] > 0).collect();
        let widths = nodes.iter().map(|&j| range[j] / 2f64.powi(bits[j] as i32)).collect();
        (SampleDesign::new(nodes, m).expect("distinct in-range nodes"), widths)
    };
    for _ in 0..n {
        if radius <= 0.0 {
            break;
        }
        let best_bits = AtomicU64::new(radius.to_bits());
        let vals: Vec<Option<f64>> = (0..m)
            .into_par_iter()
            .map(|j| {
                let mut b = bits.clone();
                b[j] += 1;
                let (design, widths) = layout(&b);
                let abort = 2.0 * f64::from_bits(best_bits.load(Ordering::Relaxed));
                let gap = pair_diameter_pruned(class, &design, Some(&widths), abort, opts)?;
                let r = gap.map(|g| (g / 2.0).min(radius));
                if let Some(r) = r {
                    best_bits.fetch_min(r.max(0.0).to_bits(), Ordering::Relaxed);
                }
                Ok(r)
            })
            .collect::<Result<_>>()?;
        let min = vals.iter().flatten().copied().fold(f64::INFINITY, f64::min);
        match vals.iter().position(|v| v.is_some_and(|v| v <= min)) {
            Some(j) => {
                bits[j] += 1;
                radius = min;
            }
            None => break,
        }
    }
    let (design, widths) = layout(&bits);
    Ok(CoveringCertificate {
        method: CoverMethod::SectionCover,
        centers: Vec::new(),
        radius,
        net_mesh: 0.0,
        net_slack: 0.0,
        net_size: 0,
        partition: Some(SectionPartition {
            bits: design.indices().iter().map(|&j| bits[j]).collect(),
            nodes: design.indices().to_vec(),
            widths,
        }),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyParams {
    /// ℓ₁ mesh for net covers; `None` picks `DEFAULT_MESH`
    pub mesh: Option<f64>,
    pub seed: u64,
    pub refine_iters: usize,
    pub net_budget: u64,
    pub opts: LpOptions,
}

impl Default for EntropyParams {
    fn default() -> Self {
        Self { mesh: None, seed: 0, refine_iters: DEFAULT_REFINE_ITERS, net_budget: NET_BUDGET, opts: LpOptions::default() }
    }
}

#[derive(Debug, Clone)]
pub struct EntropyEstimate {
    pub interval: CertifiedInterval,
    pub packing: SeparatedFamily,
    pub cover: CoveringCertificate,
    /// every covering that was computed, the chosen one included
    pub covers: Vec<CoveringCertificate>,
}

impl EntropyEstimate {
    /// `hi / lo`, a diagnostic only.
    pub fn sandwich_ratio(&self) -> f64 {
        self.interval.hi / self.interval.lo
    }
}

/// `ε_n ∈ [lo, hi]` with `lo` the best half-separation among the greedy
/// packing and any `extra` families of at least `2ⁿ + 1` members, and `hi` the
/// smaller of the net and section covers.
pub fn entropy_interval(class: &FunctionClass, n: usize, params: &EntropyParams, extra: &[&SeparatedFamily]) -> Result<EntropyEstimate> {
    let count = 1usize.checked_shl(n as u32).and_then(|c| c.checked_add(1)).unwrap_or(usize::MAX);
    let greedy = greedy_packing(class, count, params.seed, params.refine_iters, params.opts)?;
    let mut packing = greedy;
    let mut lo_method = "packing";
    for fam in extra {
        if fam.len() >= count && fam.separation > packing.separation {
            packing = (*fam).clone();
            lo_method = "transcript-family";
        }
    }

    let mut covers = vec![section_cover_upper(class, n, params.opts)?];
    if let Some(verts) = class.vertex_list() {
        let mesh = params.mesh.unwrap_or(DEFAULT_MESH);
        let (_, size) = SimplexNet::size_for(verts.len(), mesh);
        if class.dim() <= MAX_NET_DIM && size <= params.net_budget {
            covers.push(net_cover_upper(class, n, mesh)?);
        }
    }
    let cover = covers
        .iter()
        .min_by(|a, b| a.radius.total_cmp(&b.radius))
        .expect("at least one cover")
        .clone();
    let lo = packing.half_separation();
    if lo > cover.radius + 1e-6 {
        return Err(Error::Solver(format!(
            "packing bound {lo} exceeds covering bound {}; the certificates are inconsistent",
            cover.radius
        )));
    }
    let interval = CertifiedInterval::new(lo, cover.radius.max(lo - INTERVAL_SLACK), lo_method, cover.method.tag())?;
    Ok(EntropyEstimate { interval, packing, cover, covers })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmallEntropy {
    /// best min-max radius over the net
    pub radius: f64,
    pub net_slack: f64,
    pub centers: Vec<Vec<f64>>,
}

/// Exhaustive search over all `2ⁿ`-subsets of `grid` as centers, scored on a
/// δ-net of the class.
pub fn exact_small_entropy(class: &FunctionClass, n: usize, grid: &[Vec<f64>], mesh: f64) -> Result<SmallEntropy> {
    if grid.is_empty() || grid.len() > 20 {
        return Err(Error::Parameter("candidate grid must hold 1 to 20 points".into()));
    }
    if n > 3 {
        return Err(Error::Budget("exhaustive entropy search is limited to 2ⁿ <= 8 centers".into()));
    }
    for g in grid {
        class.check_point(g)?;
    }
    let net = SimplexNet::new(class, mesh, 100_000)?;
    let k = (1usize << n).min(grid.len());
    let work = binomial(grid.len(), k).saturating_mul(net.size);
    if work > 1_000_000_000 {
        return Err(Error::Budget(format!("{work} distance evaluations exceed the brute-force budget")));
    }
    let subsets: Vec<Vec<usize>> = (0..grid.len()).combinations(k).collect();
    let scores: Vec<f64> = subsets
        .par_iter()
        .map(|s| {
            let centers: Vec<Vec<f64>> = s.iter().map(|&i| grid[i].clone()).collect();
            (0..net.len()).map(|i| nearest(net.point(i), &centers).1).fold(0.0, f64::max)
        })
        .collect();
    let best = scores
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
        .expect("nonempty subsets");
    Ok(SmallEntropy {
        radius: scores[best],
        net_slack: net.slack,
        centers: subsets[best].iter().map(|&i| grid[i].clone()).collect(),
    })
}
