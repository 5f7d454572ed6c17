//! Support, membership, section and pair oracles over every class
//! representation. Polytopes go through the LP backbone; ellipsoids use
//! closed forms.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use super::class::{Body, Ellipsoid, FunctionClass, HPolytope, VPolytope};
use super::design::SampleDesign;
use crate::error::{Error, Result};
use crate::lp::{LinExpr, LpBuilder, LpOptions, LpStatus, Relation, VarKind};

/// Largest V-polytope (grid size, vertex count) solved in exact arithmetic.
pub const EXACT_MAX_DIM: usize = 8;
pub const EXACT_MAX_VERTICES: usize = 16;

/// `max_i |v_i|`.
pub fn sup_norm(v: &[f64]) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::Dimension("sup-norm of an empty vector".into()));
    }
    Ok(v.iter().fold(0.0f64, |acc, x| acc.max(x.abs())))
}

pub fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()))
}

/// `(Σ |v_i|^p)^{1/p}`; a norm for `p >= 1`, a quasinorm below.
pub fn p_quasinorm(v: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    }
    v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Support {
    pub value: f64,
    pub maximizer: Vec<f64>,
}

/// A pair `f, g` of class members agreeing (up to slack) on a design, with
/// the gap `f_coord - g_coord` they realize.
#[derive(Debug, Clone, PartialEq)]
pub struct PairWitness {
    pub coord: usize,
    pub gap: f64,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

fn optimum(status: LpStatus, what: &str) -> Result<crate::lp::LpSolution> {
    match status {
        LpStatus::Optimal(s) => Ok(s),
        LpStatus::Unbounded => Err(Error::Unbounded(format!("{what}: LP unbounded"))),
        LpStatus::Infeasible => Err(Error::Solver(format!("{what}: LP infeasible"))),
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl VPolytope {
    fn embed(&self, lp: &mut LpBuilder, pins: &[Option<LinExpr>]) -> Vec<LinExpr> {
        let m = self.vertices[0].len();
        let lambda = lp.add_vars(self.vertices.len(), VarKind::NonNeg);
        let mut total = LinExpr::default();
        for &l in &lambda {
            total.add_scaled(&LinExpr::var(l), 1.0);
        }
        lp.constrain(total, Relation::Eq, 1.0);
        let values: Vec<LinExpr> = (0..m)
            .map(|i| LinExpr {
                terms: lambda.iter().zip(&self.vertices).map(|(&l, v)| (l, v[i])).collect(),
                constant: 0.0,
            })
            .collect();
        for (i, pin) in pins.iter().enumerate() {
            if let Some(pin) = pin {
                lp.constrain(values[i].minus(pin), Relation::Eq, 0.0);
            }
        }
        values
    }

    fn is_small(&self) -> bool {
        self.vertices[0].len() <= EXACT_MAX_DIM && self.vertices.len() <= EXACT_MAX_VERTICES
    }
}

impl HPolytope {
    fn embed(&self, lp: &mut LpBuilder, pins: &[Option<LinExpr>]) -> Vec<LinExpr> {
        let values: Vec<LinExpr> = (0..self.m)
            .map(|i| match pins.get(i).and_then(Option::as_ref) {
                Some(pin) => pin.clone(),
                None => LinExpr::var(lp.add_var(VarKind::Free)),
            })
            .collect();
        let aux = lp.add_vars(self.aux, VarKind::Free);
        for (row, b) in self.rows.iter().zip(&self.bounds) {
            let mut e = LinExpr::default();
            for (i, a) in row[..self.m].iter().enumerate() {
                if *a != 0.0 {
                    e.add_scaled(&values[i], *a);
                }
            }
            for (j, a) in row[self.m..].iter().enumerate() {
                if *a != 0.0 {
                    e.terms.push((aux[j], *a));
                }
            }
            lp.constrain(e, Relation::Le, *b);
        }
        values
    }
}

/// Affine slice `{u : map_D u = r}` of the coefficient ball of an ellipsoid.
struct EllipsoidSlice {
    /// minimum-norm solution, orthogonal to the null space
    u0: DVector<f64>,
    /// orthonormal basis of the row space of `map_D` (columns)
    row_basis: DMatrix<f64>,
    smallest_sv: f64,
    consistent: bool,
}

impl Ellipsoid {
    fn slice(&self, design: &SampleDesign, values: Option<&[f64]>) -> EllipsoidSlice {
        let m = self.center.len();
        let n = design.len();
        if n == 0 {
            return EllipsoidSlice {
                u0: DVector::zeros(m),
                row_basis: DMatrix::zeros(m, 0),
                smallest_sv: f64::INFINITY,
                consistent: true,
            };
        }
        let md = DMatrix::from_fn(n, m, |r, c| self.map[(design.indices()[r], c)]);
        let rhs = match values {
            Some(y) => DVector::from_fn(n, |r, _| y[r] - self.center[design.indices()[r]]),
            None => DVector::zeros(n),
        };
        let svd = md.clone().svd(true, true);
        let u = svd.u.as_ref().expect("requested U");
        let vt = svd.v_t.as_ref().expect("requested V^T");
        let smax = svd.singular_values.max();
        let cutoff = 1e-12 * smax.max(1e-300);
        let mut basis_cols = Vec::new();
        let mut u0 = DVector::zeros(m);
        let mut smallest = f64::INFINITY;
        for (k, &s) in svd.singular_values.iter().enumerate() {
            if s > cutoff {
                let v = vt.row(k).transpose();
                let coef = u.column(k).dot(&rhs) / s;
                u0 += &v * coef;
                basis_cols.push(v);
                smallest = smallest.min(s);
            }
        }
        let row_basis = if basis_cols.is_empty() {
            DMatrix::zeros(m, 0)
        } else {
            DMatrix::from_columns(&basis_cols)
        };
        let resid = (&md * &u0 - &rhs).amax();
        let scale = 1.0 + rhs.amax();
        EllipsoidSlice { u0, row_basis, smallest_sv: smallest, consistent: resid <= 1e-9 * scale }
    }

    /// Splits `a` into its row-space and null-space parts and returns their norms.
    fn split_norms(slice: &EllipsoidSlice, a: &DVector<f64>) -> (f64, f64) {
        let coords = slice.row_basis.transpose() * a;
        let in_row = coords.norm();
        let total = a.norm();
        let in_null = (total * total - in_row * in_row).max(0.0).sqrt();
        (in_row, in_null)
    }

    fn null_projection(slice: &EllipsoidSlice, a: &DVector<f64>) -> DVector<f64> {
        a - &slice.row_basis * (slice.row_basis.transpose() * a)
    }

    fn row(&self, i: usize) -> DVector<f64> {
        self.map.row(i).transpose()
    }
}

impl FunctionClass {
    /// The exact-arithmetic switch is honored only for small V-polytopes.
    pub fn effective_options(&self, opts: LpOptions) -> LpOptions {
        match &self.body {
            Body::V(v) if opts.exact && v.is_small() => opts,
            _ => LpOptions { exact: false, tol: if opts.tol > 0.0 { opts.tol } else { 1e-9 } },
        }
    }

    /// The LP-representable body used for linear optimization; p-balls are
    /// replaced by their hull, which is exact when `p = 1`.
    fn linear_body(&self) -> Result<LinearBody<'_>> {
        match &self.body {
            Body::V(v) => Ok(LinearBody::V(std::borrow::Cow::Borrowed(v))),
            Body::H(h) => Ok(LinearBody::H(h)),
            Body::PBall(p) => Ok(LinearBody::V(std::borrow::Cow::Owned(p.hull()))),
            Body::Ellipsoid(_) => Err(Error::Unsupported("ellipsoid has no linear description".into())),
        }
    }

    fn require_convex(&self, what: &str) -> Result<()> {
        if self.is_convex() {
            Ok(())
        } else {
            Err(Error::Unsupported(format!("{what} requires a convex class (p-ball with p < 1 given)")))
        }
    }

    /// Vertices of the class (or of its hull for p-balls), if it has a finite list.
    pub fn vertex_list(&self) -> Option<Vec<Vec<f64>>> {
        match &self.body {
            Body::V(v) => Some(v.vertices.clone()),
            Body::PBall(p) => Some(p.hull().vertices),
            _ => None,
        }
    }

    /// `max_{f ∈ F} ⟨w, f⟩` with a maximizing member.
    pub fn support(&self, w: &[f64], opts: LpOptions) -> Result<Support> {
        self.check_point(w)?;
        match &self.body {
            Body::V(v) => Ok(best_vertex(&v.vertices, w)),
            Body::PBall(p) => Ok(best_vertex(&p.hull().vertices, w)),
            Body::Ellipsoid(e) => {
                let wv = DVector::from_column_slice(w);
                let mtw = e.map.transpose() * &wv;
                let norm = mtw.norm();
                let point = if norm > 0.0 { &e.center + &e.map * (&mtw / norm) } else { e.center.clone() };
                Ok(Support { value: e.center.dot(&wv) + norm, maximizer: point.iter().copied().collect() })
            }
            Body::H(h) => {
                let opts = self.effective_options(opts);
                let mut lp = LpBuilder::new();
                let vals = h.embed(&mut lp, &[]);
                let mut obj = LinExpr::default();
                for (i, wi) in w.iter().enumerate() {
                    obj.add_scaled(&vals[i], *wi);
                }
                let sol = optimum(lp.maximize(&obj, opts)?, "support")?;
                Ok(Support { value: sol.value, maximizer: vals.iter().map(|e| e.eval(&sol.x)).collect() })
            }
        }
    }

    /// Per-coordinate `(min, max)` over the class.
    pub fn bounding_box(&self, opts: LpOptions) -> Result<Vec<(f64, f64)>> {
        let m = self.dim();
        (0..m)
            .map(|i| {
                let mut e = vec![0.0; m];
                e[i] = 1.0;
                let hi = self.support(&e, opts)?.value;
                e[i] = -1.0;
                let lo = -self.support(&e, opts)?.value;
                if !(lo.is_finite() && hi.is_finite()) {
                    return Err(Error::Unbounded(format!("coordinate {i} has infinite range")));
                }
                Ok((lo, hi))
            })
            .collect()
    }

    /// `max_{f ∈ F} ‖f‖_∞`, from 2m support calls.
    pub fn sup_radius(&self, opts: LpOptions) -> Result<f64> {
        Ok(self.bounding_box(opts)?.iter().fold(0.0f64, |acc, (lo, hi)| acc.max(lo.abs()).max(hi.abs())))
    }

    /// Membership up to `tol` (sup-distance for V-polytopes, row violation for
    /// H-polytopes, gauge excess for ellipsoids and p-balls).
    pub fn member(&self, v: &[f64], tol: f64) -> Result<bool> {
        if tol < 0.0 {
            return Err(Error::Parameter("membership tolerance must be nonnegative".into()));
        }
        Ok(self.violation(v)? <= tol)
    }

    /// How far `v` is from satisfying the class description (0 inside).
    pub fn violation(&self, v: &[f64]) -> Result<f64> {
        self.check_point(v)?;
        match &self.body {
            Body::V(p) => {
                if p.vertices.iter().any(|u| u == v) {
                    return Ok(0.0);
                }
                let mut lp = LpBuilder::new();
                let vals = p.embed(&mut lp, &[]);
                let s = lp.add_var(VarKind::NonNeg);
                for (i, e) in vals.iter().enumerate() {
                    let mut up = e.clone();
                    up.terms.push((s, -1.0));
                    lp.constrain(up, Relation::Le, v[i]);
                    let mut down = e.clone();
                    down.terms.push((s, 1.0));
                    lp.constrain(down, Relation::Ge, v[i]);
                }
                let sol = optimum(lp.minimize(&LinExpr::var(s), LpOptions::default())?, "membership")?;
                Ok(sol.value.max(0.0))
            }
            Body::H(h) if h.aux == 0 => Ok(h
                .rows
                .iter()
                .zip(&h.bounds)
                .fold(0.0f64, |acc, (r, b)| acc.max(dot(r, v) - b))),
            Body::H(h) => {
                let mut lp = LpBuilder::new();
                let pins: Vec<Option<LinExpr>> = v.iter().map(|x| Some(LinExpr::constant(*x))).collect();
                let s = lp.add_var(VarKind::NonNeg);
                // embed with every coordinate fixed; rows get a shared violation slack
                let aux = lp.add_vars(h.aux, VarKind::Free);
                for (row, b) in h.rows.iter().zip(&h.bounds) {
                    let mut e = LinExpr::default();
                    for (i, a) in row[..h.m].iter().enumerate() {
                        e.add_scaled(pins[i].as_ref().expect("pinned"), *a);
                    }
                    for (j, a) in row[h.m..].iter().enumerate() {
                        if *a != 0.0 {
                            e.terms.push((aux[j], *a));
                        }
                    }
                    e.terms.push((s, -1.0));
                    lp.constrain(e, Relation::Le, *b);
                }
                let sol = optimum(lp.minimize(&LinExpr::var(s), LpOptions::default())?, "membership")?;
                Ok(sol.value.max(0.0))
            }
            Body::Ellipsoid(e) => {
                let z = e.inverse() * (DVector::from_column_slice(v) - &e.center);
                Ok((z.norm() - 1.0).max(0.0))
            }
            Body::PBall(p) => {
                let z = p.inverse() * DVector::from_column_slice(v);
                let z: Vec<f64> = z.iter().copied().collect();
                Ok((p_quasinorm(&z, p.p) - 1.0).max(0.0))
            }
        }
    }

    /// Checks that 2m support calls are finite.
    pub fn verify_bounded(&self) -> Result<()> {
        self.bounding_box(LpOptions::default()).map(|_| ())
    }

    /// For a class flagged symmetric, checks `-v ∈ F` on the given members.
    pub fn check_symmetry<'a>(&self, members: impl IntoIterator<Item = &'a Vec<f64>>, tol: f64) -> Result<bool> {
        if !self.symmetric {
            return Ok(true);
        }
        for v in members {
            let neg: Vec<f64> = v.iter().map(|x| -x).collect();
            if !self.member(&neg, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Largest `f_coord - g_coord` over `f, g ∈ F` with
    /// `|f_j - g_j| <= slack_j` on the design (`slack = None` means equality).
    ///
    /// Exact for polytopes. For ellipsoids with nonzero slack the returned gap
    /// is an upper bound.
    pub fn pair_extreme(
        &self,
        design: &SampleDesign,
        slack: Option<&[f64]>,
        coord: usize,
        opts: LpOptions,
    ) -> Result<PairWitness> {
        let m = self.dim();
        if coord >= m {
            return Err(Error::Dimension(format!("coordinate {coord} out of range for m = {m}")));
        }
        if let Some(s) = slack {
            if s.len() != design.len() || s.iter().any(|x| !(*x >= 0.0)) {
                return Err(Error::Parameter("slack must be a nonnegative vector over the design".into()));
            }
        }
        self.require_convex("pair diameter")?;
        let slack_at = |pos: usize| slack.map_or(0.0, |s| s[pos]);
        if let Some(pos) = design.indices().iter().position(|&i| i == coord) {
            if slack_at(pos) == 0.0 {
                let anchor = self.support(&unit(m, 0), opts)?.maximizer;
                return Ok(PairWitness { coord, gap: 0.0, f: anchor.clone(), g: anchor });
            }
        }
        if let Body::Ellipsoid(e) = &self.body {
            return Ok(ellipsoid_pair(e, design, slack, coord));
        }
        let opts = self.effective_options(opts);
        let body = self.linear_body()?;
        let mut lp = LpBuilder::new();
        if self.symmetric {
            // (f - g)/2 ∈ F vanishes on the design, and h ↦ (h, -h) inverts it
            let pins: Vec<Option<LinExpr>> = (0..m)
                .map(|i| match design.indices().iter().position(|&j| j == i) {
                    Some(pos) if slack_at(pos) == 0.0 => Some(LinExpr::constant(0.0)),
                    _ => None,
                })
                .collect();
            let h = body.embed(&mut lp, &pins);
            for (pos, &j) in design.indices().iter().enumerate() {
                let s = slack_at(pos);
                if s > 0.0 {
                    lp.constrain(h[j].clone(), Relation::Le, s / 2.0);
                    lp.constrain(h[j].clone(), Relation::Ge, -s / 2.0);
                }
            }
            let sol = optimum(lp.maximize(&h[coord], opts)?, "pair extreme")?;
            let f: Vec<f64> = h.iter().map(|e| e.eval(&sol.x)).collect();
            let g: Vec<f64> = f.iter().map(|x| -x).collect();
            return Ok(PairWitness { coord, gap: 2.0 * sol.value, f, g });
        }
        let f = body.embed(&mut lp, &[]);
        let pins: Vec<Option<LinExpr>> = (0..m)
            .map(|i| match design.indices().iter().position(|&j| j == i) {
                Some(pos) if slack_at(pos) == 0.0 => Some(f[i].clone()),
                _ => None,
            })
            .collect();
        let g = body.embed(&mut lp, &pins);
        for (pos, &j) in design.indices().iter().enumerate() {
            let s = slack_at(pos);
            if s > 0.0 {
                let d = f[j].minus(&g[j]);
                lp.constrain(d.clone(), Relation::Le, s);
                lp.constrain(d, Relation::Ge, -s);
            }
        }
        let sol = optimum(lp.maximize(&f[coord].minus(&g[coord]), opts)?, "pair extreme")?;
        Ok(PairWitness {
            coord,
            gap: sol.value,
            f: f.iter().map(|e| e.eval(&sol.x)).collect(),
            g: g.iter().map(|e| e.eval(&sol.x)).collect(),
        })
    }

    /// Gap per coordinate for pairs agreeing on `design`.
    pub fn pair_profile(&self, design: &SampleDesign, slack: Option<&[f64]>, opts: LpOptions) -> Result<Vec<f64>> {
        (0..self.dim())
            .map(|x| self.pair_extreme(design, slack, x, opts).map(|w| w.gap.max(0.0)))
            .collect()
    }

    /// `sup ‖f - g‖_∞` over `f, g ∈ F` agreeing on `design`.
    pub fn pair_diameter(&self, design: &SampleDesign, opts: LpOptions) -> Result<f64> {
        Ok(self.pair_profile(design, None, opts)?.into_iter().fold(0.0, f64::max))
    }
}

fn unit(m: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; m];
    e[i] = 1.0;
    e
}

fn best_vertex(vertices: &[Vec<f64>], w: &[f64]) -> Support {
    let mut best = (f64::NEG_INFINITY, 0usize);
    for (k, v) in vertices.iter().enumerate() {
        let val = dot(v, w);
        if val > best.0 {
            best = (val, k);
        }
    }
    Support { value: best.0, maximizer: vertices[best.1].clone() }
}

fn ellipsoid_pair(e: &Ellipsoid, design: &SampleDesign, slack: Option<&[f64]>, coord: usize) -> PairWitness {
    let slice = e.slice(design, None);
    let a = e.row(coord);
    let null_part = Ellipsoid::null_projection(&slice, &a);
    let (in_row, in_null) = Ellipsoid::split_norms(&slice, &a);
    let half_slack = slack.map_or(0.0, |s| s.iter().map(|x| x * x).sum::<f64>().sqrt() / 2.0);
    // w = (u - v)/2 with ‖w‖ <= 1 and ‖row-space part‖ <= half_slack / σ_min
    let t = if half_slack == 0.0 { 0.0 } else { (half_slack / slice.smallest_sv).min(1.0) };
    let total = a.norm();
    let best = if total == 0.0 {
        0.0
    } else if t >= in_row / total {
        total
    } else {
        t * in_row + (1.0 - t * t).sqrt() * in_null
    };
    let w = if in_null > 0.0 { null_part / in_null } else { DVector::zeros(a.len()) };
    let f = &e.center + &e.map * &w;
    let g = &e.center - &e.map * &w;
    PairWitness {
        coord,
        gap: 2.0 * best,
        f: f.iter().copied().collect(),
        g: g.iter().copied().collect(),
    }
}

enum LinearBody<'a> {
    V(std::borrow::Cow<'a, VPolytope>),
    H(&'a HPolytope),
}

impl LinearBody<'_> {
    fn embed(&self, lp: &mut LpBuilder, pins: &[Option<LinExpr>]) -> Vec<LinExpr> {
        match self {
            LinearBody::V(v) => v.embed(lp, pins),
            LinearBody::H(h) => h.embed(lp, pins),
        }
    }
}

/// `F_y = { f ∈ F : f(x_k) = y_k }` with its emptiness decided once.
#[derive(Debug)]
pub struct FeasibleSection<'a> {
    class: &'a FunctionClass,
    design: &'a SampleDesign,
    values: Vec<f64>,
    opts: LpOptions,
    nonempty: OnceLock<Result<bool>>,
}

impl<'a> FeasibleSection<'a> {
    pub fn new(class: &'a FunctionClass, design: &'a SampleDesign, values: Vec<f64>, opts: LpOptions) -> Result<Self> {
        if values.len() != design.len() {
            return Err(Error::Dimension(format!("{} samples for a design of size {}", values.len(), design.len())));
        }
        if design.indices().iter().any(|&i| i >= class.dim()) {
            return Err(Error::Dimension("design index exceeds class dimension".into()));
        }
        class.require_convex("section")?;
        Ok(Self { class, design, values, opts: class.effective_options(opts), nonempty: OnceLock::new() })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn pins(&self) -> Vec<Option<LinExpr>> {
        let mut pins = vec![None; self.class.dim()];
        for (&i, &y) in self.design.indices().iter().zip(&self.values) {
            pins[i] = Some(LinExpr::constant(y));
        }
        pins
    }

    pub fn is_nonempty(&self) -> Result<bool> {
        self.nonempty
            .get_or_init(|| match &self.class.body {
                Body::Ellipsoid(e) => {
                    let s = e.slice(self.design, Some(&self.values));
                    Ok(s.consistent && s.u0.norm() <= 1.0 + 1e-9)
                }
                _ => {
                    let body = self.class.linear_body()?;
                    let mut lp = LpBuilder::new();
                    body.embed(&mut lp, &self.pins());
                    Ok(lp.feasible_point(self.opts)?.is_some())
                }
            })
            .clone()
    }

    /// `(min, max)` of `f_coord` over the section, or `None` when it is empty.
    pub fn extrema(&self, coord: usize) -> Result<Option<(f64, f64)>> {
        if coord >= self.class.dim() {
            return Err(Error::Dimension(format!("coordinate {coord} out of range")));
        }
        if !self.is_nonempty()? {
            return Ok(None);
        }
        if let Some(pos) = self.design.indices().iter().position(|&i| i == coord) {
            return Ok(Some((self.values[pos], self.values[pos])));
        }
        match &self.class.body {
            Body::Ellipsoid(e) => {
                let s = e.slice(self.design, Some(&self.values));
                let a = e.row(coord);
                let mid = e.center[coord] + a.dot(&s.u0);
                let (_, in_null) = Ellipsoid::split_norms(&s, &a);
                let half = in_null * (1.0 - s.u0.norm_squared()).max(0.0).sqrt();
                Ok(Some((mid - half, mid + half)))
            }
            _ => {
                let body = self.class.linear_body()?;
                let mut lp = LpBuilder::new();
                let vals = body.embed(&mut lp, &self.pins());
                let solve = |s: LpStatus| -> Result<Option<f64>> {
                    match s {
                        LpStatus::Optimal(sol) => Ok(Some(sol.value)),
                        // the float feasibility check may disagree at the margin
                        LpStatus::Infeasible => Ok(None),
                        LpStatus::Unbounded => Err(Error::Unbounded("section is unbounded".into())),
                    }
                };
                let hi = solve(lp.maximize(&vals[coord], self.opts)?)?;
                let lo = solve(lp.minimize(&vals[coord], self.opts)?)?;
                match (lo, hi) {
                    (Some(lo), Some(hi)) => Ok(Some((lo.min(hi), hi.max(lo)))),
                    _ => Ok(None),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cube2() -> FunctionClass {
        FunctionClass::vpolytope(
            vec![vec![1.0, 1.0], vec![1.0, -1.0], vec![-1.0, 1.0], vec![-1.0, -1.0]],
            true,
        )
        .unwrap()
    }

    fn l1_ball(m: usize) -> FunctionClass {
        let mut v = Vec::new();
        for i in 0..m {
            v.push(unit(m, i));
            v.push(unit(m, i).iter().map(|x| -x).collect());
        }
        FunctionClass::vpolytope(v, true).unwrap()
    }

    fn segment_diag() -> FunctionClass {
        FunctionClass::vpolytope(vec![vec![-1.0, -1.0], vec![1.0, 1.0]], true).unwrap()
    }

    fn simplex2() -> FunctionClass {
        FunctionClass::vpolytope(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]], false).unwrap()
    }

    fn d(ix: &[usize], m: usize) -> SampleDesign {
        SampleDesign::new(ix.to_vec(), m).unwrap()
    }

    #[test]
    fn sup_norm_examples() {
        assert_eq!(sup_norm(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(sup_norm(&[-2.0, 1.0]).unwrap(), 2.0);
        assert_eq!(sup_norm(&[0.3, -0.7, 0.7]).unwrap(), 0.7);
        assert!(matches!(sup_norm(&[]), Err(Error::Dimension(_))));
    }

    #[test]
    fn support_examples() {
        let opts = LpOptions::default();
        let s = cube2().support(&[1.0, 0.0], opts).unwrap();
        assert_eq!(s.value, 1.0);
        assert_eq!(s.maximizer[0], 1.0);
        assert_eq!(l1_ball(2).support(&[1.0, 1.0], opts).unwrap().value, 1.0);
        let e = FunctionClass::ellipsoid(vec![0.0, 0.0], DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 2.0])))
            .unwrap();
        assert_abs_diff_eq!(e.support(&[1.0, 0.0], opts).unwrap().value, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn h_polytope_support_and_unboundedness() {
        // cube as an H-polytope
        let rows = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
        let cube = FunctionClass::hpolytope(2, 0, rows, vec![1.0; 4], true).unwrap();
        let s = cube.support(&[1.0, 2.0], LpOptions::default()).unwrap();
        assert_abs_diff_eq!(s.value, 3.0, epsilon = 1e-9);
        let half = FunctionClass::hpolytope(2, 0, vec![vec![1.0, 0.0]], vec![1.0], false).unwrap();
        assert!(matches!(half.verify_bounded(), Err(Error::Unbounded(_))));
    }

    #[test]
    fn membership_examples() {
        assert!(cube2().member(&[1.0, 1.0], 0.0).unwrap());
        assert!(!l1_ball(2).member(&[0.6, 0.6], 1e-9).unwrap());
        let pb = FunctionClass::pball(DMatrix::identity(2, 2), 0.5).unwrap();
        // (0.25^{1/2} + 0.25^{1/2})^2 = 1: boundary point
        assert!(pb.member(&[0.25, 0.25], 1e-12).unwrap());
        assert!(!pb.member(&[0.5, 0.5], 1e-9).unwrap());
        assert!(pb.member(&[1.0, 0.0], 0.0).unwrap());
        assert!(cube2().member(&[1.0, 1.0], -1.0).is_err());
    }

    #[test]
    fn section_examples() {
        let opts = LpOptions::default();
        let l1 = l1_ball(2);
        let d0 = d(&[0], 2);
        let s = FeasibleSection::new(&l1, &d0, vec![0.5], opts).unwrap();
        let (lo, hi) = s.extrema(1).unwrap().unwrap();
        assert_abs_diff_eq!(lo, -0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(hi, 0.5, epsilon = 1e-9);

        let cube = cube2();
        let d01 = d(&[0, 1], 2);
        let s = FeasibleSection::new(&cube, &d01, vec![0.3, -0.2], opts).unwrap();
        let (lo, hi) = s.extrema(0).unwrap().unwrap();
        assert_abs_diff_eq!(lo, 0.3, epsilon = 1e-9);
        assert_abs_diff_eq!(hi, 0.3, epsilon = 1e-9);

        let simplex = simplex2();
        let s = FeasibleSection::new(&simplex, &d0, vec![0.0], opts).unwrap();
        let (lo, hi) = s.extrema(1).unwrap().unwrap();
        assert_abs_diff_eq!(lo, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(hi, 1.0, epsilon = 1e-9);

        let s = FeasibleSection::new(&cube, &d0, vec![5.0], opts).unwrap();
        assert_eq!(s.extrema(1).unwrap(), None);
    }

    #[test]
    fn pair_diameter_examples() {
        let opts = LpOptions::default();
        assert_abs_diff_eq!(segment_diag().pair_diameter(&d(&[0], 2), opts).unwrap(), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(l1_ball(2).pair_diameter(&d(&[0], 2), opts).unwrap(), 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(cube2().pair_diameter(&SampleDesign::empty(), opts).unwrap(), 2.0, epsilon = 1e-9);
        let pb = FunctionClass::pball(DMatrix::identity(2, 2), 0.5).unwrap();
        assert!(matches!(pb.pair_diameter(&SampleDesign::empty(), opts), Err(Error::Unsupported(_))));
    }

    #[test]
    fn symmetric_reduction_matches_general_pair_lp() {
        let opts = LpOptions::default();
        let mut asym = l1_ball(3);
        asym.symmetric = false;
        let sym = l1_ball(3);
        for design in [vec![], vec![0], vec![1, 2]] {
            let ds = d(&design, 3);
            let a = asym.pair_profile(&ds, None, opts).unwrap();
            let b = sym.pair_profile(&ds, None, opts).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn exact_mode_agrees_with_float() {
        let class = simplex2();
        let design = d(&[1], 2);
        let a = class.pair_diameter(&design, LpOptions::default()).unwrap();
        let b = class.pair_diameter(&design, LpOptions::exact()).unwrap();
        assert_abs_diff_eq!(a, 1.0, epsilon = 1e-9);
        assert_eq!(b, 1.0);
    }

    #[test]
    fn ellipsoid_section_and_pair_closed_forms() {
        let opts = LpOptions::default();
        let e = FunctionClass::ellipsoid(vec![0.0, 0.0], DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 2.0])))
            .unwrap();
        // f = (3 u0, 2 u1), pin f0 = 1.5 -> u0 = 0.5, u1 ∈ ±sqrt(0.75)
        let d0 = d(&[0], 2);
        let s = FeasibleSection::new(&e, &d0, vec![1.5], opts).unwrap();
        let (lo, hi) = s.extrema(1).unwrap().unwrap();
        assert_abs_diff_eq!(hi, 2.0 * 0.75f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(lo, -hi, epsilon = 1e-12);
        assert_abs_diff_eq!(e.pair_diameter(&d0, opts).unwrap(), 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.pair_diameter(&SampleDesign::empty(), opts).unwrap(), 6.0, epsilon = 1e-12);
        // slack bound is an upper bound that relaxes to the full diameter
        let relaxed = e.pair_extreme(&d0, Some(&[100.0]), 0, opts).unwrap().gap;
        assert_abs_diff_eq!(relaxed, 6.0, epsilon = 1e-12);
        let s = FeasibleSection::new(&e, &d0, vec![3.5], opts).unwrap();
        assert!(!s.is_nonempty().unwrap());
    }

    #[test]
    fn h_polytope_with_aux_membership() {
        // ℓ1 ball in ℝ² via |f_i| <= a_i, a_0 + a_1 <= 1
        let rows = vec![
            vec![1.0, 0.0, -1.0, 0.0],
            vec![-1.0, 0.0, -1.0, 0.0],
            vec![0.0, 1.0, 0.0, -1.0],
            vec![0.0, -1.0, 0.0, -1.0],
            vec![0.0, 0.0, 1.0, 1.0],
        ];
        let c = FunctionClass::hpolytope(2, 2, rows, vec![0.0, 0.0, 0.0, 0.0, 1.0], true).unwrap();
        assert!(c.member(&[0.5, -0.5], 1e-9).unwrap());
        assert!(!c.member(&[0.6, 0.6], 1e-9).unwrap());
        assert_abs_diff_eq!(c.pair_diameter(&d(&[0], 2), LpOptions::default()).unwrap(), 2.0, epsilon = 1e-9);
    }
}
