//! Linear programming backbone.
//!
//! Problems are assembled with [`LpBuilder`] in `f64` and solved either in
//! floating point or, on request, in exact rational arithmetic. Each solve owns
//! its tableau, so concurrent solves never share state.

mod scalar;
mod simplex;

use num_rational::BigRational;

pub use scalar::{ratio, LpScalar};
use simplex::{DenseRow, RawOutcome, Tolerances};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Free,
    NonNeg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// Sparse affine expression `constant + Σ coeff·var`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinExpr {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl LinExpr {
    pub fn var(v: usize) -> Self {
        Self { terms: vec![(v, 1.0)], constant: 0.0 }
    }

    pub fn constant(c: f64) -> Self {
        Self { terms: Vec::new(), constant: c }
    }

    pub fn add_scaled(&mut self, other: &LinExpr, s: f64) {
        if s == 0.0 {
            return;
        }
        for (v, c) in &other.terms {
            self.terms.push((*v, c * s));
        }
        self.constant += other.constant * s;
    }

    pub fn scaled(&self, s: f64) -> LinExpr {
        let mut out = LinExpr::default();
        out.add_scaled(self, s);
        out
    }

    /// `self - other`
    pub fn minus(&self, other: &LinExpr) -> LinExpr {
        let mut out = self.clone();
        out.add_scaled(other, -1.0);
        out
    }

    /// Merges duplicate variables and drops zero coefficients.
    pub fn compact(mut self) -> Self {
        self.terms.sort_by_key(|(v, _)| *v);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(self.terms.len());
        for (v, c) in self.terms {
            match merged.last_mut() {
                Some((lv, lc)) if *lv == v => *lc += c,
                _ => merged.push((v, c)),
            }
        }
        merged.retain(|(_, c)| *c != 0.0);
        self.terms = merged;
        self
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|(v, c)| c * x[*v]).sum::<f64>()
    }
}

/// Arithmetic used for a solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpOptions {
    /// Feasibility and optimality tolerance for floating-point solves.
    pub tol: f64,
    /// Solve in exact rational arithmetic (inputs are converted exactly).
    pub exact: bool,
}

impl Default for LpOptions {
    fn default() -> Self {
        Self { tol: 1e-9, exact: false }
    }
}

impl LpOptions {
    pub fn exact() -> Self {
        Self { tol: 0.0, exact: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpStatus {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Default)]
pub struct LpBuilder {
    kinds: Vec<VarKind>,
    rows: Vec<(LinExpr, Relation, f64)>,
}

impl LpBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, kind: VarKind) -> usize {
        self.kinds.push(kind);
        self.kinds.len() - 1
    }

    pub fn add_vars(&mut self, count: usize, kind: VarKind) -> Vec<usize> {
        (0..count).map(|_| self.add_var(kind)).collect()
    }

    pub fn num_vars(&self) -> usize {
        self.kinds.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Adds `expr rel rhs`; the expression's constant is moved to the right.
    pub fn constrain(&mut self, expr: LinExpr, rel: Relation, rhs: f64) {
        let expr = expr.compact();
        let rhs = rhs - expr.constant;
        if expr.terms.is_empty() {
            // constant row; keep it so infeasibility is still detected
            self.rows.push((LinExpr::default(), rel, rhs));
            return;
        }
        self.rows.push((LinExpr { terms: expr.terms, constant: 0.0 }, rel, rhs));
    }

    /// Maximizes `objective` (its constant is added to the reported value).
    pub fn maximize(&self, objective: &LinExpr, opts: LpOptions) -> Result<LpStatus> {
        for (expr, _, rhs) in &self.rows {
            if !rhs.is_finite() || expr.terms.iter().any(|(_, c)| !c.is_finite()) {
                return Err(Error::Dimension("non-finite LP coefficient".into()));
            }
        }
        let obj = objective.clone().compact();
        if opts.exact {
            self.run::<BigRational>(&obj, Tolerances {
                cost: <BigRational as LpScalar>::zero(),
                pivot: <BigRational as LpScalar>::zero(),
                feas: <BigRational as LpScalar>::zero(),
            })
        } else {
            let scale = self
                .rows
                .iter()
                .map(|(_, _, b)| b.abs())
                .fold(1.0f64, f64::max);
            self.run::<f64>(&obj, Tolerances {
                cost: opts.tol,
                pivot: opts.tol.min(1e-9),
                feas: opts.tol * scale,
            })
        }
    }

    pub fn minimize(&self, objective: &LinExpr, opts: LpOptions) -> Result<LpStatus> {
        Ok(match self.maximize(&objective.scaled(-1.0), opts)? {
            LpStatus::Optimal(s) => LpStatus::Optimal(LpSolution { value: -s.value, x: s.x }),
            other => other,
        })
    }

    /// Feasibility check: `Some(point)` if the constraints admit a solution.
    pub fn feasible_point(&self, opts: LpOptions) -> Result<Option<Vec<f64>>> {
        match self.maximize(&LinExpr::default(), opts)? {
            LpStatus::Optimal(s) => Ok(Some(s.x)),
            LpStatus::Infeasible => Ok(None),
            LpStatus::Unbounded => Err(Error::Solver("zero objective reported unbounded".into())),
        }
    }

    fn run<T: LpScalar>(&self, obj: &LinExpr, tol: Tolerances<T>) -> Result<LpStatus> {
        let rows: Vec<DenseRow<T>> = self
            .rows
            .iter()
            .map(|(e, rel, rhs)| DenseRow {
                coeffs: e.terms.iter().map(|(v, c)| (*v, T::from_f64(*c))).collect(),
                rel: *rel,
                rhs: T::from_f64(*rhs),
            })
            .collect();
        let objective: Vec<(usize, T)> = obj.terms.iter().map(|(v, c)| (*v, T::from_f64(*c))).collect();
        match simplex::solve(&self.kinds, &objective, &rows, &tol) {
            RawOutcome::Optimal { value, x } => Ok(LpStatus::Optimal(LpSolution {
                value: value.to_f64() + obj.constant,
                x: x.iter().map(LpScalar::to_f64).collect(),
            })),
            RawOutcome::Infeasible => Ok(LpStatus::Infeasible),
            RawOutcome::Unbounded => Ok(LpStatus::Unbounded),
            RawOutcome::IterationLimit => Err(Error::Solver("simplex iteration limit reached".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn opt(status: LpStatus) -> LpSolution {
        match status {
            LpStatus::Optimal(s) => s,
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
        let mut lp = LpBuilder::new();
        let x = lp.add_var(VarKind::NonNeg);
        let y = lp.add_var(VarKind::NonNeg);
        lp.constrain(LinExpr::var(x), Relation::Le, 4.0);
        lp.constrain(LinExpr::var(y).scaled(2.0), Relation::Le, 12.0);
        let mut e = LinExpr::var(x).scaled(3.0);
        e.add_scaled(&LinExpr::var(y), 2.0);
        lp.constrain(e, Relation::Le, 18.0);
        let mut obj = LinExpr::var(x).scaled(3.0);
        obj.add_scaled(&LinExpr::var(y), 5.0);
        for opts in [LpOptions::default(), LpOptions::exact()] {
            let s = opt(lp.maximize(&obj, opts).unwrap());
            assert_abs_diff_eq!(s.value, 36.0, epsilon = 1e-9);
            assert_abs_diff_eq!(s.x[0], 2.0, epsilon = 1e-9);
            assert_abs_diff_eq!(s.x[1], 6.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn free_variables_and_equalities() {
        // min x + y s.t. x - y = -3, x >= -5 (free vars) -> x=-5, y=-2, value -7
        let mut lp = LpBuilder::new();
        let x = lp.add_var(VarKind::Free);
        let y = lp.add_var(VarKind::Free);
        lp.constrain(LinExpr::var(x).minus(&LinExpr::var(y)), Relation::Eq, -3.0);
        lp.constrain(LinExpr::var(x), Relation::Ge, -5.0);
        let mut obj = LinExpr::var(x);
        obj.add_scaled(&LinExpr::var(y), 1.0);
        let s = opt(lp.minimize(&obj, LpOptions::default()).unwrap());
        assert_abs_diff_eq!(s.value, -7.0, epsilon = 1e-9);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LpBuilder::new();
        let x = lp.add_var(VarKind::NonNeg);
        lp.constrain(LinExpr::var(x), Relation::Le, 1.0);
        lp.constrain(LinExpr::var(x), Relation::Ge, 2.0);
        assert_eq!(lp.maximize(&LinExpr::var(x), LpOptions::default()).unwrap(), LpStatus::Infeasible);
        assert_eq!(lp.maximize(&LinExpr::var(x), LpOptions::exact()).unwrap(), LpStatus::Infeasible);

        let mut lp = LpBuilder::new();
        let x = lp.add_var(VarKind::Free);
        lp.constrain(LinExpr::var(x), Relation::Ge, 0.0);
        assert_eq!(lp.maximize(&LinExpr::var(x), LpOptions::default()).unwrap(), LpStatus::Unbounded);
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let mut lp = LpBuilder::new();
        let x = lp.add_vars(2, VarKind::NonNeg);
        let mut sum = LinExpr::var(x[0]);
        sum.add_scaled(&LinExpr::var(x[1]), 1.0);
        lp.constrain(sum.clone(), Relation::Eq, 1.0);
        lp.constrain(sum.scaled(2.0), Relation::Eq, 2.0);
        let s = opt(lp.maximize(&LinExpr::var(x[1]), LpOptions::default()).unwrap());
        assert_abs_diff_eq!(s.value, 1.0, epsilon = 1e-12);
        let s = opt(lp.maximize(&LinExpr::var(x[1]), LpOptions::exact()).unwrap());
        assert_eq!(s.value, 1.0);
    }

    #[test]
    fn exact_mode_is_exact_on_thirds() {
        // max x s.t. 3x <= 1 -> exactly 1/3 in rationals
        let mut lp = LpBuilder::new();
        let x = lp.add_var(VarKind::NonNeg);
        lp.constrain(LinExpr::var(x).scaled(3.0), Relation::Le, 1.0);
        let s = opt(lp.maximize(&LinExpr::var(x), LpOptions::exact()).unwrap());
        assert_eq!(s.value, 1.0 / 3.0);
        assert_eq!(<BigRational as LpScalar>::from_f64(0.5), ratio(1, 2));
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Klee-Minty-like degenerate stack at the origin
        let mut lp = LpBuilder::new();
        let x = lp.add_vars(4, VarKind::NonNeg);
        for i in 0..4 {
            let mut e = LinExpr::default();
            for (j, v) in x.iter().enumerate() {
                e.add_scaled(&LinExpr::var(*v), if i == j { 1.0 } else { -0.5 });
            }
            lp.constrain(e, Relation::Le, 0.0);
        }
        let mut total = LinExpr::default();
        for v in &x {
            total.add_scaled(&LinExpr::var(*v), 1.0);
        }
        lp.constrain(total.clone(), Relation::Le, 1.0);
        let s = opt(lp.maximize(&total, LpOptions::default()).unwrap());
        assert!(s.value <= 1.0 + 1e-9);
    }
}
