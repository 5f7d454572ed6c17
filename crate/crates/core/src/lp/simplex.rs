//! Dense two-phase tableau simplex, generic over the scalar type.
//!
//! Pricing is Dantzig's rule until a run of degenerate pivots is observed,
//! after which Bland's rule takes over so the method cannot cycle.

use super::scalar::LpScalar;
use super::{Relation, VarKind};

#[derive(Debug, Clone)]
pub(crate) struct Tolerances<T> {
    /// Reduced costs above this are improving.
    pub cost: T,
    /// Smallest admissible pivot magnitude.
    pub pivot: T,
    /// Phase-one residual accepted as feasible.
    pub feas: T,
}

#[derive(Debug, Clone)]
pub(crate) struct DenseRow<T> {
    pub coeffs: Vec<(usize, T)>,
    pub rel: Relation,
    pub rhs: T,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum RawOutcome<T> {
    Optimal { value: T, x: Vec<T> },
    Infeasible,
    Unbounded,
    IterationLimit,
}

struct Tableau<T> {
    rows: usize,
    cols: usize,
    /// row-major, `cols + 1` entries per row, last one is the rhs
    data: Vec<T>,
    /// reduced costs, last entry is minus the objective value
    obj: Vec<T>,
    basis: Vec<usize>,
    banned: Vec<bool>,
}

impl<T: LpScalar> Tableau<T> {
    #[inline]
    fn at(&self, r: usize, c: usize) -> &T {
        &self.data[r * (self.cols + 1) + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> &T {
        &self.data[r * (self.cols + 1) + self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.cols + 1;
        let piv = self.at(r, c).clone();
        let start = r * w;
        for j in 0..w {
            let v = self.data[start + j].clone();
            if !v.is_zero() {
                self.data[start + j] = (v / piv.clone()).snap();
            }
        }
        let pivot_row: Vec<(usize, T)> = (0..w)
            .filter_map(|j| {
                let v = &self.data[start + j];
                (!v.is_zero()).then(|| (j, v.clone()))
            })
            .collect();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.data[i * w + c].clone();
            if f.is_zero() {
                continue;
            }
            let base = i * w;
            for (j, v) in &pivot_row {
                let cur = self.data[base + j].clone();
                self.data[base + j] = (cur - f.clone() * v.clone()).snap();
            }
            self.data[base + c] = T::zero();
        }
        let f = self.obj[c].clone();
        if !f.is_zero() {
            for (j, v) in &pivot_row {
                let cur = self.obj[*j].clone();
                self.obj[*j] = (cur - f.clone() * v.clone()).snap();
            }
            self.obj[c] = T::zero();
        }
        self.basis[r] = c;
    }

    /// Recompute reduced costs for `costs` from scratch against the current basis.
    fn price(&mut self, costs: &[T]) {
        let w = self.cols + 1;
        let mut obj: Vec<T> = costs.iter().cloned().chain(std::iter::once(T::zero())).collect();
        for r in 0..self.rows {
            let cb = costs[self.basis[r]].clone();
            if cb.is_zero() {
                continue;
            }
            for j in 0..w {
                let a = &self.data[r * w + j];
                if !a.is_zero() {
                    obj[j] = obj[j].clone() - cb.clone() * a.clone();
                }
            }
        }
        self.obj = obj;
    }

    /// Runs simplex iterations on the current objective row. Returns false on
    /// unboundedness.
    fn optimize(&mut self, tol: &Tolerances<T>, max_iter: usize) -> Result<bool, ()> {
        let mut degenerate_run = 0usize;
        for _ in 0..max_iter {
            let bland = degenerate_run > 50;
            let mut enter: Option<usize> = None;
            let mut best = tol.cost.clone();
            for j in 0..self.cols {
                if self.banned[j] {
                    continue;
                }
                let rc = &self.obj[j];
                if *rc > tol.cost {
                    if bland {
                        enter = Some(j);
                        break;
                    }
                    if *rc > best {
                        best = rc.clone();
                        enter = Some(j);
                    }
                }
            }
            let Some(c) = enter else {
                return Ok(true);
            };
            let mut leave: Option<(usize, T)> = None;
            for r in 0..self.rows {
                let a = self.at(r, c);
                if *a > tol.pivot {
                    let b = self.rhs(r).clone();
                    let b = if b < T::zero() { T::zero() } else { b };
                    let ratio = b / a.clone();
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio {
                                Some((r, ratio))
                            } else if ratio == lratio || (ratio.clone() - lratio.clone()).abs() < tol.pivot {
                                let better = if bland {
                                    self.basis[r] < self.basis[lr]
                                } else {
                                    *a > *self.at(lr, c)
                                };
                                if better {
                                    Some((r, ratio))
                                } else {
                                    Some((lr, lratio))
                                }
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            let Some((r, ratio)) = leave else {
                return Ok(false);
            };
            if ratio.is_zero() || ratio < tol.pivot {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, c);
        }
        Err(())
    }
}

/// Maximizes `objective · x` subject to `rows` with per-variable sign kinds.
pub(crate) fn solve<T: LpScalar>(
    kinds: &[VarKind],
    objective: &[(usize, T)],
    rows: &[DenseRow<T>],
    tol: &Tolerances<T>,
) -> RawOutcome<T> {
    // column layout: structural (free vars split), slacks/surpluses, artificials
    let mut pos_col = Vec::with_capacity(kinds.len());
    let mut neg_col = Vec::with_capacity(kinds.len());
    let mut ncols = 0usize;
    for k in kinds {
        pos_col.push(ncols);
        ncols += 1;
        match k {
            VarKind::Free => {
                neg_col.push(Some(ncols));
                ncols += 1;
            }
            VarKind::NonNeg => neg_col.push(None),
        }
    }
    let n_struct = ncols;

    // normalize rows to nonnegative rhs
    struct Norm<T> {
        coeffs: Vec<(usize, T)>,
        rel: Relation,
        rhs: T,
    }
    let normed: Vec<Norm<T>> = rows
        .iter()
        .map(|row| {
            let flip = row.rhs < T::zero();
            let mut coeffs = Vec::with_capacity(row.coeffs.len() * 2);
            for (v, a) in &row.coeffs {
                let a = if flip { -a.clone() } else { a.clone() };
                coeffs.push((pos_col[*v], a.clone()));
                if let Some(nc) = neg_col[*v] {
                    coeffs.push((nc, -a));
                }
            }
            let rel = match (flip, row.rel) {
                (false, r) => r,
                (true, Relation::Le) => Relation::Ge,
                (true, Relation::Ge) => Relation::Le,
                (true, Relation::Eq) => Relation::Eq,
            };
            let rhs = if flip { -row.rhs.clone() } else { row.rhs.clone() };
            Norm { coeffs, rel, rhs }
        })
        .collect();

    let n_slack = normed.iter().filter(|r| r.rel != Relation::Eq).count();
    let n_art = normed.iter().filter(|r| r.rel != Relation::Le).count();
    let slack_start = n_struct;
    let art_start = slack_start + n_slack;
    let cols = art_start + n_art;
    let m = normed.len();
    let w = cols + 1;

    let mut data = vec![T::zero(); m * w];
    let mut basis = vec![0usize; m];
    let mut s = slack_start;
    let mut a = art_start;
    for (r, row) in normed.iter().enumerate() {
        for (c, v) in &row.coeffs {
            let cur = data[r * w + c].clone();
            data[r * w + c] = cur + v.clone();
        }
        data[r * w + cols] = row.rhs.clone();
        match row.rel {
            Relation::Le => {
                data[r * w + s] = T::one();
                basis[r] = s;
                s += 1;
            }
            Relation::Ge => {
                data[r * w + s] = -T::one();
                s += 1;
                data[r * w + a] = T::one();
                basis[r] = a;
                a += 1;
            }
            Relation::Eq => {
                data[r * w + a] = T::one();
                basis[r] = a;
                a += 1;
            }
        }
    }

    let mut tab = Tableau {
        rows: m,
        cols,
        data,
        obj: Vec::new(),
        basis,
        banned: vec![false; cols],
    };
    let max_iter = 50 * (m + cols) + 1000;

    if n_art > 0 {
        let mut costs = vec![T::zero(); cols];
        for c in costs.iter_mut().skip(art_start) {
            *c = -T::one();
        }
        tab.price(&costs);
        match tab.optimize(tol, max_iter) {
            Ok(true) => {}
            Ok(false) => return RawOutcome::IterationLimit,
            Err(()) => return RawOutcome::IterationLimit,
        }
        // objective value is -obj[cols]; phase one maximizes -sum(art)
        let phase1 = tab.obj[cols].clone();
        if phase1 > tol.feas {
            return RawOutcome::Infeasible;
        }
        // drive artificials out of the basis; drop rows that are redundant
        let mut r = 0;
        while r < tab.rows {
            if tab.basis[r] >= art_start {
                let mut best: Option<(usize, T)> = None;
                for j in 0..art_start {
                    let v = tab.at(r, j).abs();
                    if v > tol.pivot && best.as_ref().is_none_or(|(_, bv)| v > *bv) {
                        best = Some((j, v));
                    }
                }
                match best {
                    Some((j, _)) => tab.pivot(r, j),
                    None => {
                        let w = tab.cols + 1;
                        tab.data.drain(r * w..(r + 1) * w);
                        tab.basis.remove(r);
                        tab.rows -= 1;
                        continue;
                    }
                }
            }
            r += 1;
        }
        for j in art_start..cols {
            tab.banned[j] = true;
        }
    }

    let mut costs = vec![T::zero(); cols];
    for (v, c) in objective {
        costs[pos_col[*v]] = costs[pos_col[*v]].clone() + c.clone();
        if let Some(nc) = neg_col[*v] {
            costs[nc] = costs[nc].clone() - c.clone();
        }
    }
    tab.price(&costs);
    match tab.optimize(tol, max_iter) {
        Ok(true) => {}
        Ok(false) => return RawOutcome::Unbounded,
        Err(()) => return RawOutcome::IterationLimit,
    }

    let mut colval = vec![T::zero(); cols];
    for r in 0..tab.rows {
        colval[tab.basis[r]] = tab.rhs(r).clone();
    }
    let x: Vec<T> = (0..kinds.len())
        .map(|v| {
            let p = colval[pos_col[v]].clone();
            match neg_col[v] {
                Some(nc) => p - colval[nc].clone(),
                None => p,
            }
        })
        .collect();
    let value = -tab.obj[cols].clone();
    RawOutcome::Optimal { value, x }
}
