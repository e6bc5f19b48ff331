//! A dense two-phase tableau simplex solver for small linear programs.
//!
//! All decision variables are free reals; each is split into a difference of
//! two non-negative columns internally. Pivoting is Dantzig's rule, falling
//! back to Bland's rule permanently once the objective stalls, which rules
//! out cycling. Phase one is skipped when every canonicalized row takes a
//! slack, which callers arrange deliberately where they can.

use crate::error::Error;
use crate::Result;

/// Reduced-cost optimality tolerance.
const REDCOST_TOL: f64 = 1e-9;
/// Smallest magnitude accepted as a pivot element on a fresh tableau.
const PIVOT_TOL: f64 = 1e-11;
/// Smallest pivot accepted between refreshes, above the elimination noise
/// that accumulates in a stale tableau.
const STALE_PIVOT_TOL: f64 = 1e-7;
/// Residual infeasibility allowed after phase one.
const FEAS_TOL: f64 = 1e-8;
/// Iterations without objective improvement before switching to Bland's rule.
const STALL_LIMIT: usize = 50;
/// Pivots between rebuilds of the tableau from the pristine rows.
const REFRESH_INTERVAL: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub kind: ConstraintKind,
    pub rhs: f64,
}

/// `maximize objective . x` over free `x` subject to the constraints.
#[derive(Debug, Clone)]
pub struct Lp {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub values: Vec<f64>,
    pub objective: f64,
}

struct Tableau {
    width: usize,
    rows: Vec<Vec<f64>>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    enter_limit: usize,
    /// Pristine constraint rows, kept for refactorization.
    orig: Vec<Vec<f64>>,
    /// Cost vector of the current phase, zero in the rhs slot.
    cost: Vec<f64>,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.rows[row][col];
        let inv = 1.0 / piv;
        for v in self.rows[row].iter_mut() {
            *v *= inv;
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let factor = r[col];
            if factor != 0.0 {
                for (v, &p) in r.iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
            }
        }
        let factor = self.obj[col];
        if factor != 0.0 {
            for (v, &p) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= factor * p;
            }
        }
        self.basis[row] = col;
    }

    fn improving_columns(&self, bland: bool) -> Vec<usize> {
        let mut basic = vec![false; self.width];
        for &b in &self.basis {
            basic[b] = true;
        }
        let mut cols: Vec<usize> = (0..self.enter_limit)
            .filter(|&j| !basic[j] && self.obj[j] < -REDCOST_TOL)
            .collect();
        if !bland {
            cols.sort_by(|&a, &b| self.obj[a].partial_cmp(&self.obj[b]).unwrap());
        }
        cols
    }

    /// Installs a phase cost vector and recomputes the reduced-cost row
    /// from it for the current basis.
    fn set_cost(&mut self, cost: Vec<f64>) {
        self.cost = cost;
        self.reduce_obj();
    }

    fn reduce_obj(&mut self) {
        self.obj = self.cost.clone();
        for i in 0..self.rows.len() {
            let cb = self.cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.rows[i];
                for (o, &r) in self.obj.iter_mut().zip(row) {
                    *o -= cb * r;
                }
            }
        }
    }

    /// Rebuilds the tableau for the current basis from the pristine rows,
    /// discarding accumulated elimination error.
    fn refactor(&mut self) -> Result<()> {
        let m = self.orig.len();
        let mut fresh = self.orig.clone();
        for i in 0..m {
            let col = self.basis[i];
            let mut best = i;
            for r in i + 1..m {
                if fresh[r][col].abs() > fresh[best][col].abs() {
                    best = r;
                }
            }
            if fresh[best][col].abs() < 1e-14 {
                return Err(Error::Solver("singular basis during refactorization".into()));
            }
            fresh.swap(i, best);
            let inv = 1.0 / fresh[i][col];
            for v in fresh[i].iter_mut() {
                *v *= inv;
            }
            let pivot_row = fresh[i].clone();
            for (r, row) in fresh.iter_mut().enumerate() {
                if r == i {
                    continue;
                }
                let factor = row[col];
                if factor != 0.0 {
                    for (v, &p) in row.iter_mut().zip(&pivot_row) {
                        *v -= factor * p;
                    }
                }
            }
        }
        self.rows = fresh;
        self.reduce_obj();
        Ok(())
    }

    fn leaving(&self, col: usize, bland: bool, fresh: bool) -> Option<usize> {
        let tol = if fresh { PIVOT_TOL } else { STALE_PIVOT_TOL };
        let rhs = self.width - 1;
        let mut best: Option<(usize, f64)> = None;
        for (i, r) in self.rows.iter().enumerate() {
            if r[col] <= tol {
                continue;
            }
            let ratio = r[rhs] / r[col];
            match best {
                None => best = Some((i, ratio)),
                Some((bi, br)) => {
                    if ratio < br - 1e-12 {
                        best = Some((i, ratio));
                    } else if bland && ratio < br + 1e-12 && self.basis[i] < self.basis[bi] {
                        best = Some((i, ratio));
                    }
                }
            }
        }
        best.map(|(i, _)| i)
    }

    /// Runs simplex to optimality. Returns false on an unbounded ray.
    fn optimize(&mut self, max_iters: usize) -> Result<bool> {
        let rhs = self.width - 1;
        let mut bland = false;
        let mut stall = 0usize;
        let mut fresh = false;
        let mut since_refresh = 0usize;
        let mut last = self.obj[rhs];
        for _ in 0..max_iters {
            let cols = self.improving_columns(bland);
            if cols.is_empty() {
                // Optimality, like a ray, is only declared on fresh rows.
                if fresh {
                    return Ok(true);
                }
                self.refactor()?;
                fresh = true;
                continue;
            }
            // Cancellation can wipe out a column that still prices as
            // improving, so a ray is only believed when every improving
            // column lacks a leaving row in a freshly refactorized tableau.
            let step = cols
                .iter()
                .find_map(|&col| self.leaving(col, bland, fresh).map(|row| (row, col)));
            let Some((row, col)) = step else {
                if fresh {
                    return Ok(false);
                }
                self.refactor()?;
                fresh = true;
                continue;
            };
            self.pivot(row, col);
            since_refresh += 1;
            if since_refresh >= REFRESH_INTERVAL {
                self.refactor()?;
                since_refresh = 0;
                fresh = true;
            } else {
                fresh = false;
            }
            if (self.obj[rhs] - last).abs() <= 1e-12 {
                stall += 1;
                if stall >= STALL_LIMIT {
                    bland = true;
                }
            } else {
                stall = 0;
                last = self.obj[rhs];
            }
        }
        Err(Error::Solver("iteration limit reached".into()))
    }
}

/// Solves the program, returning variable values and the objective reached.
pub fn solve(lp: &Lp) -> Result<LpSolution> {
    let v = lp.num_vars;
    if lp.objective.len() != v {
        return Err(Error::SizeMismatch {
            expected: v,
            got: lp.objective.len(),
        });
    }
    for c in &lp.constraints {
        if c.coeffs.len() != v {
            return Err(Error::SizeMismatch {
                expected: v,
                got: c.coeffs.len(),
            });
        }
    }
    let m = lp.constraints.len();
    if m == 0 {
        if lp.objective.iter().all(|&c| c == 0.0) {
            return Ok(LpSolution {
                values: vec![0.0; v],
                objective: 0.0,
            });
        }
        return Err(Error::Solver("unbounded: no constraints".into()));
    }

    // Canonical kinds with non-negative right-hand sides.
    let canon: Vec<(ConstraintKind, f64)> = lp
        .constraints
        .iter()
        .map(|c| {
            if c.rhs < 0.0 {
                let kind = match c.kind {
                    ConstraintKind::Le => ConstraintKind::Ge,
                    ConstraintKind::Ge => ConstraintKind::Le,
                    ConstraintKind::Eq => ConstraintKind::Eq,
                };
                (kind, -1.0)
            } else {
                (c.kind, 1.0)
            }
        })
        .collect();

    let n_slack = canon
        .iter()
        .filter(|(k, _)| matches!(k, ConstraintKind::Le | ConstraintKind::Ge))
        .count();
    let n_art = canon
        .iter()
        .filter(|(k, _)| matches!(k, ConstraintKind::Ge | ConstraintKind::Eq))
        .count();
    let ncols = 2 * v + n_slack + n_art;
    let width = ncols + 1;
    let art_start = 2 * v + n_slack;

    let mut rows = vec![vec![0.0; width]; m];
    let mut basis = vec![0usize; m];
    let mut slack_idx = 2 * v;
    let mut art_idx = art_start;
    for (i, c) in lp.constraints.iter().enumerate() {
        let (kind, sign) = canon[i];
        let row = &mut rows[i];
        for (j, &a) in c.coeffs.iter().enumerate() {
            row[j] = sign * a;
            row[v + j] = -sign * a;
        }
        row[ncols] = sign * c.rhs;
        match kind {
            ConstraintKind::Le => {
                row[slack_idx] = 1.0;
                basis[i] = slack_idx;
                slack_idx += 1;
            }
            ConstraintKind::Ge => {
                row[slack_idx] = -1.0;
                slack_idx += 1;
                row[art_idx] = 1.0;
                basis[i] = art_idx;
                art_idx += 1;
            }
            ConstraintKind::Eq => {
                row[art_idx] = 1.0;
                basis[i] = art_idx;
                art_idx += 1;
            }
        }
    }

    let max_iters = 20_000 + 100 * (m + ncols);
    let mut t = Tableau {
        width,
        orig: rows.clone(),
        rows,
        obj: vec![0.0; width],
        basis,
        enter_limit: ncols,
        cost: vec![0.0; width],
    };

    if n_art > 0 {
        // Phase one: minimize the sum of artificials.
        let mut cost = vec![0.0; width];
        for j in art_start..ncols {
            cost[j] = 1.0;
        }
        t.set_cost(cost);
        t.optimize(max_iters)?;
        let infeas = -t.obj[width - 1];
        if infeas > FEAS_TOL {
            return Err(Error::Solver(format!("infeasible: residual {infeas:e}")));
        }
        // Drive leftover artificials out of the basis where possible. A row
        // without a solid entry in any nonbasic column is redundant and its
        // artificial stays basic at zero.
        for i in 0..m {
            if t.basis[i] >= art_start {
                let mut basic = vec![false; width];
                for &b in &t.basis {
                    basic[b] = true;
                }
                let col = (0..art_start)
                    .filter(|&j| !basic[j] && t.rows[i][j].abs() > FEAS_TOL)
                    .max_by(|&a, &b| {
                        t.rows[i][a].abs().partial_cmp(&t.rows[i][b].abs()).unwrap()
                    });
                if let Some(col) = col {
                    t.pivot(i, col);
                }
            }
        }
    }

    // Phase two: minimize the negated objective.
    let mut cost = vec![0.0; width];
    for j in 0..v {
        cost[j] = -lp.objective[j];
        cost[v + j] = lp.objective[j];
    }
    t.enter_limit = art_start;
    t.set_cost(cost);
    if !t.optimize(max_iters)? {
        return Err(Error::Solver("unbounded objective".into()));
    }

    let mut values = vec![0.0; v];
    for (i, &b) in t.basis.iter().enumerate() {
        let x = t.rows[i][width - 1];
        if b < v {
            values[b] += x;
        } else if b < 2 * v {
            values[b - v] -= x;
        }
    }
    let objective = lp
        .objective
        .iter()
        .zip(&values)
        .map(|(c, x)| c * x)
        .sum();
    Ok(LpSolution { values, objective })
}
