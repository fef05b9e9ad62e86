//! Dense two-phase primal simplex with Bland's rule.
//!
//! Solves `min cᵀx  s.t.  A_ub x ≤ b_ub,  A_eq x = b_eq,  x ≥ 0`. Pivoting is
//! fully deterministic, so identical inputs always take identical pivot paths.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const FEAS_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub c: Vec<f64>,
    pub a_ub: Vec<Vec<f64>>,
    pub b_ub: Vec<f64>,
    pub a_eq: Vec<Vec<f64>>,
    pub b_eq: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    /// Multipliers of the `≤` rows, sign-flipped so they are `≥ 0`.
    pub duals_ub: Vec<f64>,
    /// Multipliers of the equality rows (free sign).
    pub duals_eq: Vec<f64>,
    pub pivots: usize,
}

impl LpOutcome {
    fn without_solution(status: LpStatus, pivots: usize) -> Self {
        Self {
            status,
            x: Vec::new(),
            objective: f64::NAN,
            duals_ub: Vec::new(),
            duals_eq: Vec::new(),
            pivots,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
    pivots: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[col];
            if factor != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= factor * pv;
                }
                row[col] = 0.0;
            }
        }
        self.basis[r] = col;
        self.pivots += 1;
    }

    /// Reduced costs `r_j = c_j − c_Bᵀ B⁻¹ A_j` for all columns.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut r = cost.to_vec();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for (rj, a) in r.iter_mut().zip(&row[..self.width]) {
                    *rj -= cb * a;
                }
            }
        }
        r
    }

    /// Runs Bland-rule pivots until optimal or unbounded. Only columns with
    /// `allowed[j]` may enter.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> LpStatus {
        loop {
            let reduced = self.reduced_costs(cost);
            let Some(enter) = (0..self.width).find(|&j| allowed[j] && reduced[j] < -PIVOT_EPS)
            else {
                return LpStatus::Optimal;
            };
            let mut leave: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for i in 0..self.rows.len() {
                let a = self.rows[i][enter];
                if a > PIVOT_EPS {
                    let ratio = self.rhs(i) / a;
                    let better = match leave {
                        None => true,
                        Some(l) => {
                            ratio < best_ratio - PIVOT_EPS
                                || (ratio <= best_ratio + PIVOT_EPS
                                    && self.basis[i] < self.basis[l])
                        }
                    };
                    if better {
                        best_ratio = best_ratio.min(ratio);
                        leave = Some(i);
                    }
                }
            }
            match leave {
                Some(r) => self.pivot(r, enter),
                None => return LpStatus::Unbounded,
            }
        }
    }
}

fn check_shapes(lp: &LinearProgram) -> Result<()> {
    let nv = lp.c.len();
    if lp.a_ub.len() != lp.b_ub.len() || lp.a_eq.len() != lp.b_eq.len() {
        return Err(Error::InvalidArgument(
            "row count and right-hand side disagree".into(),
        ));
    }
    for row in lp.a_ub.iter().chain(&lp.a_eq) {
        if row.len() != nv {
            return Err(Error::DimensionMismatch {
                expected: nv,
                actual: row.len(),
                context: "constraint row",
            });
        }
    }
    let all =
        lp.c.iter()
            .chain(lp.b_ub.iter())
            .chain(lp.b_eq.iter())
            .chain(lp.a_ub.iter().flatten())
            .chain(lp.a_eq.iter().flatten());
    if !all.into_iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("linear program"));
    }
    Ok(())
}

pub fn solve(lp: &LinearProgram) -> Result<LpOutcome> {
    check_shapes(lp)?;
    let nv = lp.c.len();
    let n_ub = lp.a_ub.len();
    let n_rows = n_ub + lp.a_eq.len();

    // Normalize every row to a nonnegative right-hand side. Rows whose slack
    // keeps a +1 coefficient start with the slack basic; the rest get an
    // artificial column.
    let mut sign = vec![1.0; n_rows];
    let mut needs_artificial = vec![false; n_rows];
    for i in 0..n_ub {
        if lp.b_ub[i] < 0.0 {
            sign[i] = -1.0;
            needs_artificial[i] = true;
        }
    }
    for e in 0..lp.a_eq.len() {
        let i = n_ub + e;
        needs_artificial[i] = true;
        if lp.b_eq[e] < 0.0 {
            sign[i] = -1.0;
        }
    }
    let n_art = needs_artificial.iter().filter(|&&a| a).count();
    let slack0 = nv;
    let art0 = nv + n_ub;
    let width = nv + n_ub + n_art;

    let mut rows = Vec::with_capacity(n_rows);
    let mut basis = Vec::with_capacity(n_rows);
    // Column that holds B⁻¹ e_i for row i: its initial basic column.
    let mut initial_col = Vec::with_capacity(n_rows);
    let mut next_art = art0;
    for i in 0..n_rows {
        let mut row = vec![0.0; width + 1];
        let (coeffs, b) = if i < n_ub {
            (&lp.a_ub[i], lp.b_ub[i])
        } else {
            (&lp.a_eq[i - n_ub], lp.b_eq[i - n_ub])
        };
        for (v, a) in row.iter_mut().zip(coeffs) {
            *v = sign[i] * a;
        }
        if i < n_ub {
            row[slack0 + i] = sign[i];
        }
        row[width] = sign[i] * b;
        if needs_artificial[i] {
            row[next_art] = 1.0;
            basis.push(next_art);
            initial_col.push(next_art);
            next_art += 1;
        } else {
            basis.push(slack0 + i);
            initial_col.push(slack0 + i);
        }
        rows.push(row);
    }
    let mut tab = Tableau {
        rows,
        basis,
        width,
        pivots: 0,
    };

    let is_artificial = |j: usize| j >= art0;

    if n_art > 0 {
        let mut phase1_cost = vec![0.0; width];
        for c in phase1_cost.iter_mut().skip(art0) {
            *c = 1.0;
        }
        let allowed = vec![true; width];
        tab.optimize(&phase1_cost, &allowed);
        let infeasibility: f64 = (0..n_rows)
            .filter(|&i| is_artificial(tab.basis[i]))
            .map(|i| tab.rhs(i))
            .sum();
        if infeasibility > FEAS_EPS {
            return Ok(LpOutcome::without_solution(
                LpStatus::Infeasible,
                tab.pivots,
            ));
        }
        // Drive zero-level artificials out of the basis where possible. A row
        // with no usable entry is redundant and keeps its artificial at zero.
        for i in 0..n_rows {
            if is_artificial(tab.basis[i]) {
                if let Some(col) = (0..art0).find(|&j| tab.rows[i][j].abs() > PIVOT_EPS) {
                    tab.pivot(i, col);
                }
            }
        }
    }

    let mut cost = vec![0.0; width];
    cost[..nv].copy_from_slice(&lp.c);
    let allowed: Vec<bool> = (0..width).map(|j| !is_artificial(j)).collect();
    if tab.optimize(&cost, &allowed) == LpStatus::Unbounded {
        return Ok(LpOutcome::without_solution(LpStatus::Unbounded, tab.pivots));
    }

    let mut x = vec![0.0; nv];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < nv {
            x[b] = tab.rhs(i);
        }
    }
    let objective: f64 = lp.c.iter().zip(&x).map(|(c, x)| c * x).sum();

    // y_i = c_Bᵀ B⁻¹ e_i, read off the reduced cost of the initial basic
    // column (whose own cost is zero), then undo the row sign flip.
    let reduced = tab.reduced_costs(&cost);
    let y: Vec<f64> = (0..n_rows)
        .map(|i| -reduced[initial_col[i]] * sign[i])
        .collect();
    let duals_ub = y[..n_ub].iter().map(|&v| (-v).max(0.0)).collect();
    let duals_eq = y[n_ub..].to_vec();

    Ok(LpOutcome {
        status: LpStatus::Optimal,
        x,
        objective,
        duals_ub,
        duals_eq,
        pivots: tab.pivots,
    })
}
