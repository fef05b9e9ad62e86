//! Exact reference solvers: the linear program over outcome PMFs and a
//! brute-force enumerator for the deterministic binary QCQP.

use crate::error::Result;
use crate::par::Execution;
use crate::problem::{BitVector, QcqpInstance};
use crate::sim::{diagonal_of_with, DiagonalObservable, DEFAULT_QUBIT_LIMIT};
use crate::simplex::{self, LinearProgram, LpStatus};

/// Objective and constraint diagonals of an instance, in that order.
pub fn instance_diagonals(
    inst: &QcqpInstance,
) -> Result<(DiagonalObservable, Vec<DiagonalObservable>)> {
    let exec = Execution::Sequential;
    let objective = diagonal_of_with(inst.objective(), DEFAULT_QUBIT_LIMIT, exec)?;
    let constraints = inst
        .constraints()
        .iter()
        .map(|f| diagonal_of_with(f, DEFAULT_QUBIT_LIMIT, exec))
        .collect::<Result<Vec<_>>>()?;
    Ok((objective, constraints))
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub pmf: Option<Vec<f64>>,
    pub objective: Option<f64>,
    /// Nonnegative multipliers of the `M` expectation constraints.
    pub duals: Option<Vec<f64>>,
    /// Multiplier of the normalization row `Σ p_k = 1`; equals the dual
    /// objective.
    pub normalization_dual: Option<f64>,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// `min_p Σ p_k f₀(k)  s.t.  Σ p_k f_m(k) ≤ 0,  Σ p_k = 1,  p ≥ 0`.
pub fn lp_solve(inst: &QcqpInstance) -> Result<LpSolution> {
    let (objective, constraints) = instance_diagonals(inst)?;
    let len = objective.values().len();
    let lp = LinearProgram {
        c: objective.values().to_vec(),
        a_ub: constraints.iter().map(|o| o.values().to_vec()).collect(),
        b_ub: vec![0.0; constraints.len()],
        a_eq: vec![vec![1.0; len]],
        b_eq: vec![1.0],
    };
    let out = simplex::solve(&lp)?;
    if out.status != LpStatus::Optimal {
        return Ok(LpSolution {
            status: out.status,
            pmf: None,
            objective: None,
            duals: None,
            normalization_dual: None,
        });
    }
    Ok(LpSolution {
        status: out.status,
        pmf: Some(out.x),
        objective: Some(out.objective),
        duals: Some(out.duals_ub),
        normalization_dual: Some(out.duals_eq[0]),
    })
}

/// True iff the expectation-constrained problem admits some PMF.
pub fn stochastic_feasible(inst: &QcqpInstance) -> Result<bool> {
    Ok(lp_solve(inst)?.is_optimal())
}

#[derive(Clone, Debug, PartialEq)]
pub struct BruteForceSolution {
    pub best: Option<BitVector>,
    pub best_value: Option<f64>,
    pub feasible_count: usize,
}

/// Enumerates all `2ⁿ` bitstrings; ties go to the lowest index.
pub fn brute_force_solve(inst: &QcqpInstance) -> Result<BruteForceSolution> {
    let (objective, constraints) = instance_diagonals(inst)?;
    let mut best: Option<(usize, f64)> = None;
    let mut feasible_count = 0;
    for (k, &value) in objective.values().iter().enumerate() {
        if constraints.iter().any(|c| c.values()[k] > 0.0) {
            continue;
        }
        feasible_count += 1;
        if best.is_none_or(|(_, v)| value < v) {
            best = Some((k, value));
        }
    }
    Ok(BruteForceSolution {
        best: best.map(|(k, _)| BitVector::from_index(k, inst.n())),
        best_value: best.map(|(_, v)| v),
        feasible_count,
    })
}
