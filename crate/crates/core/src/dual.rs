//! Dual decomposition for the expectation-constrained variational problem.
//!
//! Each outer iteration minimizes the Lagrangian Hamiltonian
//! `H₀ + Σ_m λ_m H_m` over the ansatz (warm-started from the previous
//! iterate), measures every constraint observable on the resulting state and
//! takes a projected subgradient step `λ_m ← max{λ_m + μ_t F_m, 0}` with
//! `μ_t = μ₀ / (t + α)`.
//!
//! With `penalty > 0` the inner objective is the augmented Lagrangian
//! `⟨H₀⟩ + Σ_m (max{0, λ_m + ρ F_m}² − λ_m²) / (2ρ)` with `ρ = penalty·μ_t`,
//! which turns the update into a proximal step on the dual.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::oracle::instance_diagonals;
use crate::problem::{BitVector, QcqpInstance};
use crate::sim::{estimate_expectation_from_pmf, AnsatzConfig, DiagonalObservable};
use crate::vqe::{pmf_at, restart_runs, Penalty, VqeSettings};

/// Multipliers plus the step-size schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct DualState {
    pub lambda: Vec<f64>,
    pub t: usize,
    pub mu0: f64,
    pub alpha: f64,
}

impl DualState {
    pub fn new(m: usize, mu0: f64, alpha: f64) -> Result<Self> {
        if !(mu0 > 0.0 && alpha > 0.0) {
            return Err(Error::InvalidArgument(
                "mu0 and alpha must be positive".into(),
            ));
        }
        Ok(Self {
            lambda: vec![0.0; m],
            t: 0,
            mu0,
            alpha,
        })
    }

    pub fn step_size(&self) -> f64 {
        self.mu0 / (self.t as f64 + self.alpha)
    }
}

/// One projected subgradient ascent step.
pub fn dual_step(state: &DualState, constraint_values: &[f64]) -> Result<DualState> {
    if constraint_values.len() != state.lambda.len() {
        return Err(Error::DimensionMismatch {
            expected: state.lambda.len(),
            actual: constraint_values.len(),
            context: "constraint values",
        });
    }
    let mu = state.step_size();
    let lambda = state
        .lambda
        .iter()
        .zip(constraint_values)
        .map(|(l, f)| (l + mu * f).max(0.0))
        .collect();
    Ok(DualState {
        lambda,
        t: state.t + 1,
        ..*state
    })
}

/// Diagonal of `H₀ + Σ_m λ_m H_m`.
pub fn lagrangian_observable(inst: &QcqpInstance, lambda: &[f64]) -> Result<DiagonalObservable> {
    let (objective, constraints) = instance_diagonals(inst)?;
    combine(&objective, &constraints, lambda)
}

fn combine(
    objective: &DiagonalObservable,
    constraints: &[DiagonalObservable],
    lambda: &[f64],
) -> Result<DiagonalObservable> {
    if lambda.len() != constraints.len() {
        return Err(Error::DimensionMismatch {
            expected: constraints.len(),
            actual: lambda.len(),
            context: "multiplier vector",
        });
    }
    if let Some((index, &value)) = lambda
        .iter()
        .enumerate()
        .find(|(_, &l)| l.is_nan() || l < 0.0)
    {
        return Err(Error::NegativeMultiplier { index, value });
    }
    let mut obs = objective.clone();
    for (l, c) in lambda.iter().zip(constraints) {
        obs.add_scaled(*l, c)?;
    }
    Ok(obs)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualConfig {
    pub mu0: f64,
    pub alpha: f64,
    /// Stop once `‖λ^{t+1} − λ^t‖₂ ≤ tol` has held for `patience`
    /// consecutive iterations.
    pub tol: f64,
    pub patience: usize,
    pub max_outer: usize,
    /// Shots for the constraint estimates of the dual update; 0 means exact
    /// expectations.
    pub shots: usize,
    /// Augmented-Lagrangian weight as a multiple of `μ_t`; 0 minimizes the
    /// plain Lagrangian.
    pub penalty: f64,
}

impl Default for DualConfig {
    fn default() -> Self {
        Self {
            mu0: 50.0,
            alpha: 10.0,
            tol: 1e-7,
            patience: 10,
            max_outer: 500,
            shots: 0,
            penalty: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    /// Multipliers after this iteration's update.
    pub lambda: Vec<f64>,
    pub objective: f64,
    pub constraint_values: Vec<f64>,
    pub inner_evaluations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub pmf: Vec<f64>,
    pub theta: Vec<f64>,
    pub lambda: Vec<f64>,
    pub objective: f64,
    pub constraint_values: Vec<f64>,
    pub trace: Vec<TraceRow>,
    pub converged: bool,
    pub mode_bitstring: BitVector,
    pub mode_deterministic_feasible: bool,
}

impl SolveReport {
    pub fn outer_iterations(&self) -> usize {
        self.trace.len()
    }

    pub fn max_constraint_value(&self) -> f64 {
        self.constraint_values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Lowest index attaining the largest probability.
pub(crate) fn mode_index(pmf: &[f64]) -> usize {
    let mut best = 0;
    for (k, &p) in pmf.iter().enumerate() {
        if p > pmf[best] {
            best = k;
        }
    }
    best
}

fn derive_seed(seed: u64, t: usize, salt: u64) -> u64 {
    seed ^ (t as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt
}

struct Inner {
    theta: Vec<f64>,
    pmf: Vec<f64>,
    evaluations: usize,
}

/// Primal update: the restart with the lowest (augmented) Lagrangian value,
/// ties to the lowest index.
#[allow(clippy::too_many_arguments)]
fn inner_solve(
    ansatz: &AnsatzConfig,
    lagrangian: &DiagonalObservable,
    constraints: &[DiagonalObservable],
    state: &DualState,
    vqe: &VqeSettings,
    cfg: &DualConfig,
    seed: u64,
    warm: Option<&[f64]>,
) -> Result<Inner> {
    let penalties: Vec<Penalty<'_>> = constraints
        .iter()
        .zip(&state.lambda)
        .map(|(obs, &lambda)| Penalty { obs, lambda })
        .collect();
    let rho = cfg.penalty * state.step_size();
    let runs = restart_runs(ansatz, lagrangian, &penalties, rho, vqe, seed, warm)?;
    let evaluations = runs.iter().map(|d| d.evaluations).sum();
    let mut best = 0;
    for (r, run) in runs.iter().enumerate() {
        if run.value < runs[best].value {
            best = r;
        }
    }
    let theta = runs.into_iter().nth(best).expect("index in range").theta;
    let pmf = pmf_at(ansatz, &theta)?;
    Ok(Inner {
        theta,
        pmf,
        evaluations,
    })
}

pub fn solve(
    inst: &QcqpInstance,
    vqe: &VqeSettings,
    dual_cfg: &DualConfig,
    seed: u64,
) -> Result<SolveReport> {
    solve_with_ansatz(inst, &AnsatzConfig::new(inst.n()), vqe, dual_cfg, seed)
}

pub fn solve_with_ansatz(
    inst: &QcqpInstance,
    ansatz: &AnsatzConfig,
    vqe: &VqeSettings,
    dual_cfg: &DualConfig,
    seed: u64,
) -> Result<SolveReport> {
    if ansatz.n != inst.n() {
        return Err(Error::DimensionMismatch {
            expected: inst.n(),
            actual: ansatz.n,
            context: "ansatz qubit count",
        });
    }
    if dual_cfg.max_outer == 0 || dual_cfg.patience == 0 {
        return Err(Error::InvalidArgument(
            "max_outer and patience must be at least 1".into(),
        ));
    }
    vqe.validate()?;
    let (objective, constraints) = instance_diagonals(inst)?;
    let mut state = DualState::new(inst.m(), dual_cfg.mu0, dual_cfg.alpha)?;
    let mut warm: Option<Vec<f64>> = None;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut calm = 0;
    let mut last: Option<(Vec<f64>, Vec<f64>)> = None;

    for t in 0..dual_cfg.max_outer {
        let lagrangian = combine(&objective, &constraints, &state.lambda)?;
        let inner = inner_solve(
            ansatz,
            &lagrangian,
            &constraints,
            &state,
            vqe,
            dual_cfg,
            derive_seed(seed, t, 0),
            warm.as_deref(),
        )?;
        let exact: Vec<f64> = constraints
            .iter()
            .map(|c| c.expectation_under(&inner.pmf))
            .collect();
        let measured = if dual_cfg.shots == 0 {
            exact.clone()
        } else {
            inst.constraints()
                .iter()
                .enumerate()
                .map(|(m, f)| {
                    let s = derive_seed(seed, t, 0xD1B5_4A32_D192_ED03 ^ m as u64);
                    estimate_expectation_from_pmf(&inner.pmf, f, dual_cfg.shots, s)
                })
                .collect()
        };
        let next = dual_step(&state, &measured)?;
        let change: f64 = next
            .lambda
            .iter()
            .zip(&state.lambda)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        trace.push(TraceRow {
            iter: t,
            lambda: next.lambda.clone(),
            objective: objective.expectation_under(&inner.pmf),
            constraint_values: exact,
            inner_evaluations: inner.evaluations,
        });
        state = next;
        warm = Some(inner.theta.clone());
        last = Some((inner.pmf, inner.theta));
        calm = if change <= dual_cfg.tol { calm + 1 } else { 0 };
        if calm >= dual_cfg.patience {
            converged = true;
            break;
        }
    }

    let (pmf, theta) = last.expect("at least one outer iteration");
    let objective_value = objective.expectation_under(&pmf);
    let constraint_values: Vec<f64> = constraints
        .iter()
        .map(|c| c.expectation_under(&pmf))
        .collect();
    let mode_bitstring = BitVector::from_index(mode_index(&pmf), inst.n());
    let mode_deterministic_feasible = inst.is_feasible(&mode_bitstring)?;
    Ok(SolveReport {
        pmf,
        theta,
        lambda: state.lambda,
        objective: objective_value,
        constraint_values,
        trace,
        converged,
        mode_bitstring,
        mode_deterministic_feasible,
    })
}

/// CSV with header `iter,lambda_1..lambda_M,F0,F1..FM,inner_evals`. Numbers
/// use shortest round-trip formatting.
pub fn trace_csv(report: &SolveReport) -> String {
    let m = report.lambda.len();
    let mut out = String::from("iter");
    for i in 1..=m {
        let _ = write!(out, ",lambda_{i}");
    }
    out.push_str(",F0");
    for i in 1..=m {
        let _ = write!(out, ",F{i}");
    }
    out.push_str(",inner_evals\n");
    for row in &report.trace {
        let _ = write!(out, "{}", row.iter);
        for l in &row.lambda {
            let _ = write!(out, ",{l:?}");
        }
        let _ = write!(out, ",{:?}", row.objective);
        for f in &row.constraint_values {
            let _ = write!(out, ",{f:?}");
        }
        let _ = writeln!(out, ",{}", row.inner_evaluations);
    }
    out
}
