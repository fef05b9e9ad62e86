//! Variational minimization of `F(θ) = ⟨x(θ)|H|x(θ)⟩` for diagonal `H`.
//!
//! The optimizer is steepest descent with an Armijo backtracking line search,
//! run from several seeded starting points.

use std::collections::VecDeque;
use std::f64::consts::{FRAC_PI_2, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::sim::{real_state_into, AnsatzConfig, DiagonalObservable};

const FD_STEP: f64 = 1e-5;
const ARMIJO_C1: f64 = 1e-4;
const BACKTRACK_SHRINK: f64 = 0.5;
const INITIAL_STEP: f64 = 1.0;
const MAX_BACKTRACKS: usize = 50;
const LBFGS_MEMORY: usize = 10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Optimizer {
    /// Search direction `−∇F`.
    SteepestDescent,
    /// Limited-memory BFGS direction (10 pairs), same line search.
    #[default]
    Lbfgs,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GradientMode {
    #[default]
    ParameterShift,
    FiniteDifference,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InitMode {
    /// First restart at `θ = 0` (or the warm start), the rest uniform.
    #[default]
    Zeros,
    /// Every restart uniform on `[0, 2π)` unless a warm start is given.
    SeededUniform,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VqeSettings {
    pub max_iterations: usize,
    pub restarts: usize,
    pub gradient_mode: GradientMode,
    /// Stop a descent once one step improves `F` by less than this.
    pub convergence_tol: f64,
    pub init_mode: InitMode,
    pub optimizer: Optimizer,
    /// Scheduling of independent restarts.
    pub execution: Execution,
}

impl Default for VqeSettings {
    fn default() -> Self {
        Self {
            max_iterations: 1000,
            restarts: 4,
            gradient_mode: GradientMode::ParameterShift,
            convergence_tol: 1e-8,
            init_mode: InitMode::Zeros,
            optimizer: Optimizer::Lbfgs,
            execution: Execution::Sequential,
        }
    }
}

impl VqeSettings {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 || self.restarts == 0 {
            return Err(Error::InvalidArgument(
                "max_iterations and restarts must be at least 1".into(),
            ));
        }
        if self.convergence_tol.is_nan() || self.convergence_tol < 0.0 {
            return Err(Error::InvalidArgument(
                "convergence_tol must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VqeResult {
    pub theta_star: Vec<f64>,
    pub value: f64,
    pub pmf: Vec<f64>,
    /// Circuit evaluations summed over all restarts.
    pub evaluations: usize,
    /// Index of the restart that produced the result.
    pub restart: usize,
    pub converged: bool,
}

/// One local descent run.
#[derive(Clone, Debug, PartialEq)]
pub struct Descent {
    pub theta: Vec<f64>,
    pub value: f64,
    /// `F` after every accepted step, starting with the initial point.
    pub history: Vec<f64>,
    pub evaluations: usize,
    pub converged: bool,
}

/// Statevector evaluator reusing one amplitude buffer.
struct Evaluator<'a> {
    cfg: &'a AnsatzConfig,
    pairs: Vec<(usize, usize)>,
    amps: Vec<f64>,
    evaluations: usize,
}

impl<'a> Evaluator<'a> {
    fn new(cfg: &'a AnsatzConfig, n_obs: usize) -> Result<Self> {
        if cfg.n != n_obs {
            return Err(Error::DimensionMismatch {
                expected: cfg.n,
                actual: n_obs,
                context: "observable qubit count",
            });
        }
        Ok(Self {
            cfg,
            pairs: cfg.entangler_pairs(),
            amps: vec![0.0; 1 << cfg.n],
            evaluations: 0,
        })
    }

    fn prepare(&mut self, theta: &[f64]) {
        real_state_into(self.cfg, &self.pairs, theta, &mut self.amps);
        self.evaluations += 1;
    }

    fn diagonal_value(&mut self, theta: &[f64], diag: &[f64]) -> f64 {
        self.prepare(theta);
        self.amps.iter().zip(diag).map(|(a, v)| a * a * v).sum()
    }

    fn pmf(&mut self, theta: &[f64]) -> Vec<f64> {
        real_state_into(self.cfg, &self.pairs, theta, &mut self.amps);
        self.amps.iter().map(|a| a * a).collect()
    }

    /// Gradient of `θ ↦ Σ_k p_k(θ) diag[k]`.
    fn diagonal_gradient(&mut self, theta: &[f64], diag: &[f64], mode: GradientMode) -> Vec<f64> {
        let (shift, scale) = match mode {
            GradientMode::ParameterShift => (FRAC_PI_2, 0.5),
            GradientMode::FiniteDifference => (FD_STEP, 0.5 / FD_STEP),
        };
        let mut shifted = theta.to_vec();
        (0..theta.len())
            .map(|i| {
                shifted[i] = theta[i] + shift;
                let plus = self.diagonal_value(&shifted, diag);
                shifted[i] = theta[i] - shift;
                let minus = self.diagonal_value(&shifted, diag);
                shifted[i] = theta[i];
                scale * (plus - minus)
            })
            .collect()
    }
}

/// Something `run_descent` can minimize.
trait Objective {
    fn value(&mut self, theta: &[f64]) -> f64;
    fn gradient(&mut self, theta: &[f64], mode: GradientMode) -> Vec<f64>;
    fn evaluations(&self) -> usize;
}

/// `⟨H⟩` for a diagonal `H`.
struct Expectation<'a> {
    eval: Evaluator<'a>,
    obs: &'a DiagonalObservable,
}

impl<'a> Expectation<'a> {
    fn new(cfg: &'a AnsatzConfig, obs: &'a DiagonalObservable) -> Result<Self> {
        Ok(Self {
            eval: Evaluator::new(cfg, obs.n())?,
            obs,
        })
    }
}

impl Objective for Expectation<'_> {
    fn value(&mut self, theta: &[f64]) -> f64 {
        self.eval.diagonal_value(theta, self.obs.values())
    }

    fn gradient(&mut self, theta: &[f64], mode: GradientMode) -> Vec<f64> {
        self.eval.diagonal_gradient(theta, self.obs.values(), mode)
    }

    fn evaluations(&self) -> usize {
        self.eval.evaluations
    }
}

/// One inequality `⟨G⟩ ≤ 0` of an augmented Lagrangian, with multiplier `λ`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Penalty<'a> {
    pub obs: &'a DiagonalObservable,
    pub lambda: f64,
}

impl Penalty<'_> {
    /// Value and slope of `ψ(x) = (max(0, λ + ρx)² − λ²)/(2ρ) − λx`.
    fn term(&self, x: f64, rho: f64) -> (f64, f64) {
        if rho * x >= -self.lambda {
            (0.5 * rho * x * x, rho * x)
        } else {
            (
                -self.lambda * self.lambda / (2.0 * rho) - self.lambda * x,
                -self.lambda,
            )
        }
    }
}

/// `⟨H⟩ + Σ_j ψ_j(⟨G_j⟩)`, the augmented Lagrangian when `H` is the Lagrangian.
struct Penalized<'a> {
    eval: Evaluator<'a>,
    obs: &'a DiagonalObservable,
    penalties: &'a [Penalty<'a>],
    rho: f64,
    effective: Vec<f64>,
}

impl Penalized<'_> {
    fn terms(&self) -> Vec<(f64, f64)> {
        let probs: Vec<f64> = self.eval.amps.iter().map(|a| a * a).collect();
        self.penalties
            .iter()
            .map(|p| p.term(p.obs.expectation_under(&probs), self.rho))
            .collect()
    }
}

impl Objective for Penalized<'_> {
    fn value(&mut self, theta: &[f64]) -> f64 {
        let base = self.eval.diagonal_value(theta, self.obs.values());
        base + self.terms().iter().map(|t| t.0).sum::<f64>()
    }

    fn gradient(&mut self, theta: &[f64], mode: GradientMode) -> Vec<f64> {
        // Chain rule through the PMF: the gradient equals that of the
        // diagonal `H + Σ_j ψ'_j G_j` with the slopes frozen at θ.
        self.eval.prepare(theta);
        let terms = self.terms();
        self.effective.copy_from_slice(self.obs.values());
        for (p, (_, slope)) in self.penalties.iter().zip(&terms) {
            if *slope != 0.0 {
                for (e, g) in self.effective.iter_mut().zip(p.obs.values()) {
                    *e += slope * g;
                }
            }
        }
        let diag = std::mem::take(&mut self.effective);
        let grad = self.eval.diagonal_gradient(theta, &diag, mode);
        self.effective = diag;
        grad
    }

    fn evaluations(&self) -> usize {
        self.eval.evaluations
    }
}

/// `∇_θ F`. Parameter shift uses `±π/2` and is exact for R_Y gates; finite
/// differences are central with step `1e-5`.
pub fn gradient(
    cfg: &AnsatzConfig,
    obs: &DiagonalObservable,
    theta: &[f64],
    mode: GradientMode,
) -> Result<Vec<f64>> {
    check_theta(cfg, theta)?;
    Ok(Expectation::new(cfg, obs)?.gradient(theta, mode))
}

/// `F(θ)` via the real-amplitude statevector.
pub fn objective(cfg: &AnsatzConfig, obs: &DiagonalObservable, theta: &[f64]) -> Result<f64> {
    check_theta(cfg, theta)?;
    Ok(Expectation::new(cfg, obs)?.value(theta))
}

/// PMF of the ansatz state at `theta`.
pub fn pmf_at(cfg: &AnsatzConfig, theta: &[f64]) -> Result<Vec<f64>> {
    check_theta(cfg, theta)?;
    Ok(Evaluator::new(cfg, cfg.n)?.pmf(theta))
}

fn check_theta(cfg: &AnsatzConfig, theta: &[f64]) -> Result<()> {
    if theta.len() != cfg.num_params() {
        return Err(Error::DimensionMismatch {
            expected: cfg.num_params(),
            actual: theta.len(),
            context: "ansatz parameter vector",
        });
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Limited-memory BFGS history.
struct Memory {
    pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)>,
}

impl Memory {
    fn new() -> Self {
        Self {
            pairs: VecDeque::with_capacity(LBFGS_MEMORY),
        }
    }

    fn push(&mut self, s: Vec<f64>, y: Vec<f64>) {
        let sy = dot(&s, &y);
        if sy <= 1e-12 * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() || sy <= 0.0 {
            return;
        }
        if self.pairs.len() == LBFGS_MEMORY {
            self.pairs.pop_front();
        }
        self.pairs.push_back((s, y, 1.0 / sy));
    }

    /// Two-loop recursion for `−H∇`.
    fn direction(&self, grad: &[f64]) -> Vec<f64> {
        let mut q = grad.to_vec();
        let mut alphas = Vec::with_capacity(self.pairs.len());
        for (s, y, rho) in self.pairs.iter().rev() {
            let a = rho * dot(s, &q);
            for (qi, yi) in q.iter_mut().zip(y) {
                *qi -= a * yi;
            }
            alphas.push(a);
        }
        if let Some((s, y, _)) = self.pairs.back() {
            let gamma = dot(s, y) / dot(y, y);
            q.iter_mut().for_each(|v| *v *= gamma);
        }
        for ((s, y, rho), a) in self.pairs.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            for (qi, si) in q.iter_mut().zip(s) {
                *qi += (a - b) * si;
            }
        }
        q.iter_mut().for_each(|v| *v = -*v);
        q
    }
}

fn run_descent(f: &mut impl Objective, theta0: &[f64], settings: &VqeSettings) -> Descent {
    let mut theta = theta0.to_vec();
    let mut value = f.value(&theta);
    let mut history = vec![value];
    let mut converged = false;
    let mut candidate = vec![0.0; theta.len()];
    let mut memory = Memory::new();
    let mut grad = f.gradient(&theta, settings.gradient_mode);

    for _ in 0..settings.max_iterations {
        let grad_sq = dot(&grad, &grad);
        if grad_sq == 0.0 {
            converged = true;
            break;
        }
        let mut dir = match settings.optimizer {
            Optimizer::SteepestDescent => grad.iter().map(|g| -g).collect(),
            Optimizer::Lbfgs => memory.direction(&grad),
        };
        let mut slope = dot(&grad, &dir);
        if slope.is_nan() || slope >= 0.0 {
            memory = Memory::new();
            dir = grad.iter().map(|g| -g).collect();
            slope = -grad_sq;
        }
        let mut step = INITIAL_STEP;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            for ((c, t), d) in candidate.iter_mut().zip(&theta).zip(&dir) {
                *c = t + step * d;
            }
            let trial = f.value(&candidate);
            if trial <= value + ARMIJO_C1 * step * slope {
                accepted = Some(trial);
                break;
            }
            step *= BACKTRACK_SHRINK;
        }
        let Some(trial) = accepted else {
            // No step along the search direction makes sufficient progress.
            converged = true;
            break;
        };
        let improvement = value - trial;
        std::mem::swap(&mut theta, &mut candidate);
        value = trial;
        history.push(value);
        if improvement < settings.convergence_tol {
            converged = true;
            break;
        }
        let next_grad = f.gradient(&theta, settings.gradient_mode);
        if settings.optimizer == Optimizer::Lbfgs {
            let s_k = theta.iter().zip(&candidate).map(|(a, b)| a - b).collect();
            let y_k = next_grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
            memory.push(s_k, y_k);
        }
        grad = next_grad;
    }

    Descent {
        theta,
        value,
        history,
        evaluations: f.evaluations(),
        converged,
    }
}

/// A single line-search descent from `theta0`.
pub fn descend(
    cfg: &AnsatzConfig,
    obs: &DiagonalObservable,
    theta0: &[f64],
    settings: &VqeSettings,
) -> Result<Descent> {
    settings.validate()?;
    check_theta(cfg, theta0)?;
    let mut f = Expectation::new(cfg, obs)?;
    Ok(run_descent(&mut f, theta0, settings))
}

/// Value of the objective minimized by [`restart_runs`] at `theta`.
#[cfg(test)]
pub(crate) fn augmented_value(
    cfg: &AnsatzConfig,
    obs: &DiagonalObservable,
    penalties: &[Penalty<'_>],
    rho: f64,
    theta: &[f64],
) -> Result<f64> {
    check_theta(cfg, theta)?;
    let penalties = if rho > 0.0 { penalties } else { &[] };
    let mut f = Penalized {
        eval: Evaluator::new(cfg, obs.n())?,
        obs,
        penalties,
        rho,
        effective: vec![0.0; obs.values().len()],
    };
    Ok(f.value(theta))
}

pub fn minimize(
    cfg: &AnsatzConfig,
    obs: &DiagonalObservable,
    settings: &VqeSettings,
    seed: u64,
) -> Result<VqeResult> {
    minimize_from(cfg, obs, settings, seed, None)
}

/// All `settings.restarts` descents, in restart order. Restart 0 starts at
/// `warm` when given. With `penalties` and `rho > 0` each descent minimizes
/// the augmented objective instead of `⟨obs⟩`.
pub(crate) fn restart_runs(
    cfg: &AnsatzConfig,
    obs: &DiagonalObservable,
    penalties: &[Penalty<'_>],
    rho: f64,
    settings: &VqeSettings,
    seed: u64,
    warm: Option<&[f64]>,
) -> Result<Vec<Descent>> {
    settings.validate()?;
    if let Some(w) = warm {
        check_theta(cfg, w)?;
    }
    // Validate dimensions once before fanning out.
    Expectation::new(cfg, obs)?;
    let penalties = if rho > 0.0 { penalties } else { &[] };

    let p = cfg.num_params();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<Vec<f64>> = (0..settings.restarts)
        .map(|r| match (r, warm, settings.init_mode) {
            (0, Some(w), _) => w.to_vec(),
            (0, None, InitMode::Zeros) => vec![0.0; p],
            _ => (0..p).map(|_| rng.random::<f64>() * TAU).collect(),
        })
        .collect();

    Ok(par::map_indexed(settings.execution, starts.len(), |r| {
        let eval = Evaluator::new(cfg, obs.n()).expect("dimensions checked above");
        if penalties.is_empty() {
            run_descent(&mut Expectation { eval, obs }, &starts[r], settings)
        } else {
            let mut f = Penalized {
                eval,
                obs,
                penalties,
                rho,
                effective: vec![0.0; obs.values().len()],
            };
            run_descent(&mut f, &starts[r], settings)
        }
    }))
}

/// Best of `settings.restarts` descents. Restart 0 starts at `warm` when
/// given; ties between restarts go to the lowest index.
pub fn minimize_from(
    cfg: &AnsatzConfig,
    obs: &DiagonalObservable,
    settings: &VqeSettings,
    seed: u64,
    warm: Option<&[f64]>,
) -> Result<VqeResult> {
    let runs = restart_runs(cfg, obs, &[], 0.0, settings, seed, warm)?;
    let evaluations = runs.iter().map(|d| d.evaluations).sum();
    let mut best = 0;
    for (r, run) in runs.iter().enumerate() {
        if run.value < runs[best].value {
            best = r;
        }
    }
    let winner = &runs[best];
    let pmf = pmf_at(cfg, &winner.theta)?;
    let value = obs.expectation_under(&pmf);
    Ok(VqeResult {
        theta_star: winner.theta.clone(),
        value,
        pmf,
        evaluations,
        restart: best,
        converged: winner.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::QuadraticForm;
    use crate::sim::diagonal_of;

    #[test]
    fn constant_observable_has_zero_gradient_and_value() {
        let cfg = AnsatzConfig::new(3);
        let obs = DiagonalObservable::from_values(3, vec![2.5; 8]).unwrap();
        let theta: Vec<f64> = (0..cfg.num_params()).map(|i| i as f64 * 0.31).collect();
        for mode in [GradientMode::ParameterShift, GradientMode::FiniteDifference] {
            let g = gradient(&cfg, &obs, &theta, mode).unwrap();
            assert!(g.iter().all(|v| v.abs() < 1e-9), "{g:?}");
        }
        let res = minimize(&cfg, &obs, &VqeSettings::default(), 3).unwrap();
        assert!((res.value - 2.5).abs() < 1e-12);
    }

    #[test]
    fn single_qubit_gradient_closed_form() {
        // F = v0 cos²(Σ/2) + v1 sin²(Σ/2), so ∂F/∂θ_i = (v1 − v0) sin(Σ)/2.
        let cfg = AnsatzConfig::new(1).with_layers(1);
        let obs = DiagonalObservable::from_values(1, vec![0.7, -1.3]).unwrap();
        let theta = [0.4, 1.1];
        let total: f64 = theta.iter().sum();
        let expected = (-1.3 - 0.7) * total.sin() / 2.0;
        let g = gradient(&cfg, &obs, &theta, GradientMode::ParameterShift).unwrap();
        for gi in g {
            assert!((gi - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn single_bit_minimum() {
        // f(b) = b, minimized at b = 0.
        let f = QuadraticForm::new(1, vec![0.0], vec![1.0], 0.0).unwrap();
        let obs = diagonal_of(&f).unwrap();
        let cfg = AnsatzConfig::new(1);
        let res = minimize(&cfg, &obs, &VqeSettings::default(), 11).unwrap();
        assert!(res.value <= 1e-6, "{}", res.value);
        assert!((res.pmf[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn minimize_is_deterministic() {
        let f = QuadraticForm::new(2, vec![0.3, -1.2, 0.5, 0.9], vec![-0.4, 0.2], 0.1).unwrap();
        let obs = diagonal_of(&f).unwrap();
        let cfg = AnsatzConfig::new(2);
        let s = VqeSettings::default();
        assert_eq!(
            minimize(&cfg, &obs, &s, 5).unwrap(),
            minimize(&cfg, &obs, &s, 5).unwrap()
        );
        let par = VqeSettings {
            execution: Execution::Parallel,
            ..s.clone()
        };
        assert_eq!(
            minimize(&cfg, &obs, &s, 5).unwrap(),
            minimize(&cfg, &obs, &par, 5).unwrap()
        );
    }

    #[test]
    fn warm_start_is_first_restart() {
        let f = QuadraticForm::new(2, vec![0.3, -1.2, 0.5, 0.9], vec![-0.4, 0.2], 0.1).unwrap();
        let obs = diagonal_of(&f).unwrap();
        let cfg = AnsatzConfig::new(2);
        let warm: Vec<f64> = (0..cfg.num_params()).map(|i| 0.2 * i as f64).collect();
        let one = VqeSettings {
            restarts: 1,
            ..VqeSettings::default()
        };
        let res = minimize_from(&cfg, &obs, &one, 0, Some(&warm)).unwrap();
        let direct = descend(&cfg, &obs, &warm, &one).unwrap();
        assert_eq!(res.theta_star, direct.theta);
        assert!(res.value <= objective(&cfg, &obs, &warm).unwrap());
    }

    #[test]
    fn descent_history_never_increases() {
        let f = QuadraticForm::new(
            3,
            vec![0.5, -1.0, 0.3, 0.2, 0.8, -0.6, 1.1, 0.0, -0.9],
            vec![0.4, -0.3, 0.2],
            0.0,
        )
        .unwrap();
        let obs = diagonal_of(&f).unwrap();
        let cfg = AnsatzConfig::new(3);
        let theta0: Vec<f64> = (0..cfg.num_params())
            .map(|i| (i as f64).cos() * 2.0)
            .collect();
        let d = descend(&cfg, &obs, &theta0, &VqeSettings::default()).unwrap();
        assert!(d.history.windows(2).all(|w| w[1] <= w[0]));
        assert!(d.value >= obs.min() - 1e-12);
    }

    #[test]
    fn rejects_bad_settings_and_shapes() {
        let cfg = AnsatzConfig::new(2);
        let obs = DiagonalObservable::from_values(2, vec![0.0; 4]).unwrap();
        let bad = VqeSettings {
            restarts: 0,
            ..VqeSettings::default()
        };
        assert!(minimize(&cfg, &obs, &bad, 0).is_err());
        let wrong_obs = DiagonalObservable::from_values(3, vec![0.0; 8]).unwrap();
        assert!(minimize(&cfg, &wrong_obs, &VqeSettings::default(), 0).is_err());
        assert!(gradient(&cfg, &obs, &[0.0; 3], GradientMode::ParameterShift).is_err());
    }

    fn two_constraint_setup() -> (AnsatzConfig, [DiagonalObservable; 3]) {
        let f0 = QuadraticForm::new(2, vec![0.3, -1.2, 0.5, 0.9], vec![-0.4, 0.2], 0.1).unwrap();
        let f1 = QuadraticForm::new(2, vec![1.0, 0.0, 0.0, -0.5], vec![0.3, -0.8], -0.2).unwrap();
        let f2 = QuadraticForm::new(2, vec![0.0, 0.7, 0.0, 0.0], vec![-0.1, 0.4], 0.05).unwrap();
        let obs = [f0, f1, f2].map(|f| diagonal_of(&f).unwrap());
        (AnsatzConfig::new(2), obs)
    }

    #[test]
    fn penalty_term_is_continuous_at_the_kink() {
        let obs = DiagonalObservable::from_values(1, vec![0.0, 1.0]).unwrap();
        let p = Penalty {
            obs: &obs,
            lambda: 0.6,
        };
        let rho = 0.25;
        let kink = -p.lambda / rho;
        let (left, left_slope) = p.term(kink - 1e-9, rho);
        let (right, right_slope) = p.term(kink + 1e-9, rho);
        assert!((left - right).abs() < 1e-8);
        assert!((left_slope - right_slope).abs() < 1e-7);
        // The quadratic branch is ρx²/2 and vanishes with x.
        assert_eq!(p.term(0.0, rho), (0.0, 0.0));
    }

    #[test]
    fn augmented_gradient_matches_finite_differences() {
        let (cfg, [l, g1, g2]) = two_constraint_setup();
        let penalties = [
            Penalty {
                obs: &g1,
                lambda: 0.4,
            },
            Penalty {
                obs: &g2,
                lambda: 0.0,
            },
        ];
        for (k, rho) in [0.3, 2.0, 10.0].into_iter().enumerate() {
            let theta: Vec<f64> = (0..cfg.num_params())
                .map(|i| ((i + 3 * k) as f64 * 1.7).sin() * 2.5)
                .collect();
            let mut f = Penalized {
                eval: Evaluator::new(&cfg, 2).unwrap(),
                obs: &l,
                penalties: &penalties,
                rho,
                effective: vec![0.0; 4],
            };
            let g = f.gradient(&theta, GradientMode::ParameterShift);
            for i in 0..theta.len() {
                let h = 1e-6;
                let mut up = theta.clone();
                let mut down = theta.clone();
                up[i] += h;
                down[i] -= h;
                let fd = (f.value(&up) - f.value(&down)) / (2.0 * h);
                assert!(
                    (g[i] - fd).abs() < 1e-6,
                    "rho {rho} param {i}: {} vs {fd}",
                    g[i]
                );
            }
        }
    }

    #[test]
    fn zero_weight_reduces_to_plain_objective() {
        let (cfg, [l, g1, _]) = two_constraint_setup();
        let penalties = [Penalty {
            obs: &g1,
            lambda: 1.0,
        }];
        let theta: Vec<f64> = (0..cfg.num_params()).map(|i| i as f64 * 0.45).collect();
        assert_eq!(
            augmented_value(&cfg, &l, &penalties, 0.0, &theta).unwrap(),
            objective(&cfg, &l, &theta).unwrap()
        );
    }

    #[test]
    fn both_optimizers_reach_the_ground_value() {
        let f = QuadraticForm::new(
            3,
            vec![0.5, -1.0, 0.3, 0.2, 0.8, -0.6, 1.1, 0.0, -0.9],
            vec![0.4, -0.3, 0.2],
            0.0,
        )
        .unwrap();
        let obs = diagonal_of(&f).unwrap();
        let cfg = AnsatzConfig::new(3);
        for optimizer in [Optimizer::SteepestDescent, Optimizer::Lbfgs] {
            let s = VqeSettings {
                optimizer,
                restarts: 4,
                ..VqeSettings::default()
            };
            let res = minimize(&cfg, &obs, &s, 2).unwrap();
            assert!(res.value - obs.min() < 1e-6, "{optimizer:?}: {}", res.value);
        }
    }
}
