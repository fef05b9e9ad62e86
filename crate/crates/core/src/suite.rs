//! Benchmark suites: the 2-bit LP comparison table and the 5-bit, 3-constraint
//! feasibility study. Instances are solved independently and may run on the
//! rayon pool; rows always come back in instance order.

use std::fmt::Write as _;

use crate::dual::{solve, DualConfig, SolveReport};
use crate::error::{Error, Result};
use crate::generate::gen_instance;
use crate::oracle::{brute_force_solve, lp_solve, BruteForceSolution, LpSolution};
use crate::par::{self, Execution};
use crate::problem::QcqpInstance;
use crate::vqe::VqeSettings;

/// Objective gap to the LP optimum tolerated for a stochastic-optimal solve.
pub const OBJECTIVE_TOL: f64 = 1e-2;
/// Largest constraint expectation counted as satisfied.
pub const CONSTRAINT_TOL: f64 = 1e-3;
/// LP multipliers above this count as active.
pub const ACTIVE_DUAL_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Table1,
    Feas30,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Table1 => "table1",
            Suite::Feas30 => "feas30",
        }
    }

    pub fn qubits(self) -> usize {
        match self {
            Suite::Table1 => 2,
            Suite::Feas30 => 5,
        }
    }

    pub fn constraints(self) -> usize {
        match self {
            Suite::Table1 => 1,
            Suite::Feas30 => 3,
        }
    }

    pub fn instances(self) -> usize {
        match self {
            Suite::Table1 => 4,
            Suite::Feas30 => 30,
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table1" => Ok(Suite::Table1),
            "feas30" => Ok(Suite::Feas30),
            other => Err(Error::InvalidArgument(format!("unknown suite '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteSpec {
    pub suite: Suite,
    pub seed: u64,
    pub vqe: VqeSettings,
    pub dual: DualConfig,
    /// Scheduling across instances.
    pub execution: Execution,
}

impl SuiteSpec {
    pub fn new(suite: Suite, seed: u64) -> Self {
        Self {
            suite,
            seed,
            vqe: VqeSettings::default(),
            dual: DualConfig::default(),
            execution: Execution::default(),
        }
    }

    /// Seed of instance `index`; `gen --seed S --count K` uses the same rule.
    pub fn instance_seed(&self, index: usize) -> u64 {
        self.seed.wrapping_add(index as u64)
    }
}

#[derive(Clone, Debug)]
pub struct InstanceOutcome {
    pub index: usize,
    pub seed: u64,
    pub instance: QcqpInstance,
    pub report: SolveReport,
    pub lp: LpSolution,
    pub brute: BruteForceSolution,
}

impl InstanceOutcome {
    pub fn lp_objective(&self) -> f64 {
        self.lp.objective.unwrap_or(f64::NAN)
    }

    pub fn expectation_feasible(&self) -> bool {
        self.report.max_constraint_value() <= CONSTRAINT_TOL
    }

    pub fn stochastic_optimal(&self) -> bool {
        self.expectation_feasible()
            && (self.report.objective - self.lp_objective()).abs() <= OBJECTIVE_TOL
    }

    /// PMF mode equals the brute-force optimum of the deterministic problem.
    pub fn mode_optimal(&self) -> bool {
        self.brute.best.as_ref() == Some(&self.report.mode_bitstring)
    }

    pub fn pmf_distance(&self) -> f64 {
        inf_distance(&self.report.pmf, self.lp.pmf.as_deref().unwrap_or(&[]))
    }

    pub fn dual_distance(&self) -> f64 {
        inf_distance(&self.report.lambda, self.lp.duals.as_deref().unwrap_or(&[]))
    }
}

fn inf_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn solve_instance(spec: &SuiteSpec, index: usize) -> Result<InstanceOutcome> {
    let seed = spec.instance_seed(index);
    let instance = gen_instance(spec.suite.qubits(), spec.suite.constraints(), seed, true)?;
    let report = solve(&instance, &spec.vqe, &spec.dual, seed)?;
    let lp = lp_solve(&instance)?;
    let brute = brute_force_solve(&instance)?;
    Ok(InstanceOutcome {
        index,
        seed,
        instance,
        report,
        lp,
        brute,
    })
}

pub fn run_suite(spec: &SuiteSpec) -> Result<Vec<InstanceOutcome>> {
    par::map_indexed(spec.execution, spec.suite.instances(), |i| {
        solve_instance(spec, i)
    })
    .into_iter()
    .collect()
}

/// Six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || x.abs() < 1e-12 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&magnitude) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".to_string()
    } else {
        s
    }
}

fn vector(v: &[f64], sep: &str) -> String {
    let body: Vec<String> = v.iter().map(|&x| sig6(x)).collect();
    format!("[{}]", body.join(sep))
}

pub fn success_count(outcomes: &[InstanceOutcome]) -> usize {
    outcomes.iter().filter(|o| o.stochastic_optimal()).count()
}

fn header(spec: &SuiteSpec) -> String {
    let s = spec.suite;
    format!(
        "# {} suite: {} instances, n = {}, M = {}, seed = {}\n\n\
         Instances are freshly generated (standard-normal coefficients, one constraint \
         shifted active), so they reproduce the protocol and the agreement pattern, not \
         any particular published numbers.\n\n\
         Settings: mu0 = {}, alpha = {}, tol = {}, max_outer = {}, restarts = {}, \
         max_iterations = {}, shots = {}\n\n",
        s.name(),
        s.instances(),
        s.qubits(),
        s.constraints(),
        spec.seed,
        spec.dual.mu0,
        spec.dual.alpha,
        spec.dual.tol,
        spec.dual.max_outer,
        spec.vqe.restarts,
        spec.vqe.max_iterations,
        spec.dual.shots,
    )
}

pub fn render_markdown(spec: &SuiteSpec, outcomes: &[InstanceOutcome]) -> String {
    let mut out = header(spec);
    match spec.suite {
        Suite::Table1 => {
            out.push_str(
                "| # | seed | quantum PMF | LP PMF | quantum dual | LP dual | PMF dist | dual dist | converged |\n\
                 |---|---|---|---|---|---|---|---|---|\n",
            );
            for o in outcomes {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} | {} | {} | {} |",
                    o.index + 1,
                    o.seed,
                    vector(&o.report.pmf, ", "),
                    vector(o.lp.pmf.as_deref().unwrap_or(&[]), ", "),
                    vector(&o.report.lambda, ", "),
                    vector(o.lp.duals.as_deref().unwrap_or(&[]), ", "),
                    sig6(o.pmf_distance()),
                    sig6(o.dual_distance()),
                    o.report.converged,
                );
            }
        }
        Suite::Feas30 => {
            out.push_str(
                "| # | seed | converged | outer | objective | LP objective | max constraint | \
                 stochastic-optimal | expectation-feasible | mode | mode feasible | mode optimal |\n\
                 |---|---|---|---|---|---|---|---|---|---|---|---|\n",
            );
            for o in outcomes {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |",
                    o.index + 1,
                    o.seed,
                    o.report.converged,
                    o.report.outer_iterations(),
                    sig6(o.report.objective),
                    sig6(o.lp_objective()),
                    sig6(o.report.max_constraint_value()),
                    o.stochastic_optimal(),
                    o.expectation_feasible(),
                    o.report.mode_bitstring,
                    o.report.mode_deterministic_feasible,
                    o.mode_optimal(),
                );
            }
            let det = outcomes
                .iter()
                .filter(|o| o.report.mode_deterministic_feasible)
                .count();
            let _ = write!(
                out,
                "\nStochastic-optimal: {} / {}\n\nDeterministic mode feasible: {} / {}\n",
                success_count(outcomes),
                outcomes.len(),
                det,
                outcomes.len()
            );
        }
    }
    out
}

pub fn render_csv(spec: &SuiteSpec, outcomes: &[InstanceOutcome]) -> String {
    let mut out = String::new();
    match spec.suite {
        Suite::Table1 => {
            out.push_str(
                "index,seed,quantum_pmf,lp_pmf,quantum_dual,lp_dual,pmf_dist,dual_dist,converged\n",
            );
            for o in outcomes {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    o.index + 1,
                    o.seed,
                    vector(&o.report.pmf, " "),
                    vector(o.lp.pmf.as_deref().unwrap_or(&[]), " "),
                    vector(&o.report.lambda, " "),
                    vector(o.lp.duals.as_deref().unwrap_or(&[]), " "),
                    sig6(o.pmf_distance()),
                    sig6(o.dual_distance()),
                    o.report.converged,
                );
            }
        }
        Suite::Feas30 => {
            out.push_str(
                "index,seed,converged,outer_iterations,objective,lp_objective,max_constraint,\
                 stochastic_optimal,expectation_feasible,mode,mode_feasible,mode_optimal\n",
            );
            for o in outcomes {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{},{}",
                    o.index + 1,
                    o.seed,
                    o.report.converged,
                    o.report.outer_iterations(),
                    sig6(o.report.objective),
                    sig6(o.lp_objective()),
                    sig6(o.report.max_constraint_value()),
                    o.stochastic_optimal(),
                    o.expectation_feasible(),
                    o.report.mode_bitstring,
                    o.report.mode_deterministic_feasible,
                    o.mode_optimal(),
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(0.854), "0.854");
        assert_eq!(sig6(1.0 / 3.0), "0.333333");
        assert_eq!(sig6(-123.456789), "-123.457");
        assert_eq!(sig6(2.5e-7), "2.50000e-7");
        assert_eq!(sig6(1e-15), "0");
        for x in [0.123456, -4.56789, 98765.4] {
            let parsed: f64 = sig6(x).parse().unwrap();
            assert_eq!(sig6(parsed), sig6(x));
        }
    }

    #[test]
    fn suite_parameters() {
        let t: Suite = "table1".parse().unwrap();
        assert_eq!((t.qubits(), t.constraints(), t.instances()), (2, 1, 4));
        let f: Suite = "feas30".parse().unwrap();
        assert_eq!((f.qubits(), f.constraints(), f.instances()), (5, 3, 30));
        assert!("nope".parse::<Suite>().is_err());
    }
}
