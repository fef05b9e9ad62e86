//! Seeded random QCQP instances with standard-normal coefficients.
//!
//! Coefficients come from ChaCha8 (`rand_chacha`, seeded with
//! `seed_from_u64`) through `rand_distr::StandardNormal`. For each form, in
//! order objective, constraint 1, …, constraint M, the draw order is the
//! row-major entries of `A`, then `c`, then `d`. Rejected attempts keep
//! consuming the same stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::oracle::lp_solve;
use crate::problem::{InstanceMeta, QcqpInstance, QuadraticForm};
use crate::sim::diagonal_of;

pub const GENERATOR_VERSION: &str = "chacha8-stdnormal/1";

#[derive(Clone, Debug, PartialEq)]
pub struct GenOptions {
    /// Require at least one strictly positive LP multiplier.
    pub ensure_active: bool,
    /// Violation given to the unconstrained minimizer when a constraint is
    /// shifted to become active.
    pub epsilon: f64,
    pub max_attempts: usize,
    /// Multipliers above this count as strictly positive.
    pub active_dual_threshold: f64,
}

impl Default for GenOptions {
    fn default() -> Self {
        Self {
            ensure_active: false,
            epsilon: 0.1,
            max_attempts: 100,
            active_dual_threshold: 1e-6,
        }
    }
}

fn draw_form(n: usize, rng: &mut ChaCha8Rng) -> QuadraticForm {
    let mut next = || -> f64 { StandardNormal.sample(rng) };
    let a = (0..n * n).map(|_| next()).collect();
    let c = (0..n).map(|_| next()).collect();
    let d = next();
    QuadraticForm::new(n, a, c, d).expect("normal draws are finite")
}

/// Shifts the first constraint that can be made active at the unconstrained
/// minimizer `b*` while keeping some bitstring strictly feasible for it.
/// Returns false when no constraint qualifies.
fn activate_constraint(inst: &mut QcqpInstance, epsilon: f64) -> Result<bool> {
    let b_star = diagonal_of(inst.objective())?.argmin();
    let diags = inst
        .constraints()
        .iter()
        .map(diagonal_of)
        .collect::<Result<Vec<_>>>()?;
    if diags.iter().any(|d| d.values()[b_star] > 0.0) {
        // The unconstrained minimizer is already cut off.
        return Ok(true);
    }
    for (m, diag) in diags.iter().enumerate() {
        let at_star = diag.values()[b_star];
        if at_star - diag.min() > epsilon {
            *inst.constraints_mut()[m].d_mut() += epsilon - at_star;
            return Ok(true);
        }
    }
    Ok(false)
}

pub fn gen_instance(n: usize, m: usize, seed: u64, ensure_active: bool) -> Result<QcqpInstance> {
    gen_instance_with(
        n,
        m,
        seed,
        &GenOptions {
            ensure_active,
            ..GenOptions::default()
        },
    )
}

pub fn gen_instance_with(n: usize, m: usize, seed: u64, opts: &GenOptions) -> Result<QcqpInstance> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let meta = InstanceMeta {
        seed: Some(seed),
        generator_version: GENERATOR_VERSION.to_string(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..opts.max_attempts.max(1) {
        let objective = draw_form(n, &mut rng);
        let constraints = (0..m).map(|_| draw_form(n, &mut rng)).collect();
        let mut inst = QcqpInstance::new(objective, constraints)?.with_meta(meta.clone());
        if m == 0 {
            return Ok(inst);
        }
        if opts.ensure_active && !activate_constraint(&mut inst, opts.epsilon)? {
            continue;
        }
        let lp = lp_solve(&inst)?;
        let Some(duals) = lp.duals else {
            continue;
        };
        if opts.ensure_active && !duals.iter().any(|&l| l > opts.active_dual_threshold) {
            continue;
        }
        return Ok(inst);
    }
    Err(Error::GenerationBudgetExhausted {
        attempts: opts.max_attempts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::stochastic_feasible;

    #[test]
    fn same_seed_same_instance() {
        let a = gen_instance(3, 2, 42, true).unwrap();
        let b = gen_instance(3, 2, 42, true).unwrap();
        assert_eq!(a, b);
        let c = gen_instance(3, 2, 43, true).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn unconstrained_needs_no_adjustment() {
        let inst = gen_instance(4, 0, 5, true).unwrap();
        assert_eq!(inst.m(), 0);
        assert_eq!(inst.meta().unwrap().seed, Some(5));
        // The first draw is returned untouched.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(inst.objective(), &draw_form(4, &mut rng));
    }

    #[test]
    fn active_instances_have_positive_dual() {
        for seed in 0..20 {
            let inst = gen_instance(2, 1, seed, true).unwrap();
            let lp = lp_solve(&inst).unwrap();
            assert!(lp.duals.unwrap()[0] > 1e-6, "seed {seed}");
        }
    }

    #[test]
    fn generated_instances_are_stochastically_feasible() {
        for seed in 0..10 {
            let inst = gen_instance(3, 3, seed, false).unwrap();
            assert!(stochastic_feasible(&inst).unwrap());
        }
    }

    #[test]
    fn zero_bits_rejected() {
        assert!(gen_instance(0, 1, 1, false).is_err());
    }

    #[test]
    fn impossible_budget_reports_error() {
        let opts = GenOptions {
            ensure_active: true,
            active_dual_threshold: f64::INFINITY,
            max_attempts: 3,
            ..GenOptions::default()
        };
        assert!(matches!(
            gen_instance_with(2, 1, 1, &opts),
            Err(Error::GenerationBudgetExhausted { attempts: 3 })
        ));
    }
}
