//! Constrained variational quantum eigensolver for stochastic binary QCQPs.
//!
//! The crate simulates a layered R_Y/CNOT circuit as a dense statevector and
//! trains it by dual decomposition so that measuring the circuit yields
//! bitstrings that minimize a quadratic objective subject to quadratic
//! constraints holding in expectation. Exact oracles (an LP over outcome
//! PMFs and brute-force enumeration) are provided for verification.

pub mod document;
pub mod dual;
pub mod error;
pub mod generate;
pub mod oracle;
pub mod par;
pub mod problem;
pub mod sim;
pub mod simplex;
pub mod suite;
pub mod vqe;

pub use dual::{dual_step, lagrangian_observable, solve, DualConfig, DualState, SolveReport};
pub use error::{Error, Result};
pub use generate::gen_instance;
pub use oracle::{
    brute_force_solve, lp_solve, stochastic_feasible, BruteForceSolution, LpSolution,
};
pub use par::Execution;
pub use problem::{BitVector, QcqpInstance, QuadraticForm, SpinForm};
pub use sim::{
    diagonal_of, estimate_expectation, expectation, pauli_diagonal_of, sample, state_of,
    AnsatzConfig, DiagonalObservable, QuantumState,
};
pub use simplex::LpStatus;
pub use vqe::{gradient, minimize, GradientMode, VqeResult, VqeSettings};
