//! Dense statevector simulation of the R_Y / CNOT ansatz and diagonal
//! observables.
//!
//! Qubit `i` corresponds to bit `i` of a [`BitVector`], i.e. to the mask
//! `1 << (n - 1 - i)` of the basis index.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::problem::{BitVector, QuadraticForm, SpinForm};

/// Largest qubit count for which full diagonals are built by default.
pub const DEFAULT_QUBIT_LIMIT: usize = 20;

const NORM_TOL: f64 = 1e-10;

#[inline]
fn mask(n: usize, qubit: usize) -> usize {
    1 << (n - 1 - qubit)
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// The computational basis state `e_k`.
    pub fn basis(n: usize, k: usize) -> Result<Self> {
        let len = 1usize << n;
        if k >= len {
            return Err(Error::InvalidArgument(format!(
                "basis index {k} out of range for {n} qubits"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); len];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amplitudes })
    }

    pub fn from_amplitudes(n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                actual: amplitudes.len(),
                context: "amplitude vector",
            });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidArgument(format!(
                "state has squared norm {norm}, expected 1"
            )));
        }
        Ok(Self { n, amplitudes })
    }

    /// Builds a state from a nonnegative PMF using amplitudes `√p_k`.
    pub fn from_pmf(n: usize, pmf: &[f64]) -> Result<Self> {
        if pmf.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidArgument(
                "pmf entries must be nonnegative".into(),
            ));
        }
        let amplitudes = pmf.iter().map(|&p| Complex64::new(p.sqrt(), 0.0)).collect();
        Self::from_amplitudes(n, amplitudes)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Outcome PMF `p_k = |x_k|²`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn apply_ry(&mut self, qubit: usize, angle: f64) {
        let (s, c) = (0.5 * angle).sin_cos();
        let m = mask(self.n, qubit);
        for k0 in (0..self.amplitudes.len()).filter(|k| k & m == 0) {
            let k1 = k0 | m;
            let a0 = self.amplitudes[k0];
            let a1 = self.amplitudes[k1];
            self.amplitudes[k0] = a0 * c - a1 * s;
            self.amplitudes[k1] = a0 * s + a1 * c;
        }
    }

    pub fn apply_cx(&mut self, control: usize, target: usize) {
        let (mc, mt) = (mask(self.n, control), mask(self.n, target));
        for k in (0..self.amplitudes.len()).filter(|k| k & mc != 0 && k & mt == 0) {
            self.amplitudes.swap(k, k | mt);
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Entanglement {
    /// CNOT from `i` to `j` for every `i < j`, ascending.
    #[default]
    Full,
    /// CNOT from `i` to `i + 1`.
    Linear,
}

/// Layered ansatz: R_Y on every qubit, then an entangling block, repeated
/// `layers` times, optionally closed by one more rotation layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnsatzConfig {
    pub n: usize,
    pub layers: usize,
    pub final_rotation: bool,
    pub entanglement: Entanglement,
}

impl AnsatzConfig {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            layers: 3,
            final_rotation: true,
            entanglement: Entanglement::Full,
        }
    }

    pub fn with_layers(mut self, layers: usize) -> Self {
        self.layers = layers;
        self
    }

    pub fn with_final_rotation(mut self, final_rotation: bool) -> Self {
        self.final_rotation = final_rotation;
        self
    }

    pub fn with_entanglement(mut self, entanglement: Entanglement) -> Self {
        self.entanglement = entanglement;
        self
    }

    pub fn rotation_layers(&self) -> usize {
        self.layers + usize::from(self.final_rotation)
    }

    pub fn num_params(&self) -> usize {
        self.rotation_layers() * self.n
    }

    pub fn entangler_pairs(&self) -> Vec<(usize, usize)> {
        match self.entanglement {
            Entanglement::Full => (0..self.n)
                .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
                .collect(),
            Entanglement::Linear => (1..self.n).map(|i| (i - 1, i)).collect(),
        }
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.num_params() {
            return Err(Error::DimensionMismatch {
                expected: self.num_params(),
                actual: theta.len(),
                context: "ansatz parameter vector",
            });
        }
        Ok(())
    }
}

/// `|x(θ)⟩ = U(θ)|0…0⟩`.
pub fn state_of(cfg: &AnsatzConfig, theta: &[f64]) -> Result<QuantumState> {
    cfg.check_theta(theta)?;
    let mut state = QuantumState::basis(cfg.n, 0)?;
    let pairs = cfg.entangler_pairs();
    for layer in 0..cfg.rotation_layers() {
        for q in 0..cfg.n {
            state.apply_ry(q, theta[layer * cfg.n + q]);
        }
        if layer < cfg.layers {
            for &(c, t) in &pairs {
                state.apply_cx(c, t);
            }
        }
    }
    Ok(state)
}

/// Real-amplitude fast path of [`state_of`]; R_Y and CNOT never leave the
/// reals. `pairs` must be `cfg.entangler_pairs()`.
pub(crate) fn real_state_into(
    cfg: &AnsatzConfig,
    pairs: &[(usize, usize)],
    theta: &[f64],
    amps: &mut [f64],
) {
    let n = cfg.n;
    amps.fill(0.0);
    amps[0] = 1.0;
    for layer in 0..cfg.rotation_layers() {
        for q in 0..n {
            let (s, c) = (0.5 * theta[layer * n + q]).sin_cos();
            let m = mask(n, q);
            // Walk pairs (k0, k0 | m) block by block.
            let mut base = 0;
            while base < amps.len() {
                for k0 in base..base + m {
                    let k1 = k0 | m;
                    let a0 = amps[k0];
                    let a1 = amps[k1];
                    amps[k0] = c * a0 - s * a1;
                    amps[k1] = s * a0 + c * a1;
                }
                base += 2 * m;
            }
        }
        if layer < cfg.layers {
            for &(ctl, tgt) in pairs {
                let (mc, mt) = (mask(n, ctl), mask(n, tgt));
                for k in 0..amps.len() {
                    if k & mc != 0 && k & mt == 0 {
                        amps.swap(k, k | mt);
                    }
                }
            }
        }
    }
}

/// A diagonal Hamiltonian given by its eigenvalues `values[k] = f(bits(k))`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalObservable {
    n: usize,
    values: Vec<f64>,
}

impl DiagonalObservable {
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                actual: values.len(),
                context: "observable diagonal",
            });
        }
        Ok(Self { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Lowest index attaining the minimum.
    pub fn argmin(&self) -> usize {
        let mut best = 0;
        for (k, &v) in self.values.iter().enumerate() {
            if v < self.values[best] {
                best = k;
            }
        }
        best
    }

    /// `Σ_k probs[k] · values[k]`.
    pub fn expectation_under(&self, probs: &[f64]) -> f64 {
        probs.iter().zip(&self.values).map(|(p, v)| p * v).sum()
    }

    /// `self + weight · other`, entrywise.
    pub fn add_scaled(&mut self, weight: f64, other: &DiagonalObservable) -> Result<()> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: other.n,
                context: "observable qubit count",
            });
        }
        for (v, o) in self.values.iter_mut().zip(&other.values) {
            *v += weight * o;
        }
        Ok(())
    }
}

fn check_limit(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::TooManyQubits { n, limit });
    }
    Ok(())
}

/// Diagonal of `H` by direct evaluation of `f` at every basis index.
pub fn diagonal_of(form: &QuadraticForm) -> Result<DiagonalObservable> {
    diagonal_of_with(form, DEFAULT_QUBIT_LIMIT, Execution::default())
}

pub fn diagonal_of_with(
    form: &QuadraticForm,
    limit: usize,
    exec: Execution,
) -> Result<DiagonalObservable> {
    check_limit(form.n(), limit)?;
    let mut values = vec![0.0; 1 << form.n()];
    par::fill_indexed(exec, &mut values, |k| form.eval_index(k));
    Ok(DiagonalObservable {
        n: form.n(),
        values,
    })
}

/// Diagonal of `Σ Ā_ij Z_i Z_j + Σ c̄_i Z_i + d̄ I`, accumulated term by term.
pub fn pauli_diagonal_of(spin: &SpinForm) -> Result<DiagonalObservable> {
    pauli_diagonal_of_with(spin, DEFAULT_QUBIT_LIMIT)
}

pub fn pauli_diagonal_of_with(spin: &SpinForm, limit: usize) -> Result<DiagonalObservable> {
    let n = spin.n();
    check_limit(n, limit)?;
    let mut values = vec![spin.d_bar(); 1 << n];
    // Z_i Z_j |k⟩ = (−1)^{bit_i ⊕ bit_j} |k⟩, and Z_i Z_i = I.
    for i in 0..n {
        for j in 0..n {
            let coeff = spin.a_bar()[i * n + j];
            if coeff == 0.0 {
                continue;
            }
            let m = mask(n, i) | mask(n, j);
            let m = if i == j { 0 } else { m };
            for (k, v) in values.iter_mut().enumerate() {
                let parity = (k & m).count_ones() & 1;
                *v += if parity == 0 { coeff } else { -coeff };
            }
        }
    }
    for i in 0..n {
        let coeff = spin.c_bar()[i];
        if coeff == 0.0 {
            continue;
        }
        let m = mask(n, i);
        for (k, v) in values.iter_mut().enumerate() {
            *v += if k & m == 0 { coeff } else { -coeff };
        }
    }
    Ok(DiagonalObservable { n, values })
}

/// `⟨x|H|x⟩ = Σ_k |x_k|² values[k]`.
pub fn expectation(state: &QuantumState, obs: &DiagonalObservable) -> Result<f64> {
    if state.n() != obs.n() {
        return Err(Error::DimensionMismatch {
            expected: obs.n(),
            actual: state.n(),
            context: "state qubit count",
        });
    }
    Ok(state
        .amplitudes()
        .iter()
        .zip(obs.values())
        .map(|(a, v)| a.norm_sqr() * v)
        .sum())
}

/// Draws `shots` basis indices i.i.d. from `probs` (need not be normalized).
pub(crate) fn sample_from_pmf(probs: &[f64], shots: usize, seed: u64) -> Vec<usize> {
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;
    let last_nonzero = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..shots)
        .map(|_| {
            let u: f64 = rng.random::<f64>() * total;
            // First index whose cumulative mass exceeds u.
            cdf.partition_point(|&c| c <= u).min(last_nonzero)
        })
        .collect()
}

/// Simulated computational-basis measurements, deterministic in `seed`.
pub fn sample(state: &QuantumState, shots: usize, seed: u64) -> Vec<BitVector> {
    sample_from_pmf(&state.probabilities(), shots, seed)
        .into_iter()
        .map(|k| BitVector::from_index(k, state.n()))
        .collect()
}

/// Sample mean of `f` over `shots` measurements.
pub fn estimate_expectation(
    state: &QuantumState,
    form: &QuadraticForm,
    shots: usize,
    seed: u64,
) -> Result<f64> {
    if form.n() != state.n() {
        return Err(Error::DimensionMismatch {
            expected: state.n(),
            actual: form.n(),
            context: "form bit count",
        });
    }
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    Ok(estimate_expectation_from_pmf(
        &state.probabilities(),
        form,
        shots,
        seed,
    ))
}

/// Sample mean of `f` over `shots` draws from `probs`.
pub(crate) fn estimate_expectation_from_pmf(
    probs: &[f64],
    form: &QuadraticForm,
    shots: usize,
    seed: u64,
) -> f64 {
    let draws = sample_from_pmf(probs, shots, seed);
    // Accumulate deviations from the first draw so degenerate and constant
    // cases come out exact.
    let first = form.eval_index(draws[0]);
    let deviation: f64 = draws.iter().map(|&k| form.eval_index(k) - first).sum();
    first + deviation / shots as f64
}
