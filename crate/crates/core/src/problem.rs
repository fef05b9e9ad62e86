//! Binary quadratic forms, their spin (Ising) counterparts, and QCQP instances.
//!
//! Bit ordering is most-significant-first throughout the crate: bit `i` of an
//! `n`-bit vector sits at position `n - 1 - i` of the basis index, so the
//! bitstring `[1, 1, 0]` is basis index 6.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bitstring `b ∈ {0,1}ⁿ`, stored one bit per byte.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BitVector(Vec<u8>);

impl BitVector {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidArgument(format!(
                "bit value {bad} is not 0 or 1"
            )));
        }
        Ok(Self(bits))
    }

    /// The bitstring of basis index `k` on `n` bits (MSB first).
    pub fn from_index(k: usize, n: usize) -> Self {
        Self((0..n).map(|i| ((k >> (n - 1 - i)) & 1) as u8).collect())
    }

    pub fn to_index(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    /// Spin encoding `s_i = 1 − 2 b_i`.
    pub fn to_spins(&self) -> Vec<f64> {
        self.0.iter().map(|&b| 1.0 - 2.0 * b as f64).collect()
    }
}

impl std::fmt::Display for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// `f(b) = bᵀAb + bᵀc + d` with a dense, not necessarily symmetric, `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticForm {
    n: usize,
    /// Row-major `n × n`.
    a: Vec<f64>,
    c: Vec<f64>,
    d: f64,
}

impl QuadraticForm {
    pub fn new(n: usize, a: Vec<f64>, c: Vec<f64>, d: f64) -> Result<Self> {
        if a.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: a.len(),
                context: "quadratic matrix entries",
            });
        }
        if c.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: c.len(),
                context: "linear coefficient vector",
            });
        }
        if !a
            .iter()
            .chain(&c)
            .chain(std::iter::once(&d))
            .all(|v| v.is_finite())
        {
            return Err(Error::NonFinite("quadratic form"));
        }
        Ok(Self { n, a, c, d })
    }

    pub fn zeros(n: usize) -> Self {
        Self::constant(n, 0.0)
    }

    pub fn constant(n: usize, d: f64) -> Self {
        Self {
            n,
            a: vec![0.0; n * n],
            c: vec![0.0; n],
            d,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Row-major quadratic coefficients.
    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn a_at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub(crate) fn d_mut(&mut self) -> &mut f64 {
        &mut self.d
    }

    pub fn eval(&self, b: &BitVector) -> Result<f64> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: b.len(),
                context: "bit vector length",
            });
        }
        Ok(self.eval_bits(b.bits()))
    }

    /// Evaluates at the bitstring of basis index `k`.
    pub fn eval_index(&self, k: usize) -> f64 {
        let n = self.n;
        let bit = |i: usize| (k >> (n - 1 - i)) & 1 == 1;
        let mut value = 0.0;
        for i in (0..n).filter(|&i| bit(i)) {
            let row = &self.a[i * n..(i + 1) * n];
            for j in (0..n).filter(|&j| bit(j)) {
                value += row[j];
            }
        }
        for i in (0..n).filter(|&i| bit(i)) {
            value += self.c[i];
        }
        value + self.d
    }

    fn eval_bits(&self, bits: &[u8]) -> f64 {
        let n = self.n;
        let mut value = 0.0;
        for i in (0..n).filter(|&i| bits[i] == 1) {
            let row = &self.a[i * n..(i + 1) * n];
            for j in (0..n).filter(|&j| bits[j] == 1) {
                value += row[j];
            }
        }
        for i in (0..n).filter(|&i| bits[i] == 1) {
            value += self.c[i];
        }
        value + self.d
    }

    /// Same form with `A` replaced by `(A + Aᵀ)/2`; evaluates identically.
    pub fn symmetrized(&self) -> Self {
        let n = self.n;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = 0.5 * (self.a[i * n + j] + self.a[j * n + i]);
            }
        }
        Self {
            n,
            a,
            c: self.c.clone(),
            d: self.d,
        }
    }

    /// Rewrites the form over spins `s = 𝟙 − 2b`.
    ///
    /// The linear term uses the symmetric part of `A`, which reduces to
    /// `−½(A𝟙 + c)` when `A` is symmetric and stays exact when it is not.
    pub fn to_spin_form(&self) -> SpinForm {
        let n = self.n;
        let a_bar: Vec<f64> = self.a.iter().map(|v| 0.25 * v).collect();
        let mut c_bar = vec![0.0; n];
        for (i, ci) in c_bar.iter_mut().enumerate() {
            let row_sum: f64 = (0..n).map(|j| self.a[i * n + j]).sum();
            let col_sum: f64 = (0..n).map(|j| self.a[j * n + i]).sum();
            *ci = -0.5 * (0.5 * (row_sum + col_sum) + self.c[i]);
        }
        let total_a: f64 = self.a.iter().sum();
        let total_c: f64 = self.c.iter().sum();
        let d_bar = 0.25 * total_a + 0.5 * total_c + self.d;
        SpinForm {
            n,
            a_bar,
            c_bar,
            d_bar,
        }
    }
}

/// `f̄(s) = sᵀĀs + sᵀc̄ + d̄` over spins `s ∈ {±1}ⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinForm {
    n: usize,
    a_bar: Vec<f64>,
    c_bar: Vec<f64>,
    d_bar: f64,
}

impl SpinForm {
    pub fn new(n: usize, a_bar: Vec<f64>, c_bar: Vec<f64>, d_bar: f64) -> Result<Self> {
        // Reuse the shape and finiteness checks of the binary form.
        let checked = QuadraticForm::new(n, a_bar, c_bar, d_bar)?;
        Ok(Self {
            n,
            a_bar: checked.a,
            c_bar: checked.c,
            d_bar: checked.d,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a_bar(&self) -> &[f64] {
        &self.a_bar
    }

    pub fn c_bar(&self) -> &[f64] {
        &self.c_bar
    }

    pub fn d_bar(&self) -> f64 {
        self.d_bar
    }

    pub fn eval(&self, spins: &[f64]) -> Result<f64> {
        if spins.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: spins.len(),
                context: "spin vector length",
            });
        }
        let n = self.n;
        let mut value = 0.0;
        for i in 0..n {
            for j in 0..n {
                value += self.a_bar[i * n + j] * spins[i] * spins[j];
            }
        }
        value += self
            .c_bar
            .iter()
            .zip(spins)
            .map(|(c, s)| c * s)
            .sum::<f64>();
        Ok(value + self.d_bar)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub seed: Option<u64>,
    #[serde(rename = "generator-version")]
    pub generator_version: String,
}

/// `min f₀(b)  s.t.  f_m(b) ≤ 0, m = 1..M` over `b ∈ {0,1}ⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct QcqpInstance {
    n: usize,
    objective: QuadraticForm,
    constraints: Vec<QuadraticForm>,
    meta: Option<InstanceMeta>,
}

impl QcqpInstance {
    pub fn new(objective: QuadraticForm, constraints: Vec<QuadraticForm>) -> Result<Self> {
        let n = objective.n();
        if n == 0 {
            return Err(Error::InvalidArgument(
                "instance needs at least one bit".into(),
            ));
        }
        if let Some(bad) = constraints.iter().find(|f| f.n() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: bad.n(),
                context: "constraint bit count",
            });
        }
        Ok(Self {
            n,
            objective,
            constraints,
            meta: None,
        })
    }

    pub fn with_meta(mut self, meta: InstanceMeta) -> Self {
        self.meta = Some(meta);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of constraints `M`.
    pub fn m(&self) -> usize {
        self.constraints.len()
    }

    pub fn objective(&self) -> &QuadraticForm {
        &self.objective
    }

    pub fn constraints(&self) -> &[QuadraticForm] {
        &self.constraints
    }

    pub(crate) fn constraints_mut(&mut self) -> &mut [QuadraticForm] {
        &mut self.constraints
    }

    pub fn meta(&self) -> Option<&InstanceMeta> {
        self.meta.as_ref()
    }

    /// Whether `b` satisfies every constraint deterministically.
    pub fn is_feasible(&self, b: &BitVector) -> Result<bool> {
        for f in &self.constraints {
            if f.eval(b)? > 0.0 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
