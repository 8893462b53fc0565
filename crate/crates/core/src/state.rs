//! Real amplitude vectors over the computational basis.

use rand::Rng;

use crate::{Error, Result};

/// Real amplitudes indexed by computational basis state.
///
/// `H(s)` is real symmetric in the computational basis, so complex
/// amplitudes are never needed on the Exact Cover path.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<f64>,
}

impl StateVector {
    /// Wraps raw amplitudes; the length must be a power of two (at least 2).
    pub fn from_amplitudes(amplitudes: Vec<f64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "state length {len} is not a power of two >= 2"
            )));
        }
        if amplitudes.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument("non-finite amplitude".into()));
        }
        Ok(Self { amplitudes })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            amplitudes: vec![0.0; 1 << n],
        }
    }

    /// Computational basis state `|x>`.
    pub fn basis(n: usize, x: usize) -> Self {
        let mut v = Self::zeros(n);
        v.amplitudes[x] = 1.0;
        v
    }

    /// Equal superposition `2^{-n/2} sum_x |x>`.
    pub fn uniform(n: usize) -> Self {
        let dim = 1usize << n;
        Self {
            amplitudes: vec![(dim as f64).sqrt().recip(); dim],
        }
    }

    /// Uniformly random direction (entries drawn from [-1, 1) then normalized).
    pub fn random_unit<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut v: Vec<f64> = (0..1usize << n)
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let norm = crate::state::norm(&v);
        v.iter_mut().for_each(|a| *a /= norm);
        Self { amplitudes: v }
    }

    pub fn num_qubits(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.amplitudes
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    pub fn dot(&self, other: &StateVector) -> f64 {
        dot(&self.amplitudes, &other.amplitudes)
    }

    pub fn normalize(&mut self) {
        let norm = self.norm();
        if norm > 0.0 {
            self.amplitudes.iter_mut().for_each(|a| *a /= norm);
        }
    }

    /// Checks `| ||v|| - 1 | <= tol`.
    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        let norm = self.norm();
        if (norm - 1.0).abs() > tol {
            return Err(Error::NotNormalized { norm });
        }
        Ok(())
    }

    /// Relabels basis states `x <-> x XOR 2^qubit` (a local bit flip).
    pub fn flip_qubit(&self, qubit: usize) -> Self {
        let mask = 1usize << qubit;
        let amplitudes = (0..self.len()).map(|x| self.amplitudes[x ^ mask]).collect();
        Self { amplitudes }
    }
}

/// Dot product with eight independent accumulators (vectorizes; the
/// summation order is fixed, so results are deterministic).
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 8];
    let (ca, cb) = (a.chunks_exact(8), b.chunks_exact(8));
    let tail: f64 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    acc.iter().sum::<f64>() + tail
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += alpha * x);
}
