//! Adiabatic Grover Hamiltonian `H(s) = (1 - s)(I - |s><s|) + s (I - |x0><x0|)`.
//!
//! `H(s)` leaves `span{|x0>, |r>}` invariant, where
//! `|r> = (|s> - a|x0>) / b`, `a = <x0|s> = 2^{-n/2}` and `b = sqrt(1 - a^2)`.
//! In that basis
//!
//! ```text
//! H_eff = [ (1-s) b^2        -(1-s) a b    ]
//!         [ -(1-s) a b       1 - (1-s) b^2 ]
//! ```
//!
//! with eigenvalues `1/2 -+ g/2`, `g = sqrt(1 - 4 s (1-s) (1 - 1/N))`. Every
//! vector orthogonal to the subspace has eigenvalue 1.
//!
//! The ground state is a combination `gamma |x0> + delta |s>` of two product
//! states, so across any cut it has Schmidt rank at most two and its entropy
//! follows from a 2x2 Gram-matrix spectrum.

use nalgebra::{DMatrix, DVector, Matrix2};

use crate::eigensolver::dense_spectrum;
use crate::{Error, Result, StateVector, DENSE_CAP, STATE_VECTOR_CAP};

/// Largest `n` for the closed form; `2^{-n}` must stay representable.
pub const CLOSED_FORM_CAP: usize = 1000;

fn check(s: f64, n: usize) -> Result<()> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!("s = {s} outside [0, 1]")));
    }
    if !(2..=CLOSED_FORM_CAP).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "Grover model needs 2 <= n <= {CLOSED_FORM_CAP}, got {n}"
        )));
    }
    Ok(())
}

/// `(a, b)`: overlap `<x0|s>` and the weight of `|r>` in `|s>`.
fn overlaps(n: usize) -> (f64, f64) {
    let a = 2f64.powf(-(n as f64) / 2.0);
    (a, (1.0 - a * a).sqrt())
}

/// `H(s)` restricted to `span{|x0>, |r>}`.
pub fn grover_effective(s: f64, n: usize) -> Result<Matrix2<f64>> {
    check(s, n)?;
    let (a, b) = overlaps(n);
    let p = (1.0 - s) * b * b;
    let q = -(1.0 - s) * a * b;
    Ok(Matrix2::new(p, q, q, 1.0 - p))
}

/// Gap between the two lowest levels in closed form.
pub fn grover_gap(s: f64, n: usize) -> Result<f64> {
    check(s, n)?;
    let (_, b) = overlaps(n);
    Ok((1.0 - 4.0 * s * (1.0 - s) * b * b).max(0.0).sqrt())
}

/// Ground state of the effective model, in two bases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroverGround {
    pub energy: f64,
    pub excited_energy: f64,
    /// Coefficient on `|x0>` in the orthonormal basis; non-negative.
    pub c_x0: f64,
    /// Coefficient on `|r>` in the orthonormal basis.
    pub c_r: f64,
    /// `psi = gamma |x0> + delta |s>`.
    pub gamma: f64,
    pub delta: f64,
}

pub fn grover_ground(s: f64, n: usize) -> Result<GroverGround> {
    let h = grover_effective(s, n)?;
    let (a, b) = overlaps(n);
    let (p, q, r) = (h[(0, 0)], h[(0, 1)], h[(1, 1)]);
    let half_gap = 0.5 * grover_gap(s, n)?;
    let mean = 0.5 * (p + r);
    let e1 = mean + half_gap;
    // det = s (1-s) b^2; avoids cancellation in mean - half_gap.
    let e0 = if e1 > 0.0 { (p * r - q * q) / e1 } else { 0.0 };
    // Second-row null vector (r - e0, -q) has non-negative entries.
    let (x, y) = (r - e0, -q);
    let norm = x.hypot(y);
    let (c_x0, c_r) = (x / norm, y / norm);
    Ok(GroverGround {
        energy: e0,
        excited_energy: e1,
        c_x0,
        c_r,
        gamma: c_x0 - c_r * a / b,
        delta: c_r / b,
    })
}

/// Explicit ground vector for marked state `x0` (`n <= 20`).
pub fn grover_ground_state(s: f64, n: usize, x0: usize) -> Result<StateVector> {
    if n > STATE_VECTOR_CAP {
        return Err(Error::SizeCap {
            what: "grover_ground_state",
            n,
            cap: STATE_VECTOR_CAP,
        });
    }
    let g = grover_ground(s, n)?;
    check_marked(n, x0)?;
    let (a, _) = overlaps(n);
    let mut amps = vec![g.delta * a; 1 << n];
    amps[x0] += g.gamma;
    StateVector::from_amplitudes(amps)
}

fn check_marked(n: usize, x0: usize) -> Result<()> {
    if x0 >= 1 << n {
        return Err(Error::InvalidArgument(format!(
            "marked state {x0} out of range for n = {n}"
        )));
    }
    Ok(())
}

/// Ground-state entropy (bits) of a block of `block_size` qubits.
///
/// With `p = <x0_A|s_A> = 2^{-k/2}` and `q = <x0_B|s_B> = 2^{-(n-k)/2}` the
/// nonzero spectrum of `rho_A` is that of `G_A D G_B D` with
/// `D = diag(gamma, delta)`; its determinant is
/// `(1 - p^2)(1 - q^2) gamma^2 delta^2`.
pub fn grover_entropy(s: f64, n: usize, block_size: usize) -> Result<f64> {
    check(s, n)?;
    if block_size == 0 || block_size >= n {
        return Err(Error::InvalidArgument(format!(
            "block size {block_size} must lie in [1, {}]",
            n - 1
        )));
    }
    let g = grover_ground(s, n)?;
    let p2 = 2f64.powi(-(block_size as i32));
    let q2 = 2f64.powi(-((n - block_size) as i32));
    let overlap = (p2 * q2).sqrt();
    let trace = g.gamma * g.gamma + g.delta * g.delta + 2.0 * g.gamma * g.delta * overlap;
    let det = (1.0 - p2) * (1.0 - q2) * (g.gamma * g.delta).powi(2);
    let disc = (trace * trace - 4.0 * det).max(0.0).sqrt();
    let hi = 0.5 * (trace + disc);
    let lo = if hi > 0.0 { det / hi } else { 0.0 };
    Ok([hi, lo]
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.log2())
        .sum::<f64>()
        .max(0.0))
}

/// Explicit `2^n x 2^n` matrix of the Grover Hamiltonian.
pub fn grover_dense_matrix(s: f64, n: usize, x0: usize) -> Result<DMatrix<f64>> {
    check(s, n)?;
    if n > DENSE_CAP {
        return Err(Error::SizeCap {
            what: "grover dense oracle",
            n,
            cap: DENSE_CAP,
        });
    }
    check_marked(n, x0)?;
    let dim = 1usize << n;
    let uniform = DVector::from_element(dim, (dim as f64).sqrt().recip());
    let mut m = DMatrix::identity(dim, dim) - (&uniform * uniform.transpose()) * (1.0 - s);
    m[(x0, x0)] -= s;
    Ok(m)
}

/// Full spectrum (ascending) and ground vector by dense diagonalization,
/// with the ground vector's amplitude on `x0` made non-negative.
pub fn grover_dense_oracle(s: f64, n: usize, x0: usize) -> Result<(Vec<f64>, StateVector)> {
    let (values, vectors) = dense_spectrum(grover_dense_matrix(s, n, x0)?);
    let mut ground: Vec<f64> = vectors.column(0).iter().copied().collect();
    if ground[x0] < 0.0 {
        ground.iter_mut().for_each(|a| *a = -*a);
    }
    Ok((values, StateVector::from_amplitudes(ground)?))
}

/// One row of a closed-form scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroverPoint {
    pub n: usize,
    pub s: f64,
    pub gap: f64,
    pub entropy_bits: f64,
}

pub fn grover_scan(n: usize, grid: &[f64], block_size: usize) -> Result<Vec<GroverPoint>> {
    grid.iter()
        .map(|&s| {
            Ok(GroverPoint {
                n,
                s,
                gap: grover_gap(s, n)?,
                entropy_bits: grover_entropy(s, n, block_size)?,
            })
        })
        .collect()
}
