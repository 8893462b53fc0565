//! Exact Cover adiabatic interpolation toolkit.
//!
//! The problem Hamiltonian counts violated Exact Cover clauses, the driver is a
//! degree-weighted transverse field, and `H(s) = (1 - s) H0 + s HP` is applied
//! matrix-free to real state vectors. On top of that sit a Lanczos solver for
//! the two lowest eigenpairs, bipartite entanglement measures, the s-grid sweep
//! with ensemble statistics and fits, and a closed-form treatment of the
//! adiabatic Grover Hamiltonian.
//!
//! Bit convention used everywhere: bit `b` of a basis index (`x >> b & 1`)
//! holds variable / qubit `b`, so qubit 0 is the least-significant bit.

pub mod eigensolver;
pub mod entanglement;
mod error;
pub mod grover;
pub mod hamiltonian;
pub mod instances;
pub mod state;
pub mod sweep;

pub use error::{Error, Result};
pub use state::StateVector;

/// Largest qubit count for explicit 2^n state vectors.
pub const STATE_VECTOR_CAP: usize = 20;
/// Largest qubit count for explicit dense 2^n x 2^n matrices.
pub const DENSE_CAP: usize = 12;
