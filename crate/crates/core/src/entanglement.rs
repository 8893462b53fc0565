//! Bipartite entanglement of pure states: reduced density matrices,
//! von Neumann entropy in bits and Schmidt rank.
//!
//! Amplitudes are reshaped into a `2^|A| x 2^|B|` matrix whose row index packs
//! the block qubits (block[0] is the low bit) and whose column index packs the
//! complement qubits in increasing order.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::{Error, Result, StateVector};

/// Largest block for an explicit reduced density matrix (8192 x 8192).
pub const DENSITY_BLOCK_CAP: usize = 13;
/// Singular values at or below this are outside the Schmidt support.
pub const SCHMIDT_CUTOFF: f64 = 1e-8;
/// Eigenvalues at or below this do not contribute to the entropy.
pub const EIGENVALUE_FLOOR: f64 = 1e-12;
/// Negative eigenvalues down to this are rounding noise and clamped to zero.
pub const NEGATIVE_TOLERANCE: f64 = 1e-10;

const NORM_TOLERANCE: f64 = 1e-10;

/// A qubit block of an `n`-qubit register; the complement is implied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    n: usize,
    block: Vec<usize>,
}

impl Bipartition {
    pub fn new(n: usize, mut block: Vec<usize>) -> Result<Self> {
        block.sort_unstable();
        block.dedup();
        if let Some(&q) = block.iter().find(|&&q| q >= n) {
            return Err(Error::QubitOutOfRange { index: q, n });
        }
        if block.is_empty() || block.len() == n {
            return Err(Error::InvalidArgument(format!(
                "block must be a non-empty proper subset of {n} qubits"
            )));
        }
        Ok(Self { n, block })
    }

    /// First `ceil(n/2)` qubits versus the rest.
    pub fn first_half(n: usize) -> Result<Self> {
        Self::new(n, (0..n.div_ceil(2)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn block(&self) -> &[usize] {
        &self.block
    }

    pub fn complement(&self) -> Vec<usize> {
        (0..self.n).filter(|q| !self.block.contains(q)).collect()
    }

    pub fn swapped(&self) -> Self {
        Self {
            n: self.n,
            block: self.complement(),
        }
    }
}

/// Entropy and Schmidt rank of one state across one bipartition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementRecord {
    pub entropy_bits: f64,
    pub schmidt_rank: usize,
    pub log2_chi: f64,
}

fn check_state(state: &StateVector, part: &Bipartition) -> Result<()> {
    if state.len() != 1 << part.n {
        return Err(Error::DimensionMismatch {
            expected: 1 << part.n,
            found: state.len(),
        });
    }
    state.check_normalized(NORM_TOLERANCE)
}

/// Reshapes amplitudes into the block x complement matrix.
pub fn amplitude_matrix(state: &StateVector, part: &Bipartition) -> Result<DMatrix<f64>> {
    if state.len() != 1 << part.n {
        return Err(Error::DimensionMismatch {
            expected: 1 << part.n,
            found: state.len(),
        });
    }
    let rest = part.complement();
    let rows = 1usize << part.block.len();
    let cols = 1usize << rest.len();
    let spread = |packed: usize, qubits: &[usize]| -> usize {
        qubits
            .iter()
            .enumerate()
            .filter(|(bit, _)| (packed >> bit) & 1 == 1)
            .fold(0, |x, (_, &q)| x | (1 << q))
    };
    let row_bits: Vec<usize> = (0..rows).map(|r| spread(r, &part.block)).collect();
    let col_bits: Vec<usize> = (0..cols).map(|c| spread(c, &rest)).collect();
    let amps = state.as_slice();
    Ok(DMatrix::from_fn(rows, cols, |r, c| {
        amps[row_bits[r] | col_bits[c]]
    }))
}

/// `rho_A = Tr_B |psi><psi| = M M^T` for the reshaped amplitude matrix `M`.
pub fn reduced_density(state: &StateVector, part: &Bipartition) -> Result<DMatrix<f64>> {
    if part.block.len() > DENSITY_BLOCK_CAP {
        return Err(Error::SizeCap {
            what: "reduced_density block",
            n: part.block.len(),
            cap: DENSITY_BLOCK_CAP,
        });
    }
    check_state(state, part)?;
    let m = amplitude_matrix(state, part)?;
    Ok(&m * m.transpose())
}

/// Entropy in bits of an eigenvalue spectrum, after clamping and flooring.
fn spectrum_entropy(values: impl IntoIterator<Item = f64>) -> Result<f64> {
    let mut entropy = 0.0;
    for lambda in values {
        if lambda < -NEGATIVE_TOLERANCE {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {lambda:e}"
            )));
        }
        if lambda > EIGENVALUE_FLOOR {
            entropy -= lambda * lambda.log2();
        }
    }
    Ok(entropy.max(0.0))
}

/// `S = -sum lambda log2 lambda` over eigenvalues of `rho` above `1e-12`.
pub fn von_neumann_entropy(rho: &DMatrix<f64>) -> Result<f64> {
    if !rho.is_square() {
        return Err(Error::InvalidDensity("matrix is not square".into()));
    }
    let asym = (rho - rho.transpose()).amax();
    if asym > 1e-10 {
        return Err(Error::InvalidDensity(format!("asymmetry {asym:e}")));
    }
    let trace = rho.trace();
    if (trace - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidDensity(format!("trace {trace}")));
    }
    let values = SymmetricEigen::new(rho.clone()).eigenvalues;
    spectrum_entropy(values.iter().copied())
}

/// Singular values of the reshaped amplitude matrix, descending.
pub fn schmidt_coefficients(state: &StateVector, part: &Bipartition) -> Result<Vec<f64>> {
    let m = amplitude_matrix(state, part)?;
    // Same singular values either way; decompose the wide orientation.
    let m = if m.nrows() > m.ncols() {
        m.transpose()
    } else {
        m
    };
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Number of Schmidt coefficients above `cutoff`.
pub fn schmidt_rank(state: &StateVector, part: &Bipartition, cutoff: f64) -> Result<usize> {
    Ok(schmidt_coefficients(state, part)?
        .iter()
        .filter(|&&sv| sv > cutoff)
        .count())
}

/// Entropy and Schmidt rank from one singular value decomposition.
///
/// The eigenvalues of `rho_A` are the squared Schmidt coefficients, so the
/// density matrix itself is never formed here.
pub fn bipartition_entropy(state: &StateVector, part: &Bipartition) -> Result<EntanglementRecord> {
    check_state(state, part)?;
    let sv = schmidt_coefficients(state, part)?;
    log::trace!("schmidt spectrum {:?}", &sv[..sv.len().min(8)]);
    let entropy_bits = spectrum_entropy(sv.iter().map(|s| s * s))?;
    let schmidt_rank = sv.iter().filter(|&&s| s > SCHMIDT_CUTOFF).count().max(1);
    Ok(EntanglementRecord {
        entropy_bits,
        schmidt_rank,
        log2_chi: (schmidt_rank as f64).log2(),
    })
}
