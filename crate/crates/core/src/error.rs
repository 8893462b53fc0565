use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid clause ({0}, {1}, {2}): indices must be pairwise distinct")]
    InvalidClause(usize, usize, usize),

    #[error("qubit index {index} out of range for n = {n}")]
    QubitOutOfRange { index: usize, n: usize },

    #[error("{what}: n = {n} exceeds the cap of {cap}")]
    SizeCap {
        what: &'static str,
        n: usize,
        cap: usize,
    },

    #[error("instance generation for n = {n} failed after {restarts} restarts")]
    GenerationFailed { n: usize, restarts: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error(
        "eigensolver did not converge after {iterations} iterations \
         (best residuals {residual0:.3e}, {residual1:.3e})"
    )]
    NonConvergence {
        iterations: usize,
        residual0: f64,
        residual1: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("instance {instance} failed at s = {s}: {source}")]
    Sweep {
        instance: u64,
        s: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("endpoint invariant violated for instance {instance}: {detail}")]
    EndpointInvariant { instance: u64, detail: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}
