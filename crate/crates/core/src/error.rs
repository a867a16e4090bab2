use thiserror::Error;

/// Errors raised by the linear-algebra oracle, the simulator and the pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("non-finite value at position {0}")]
    NonFinite(usize),

    #[error("zero matrix has no retained spectrum")]
    ZeroMatrix,

    #[error("zero vector cannot be encoded")]
    ZeroVector,

    #[error("ill-conditioned OLR limit: retained singular value {0:e} with alpha = 0")]
    IllConditioned(f64),

    #[error("vector is not unit-normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("alpha grid is empty")]
    EmptyGrid,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid register layout: {0}")]
    Layout(String),

    #[error("unknown register `{0}`")]
    UnknownRegister(String),

    #[error("matrix is not unitary (deviation {0:e})")]
    NonUnitary(f64),

    #[error("post-selection on null branch (probability {0:e})")]
    NullBranch(f64),

    #[error("post-selection starved (probability {0:e})")]
    Starved(f64),

    #[error("phase wraparound: max eigenphase {0} exceeds one turn")]
    Wraparound(f64),

    #[error("clock register `{0}` is not in |0…0⟩")]
    DirtyClock(String),

    #[error("residual clock entanglement {0:e} above threshold")]
    ClockResidual(f64),

    #[error("rotation saturated: amplitude {amplitude} > 1 at eigenvalue {eigenvalue}")]
    RotationSaturated { eigenvalue: f64, amplitude: f64 },

    #[error("all {0} alpha candidates failed")]
    AllCandidatesFailed(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
