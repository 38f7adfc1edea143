use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("unknown spin label {0}")]
    UnknownLabel(String),

    #[error("spin label {0} listed twice")]
    DuplicateLabel(String),

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("gate acts twice on qubit {0}")]
    RepeatedQubit(usize),

    #[error("non-finite angle")]
    NonFiniteAngle,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("spins {0} and {1} are not coupled")]
    NotNeighbors(String, String),

    #[error("negative duration {0}")]
    NegativeDuration(f64),

    #[error("negative dephasing rate {0}")]
    NegativeRate(f64),

    #[error("operator not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("operator not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("state not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("trace {0} differs from 1")]
    TraceNotOne(f64),

    #[error("eigenvalue {0:e} below positivity tolerance")]
    NegativeEigenvalue(f64),

    #[error("empty input")]
    Empty,

    #[error("group count {r} out of range 1..={n}")]
    GroupCount { r: usize, n: usize },

    #[error("partition has an empty group {0}")]
    EmptyGroup(usize),

    #[error("list of {0} operators too long for exhaustive search")]
    TooMany(usize),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    /// True for errors signalling that a simulated state left the physical set.
    pub fn is_physics_violation(&self) -> bool {
        matches!(
            self,
            Error::NotHermitian(_)
                | Error::NotUnitary(_)
                | Error::NotNormalized(_)
                | Error::TraceNotOne(_)
                | Error::NegativeEigenvalue(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
