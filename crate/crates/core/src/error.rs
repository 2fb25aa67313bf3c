use thiserror::Error;

pub type Result<T> = std::result::Result<T, QfheError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QfheError {
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("qubit index {index} out of range for width {width}")]
    IndexOutOfRange { index: usize, width: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("CNOT control and target are both qubit {0}")]
    DegenerateCnot(usize),

    #[error("gate {0} is not Clifford")]
    NonClifford(String),

    #[error("expected {expected} random bit pairs for R gates, got {actual}")]
    RPairCountMismatch { expected: usize, actual: usize },

    #[error("{qubits} qubits exceeds the simulator cap of {cap}")]
    TooManyQubits { qubits: usize, cap: usize },

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("mixture weights sum to {0}, expected 1")]
    WeightSum(f64),

    #[error("unsupported program: {0}")]
    UnsupportedProgram(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("custody violation: {0}")]
    CustodyViolation(String),

    #[error("protocol desync: {0}")]
    ProtocolDesync(String),

    #[error("encoding register mismatch: overlap {0} with the expected encoding")]
    EncodingMismatch(f64),

    #[error("encoding register is entangled with the data register (purity {0})")]
    EncodingEntangled(f64),

    #[error("exhaustive check over {0} qubits is too large")]
    TooLarge(usize),

    #[error("transport error: {0}")]
    Transport(String),
}

impl QfheError {
    pub(crate) fn parse(message: impl Into<String>) -> Self {
        QfheError::Parse {
            line: 0,
            column: 0,
            message: message.into(),
        }
    }
}

impl From<serde_json::Error> for QfheError {
    fn from(e: serde_json::Error) -> Self {
        QfheError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}
