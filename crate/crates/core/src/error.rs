use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: {0} vs {1} qubits")]
    LengthMismatch(usize, usize),
    #[error("qubit index {index} out of range for {n} qubits")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("two-qubit gate needs distinct qubits, got {0} twice")]
    SameQubit(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("identity string cannot generate a rotation")]
    IdentityRotation,
    #[error("rotation string must have phase +1, got {0}")]
    NonHermitianString(String),
    #[error("angle must be finite")]
    NonFiniteAngle,
    #[error("register of {n} qubits exceeds the capacity of {cap}")]
    Capacity { n: usize, cap: usize },
    #[error("pauli strings do not commute: {0} and {1}")]
    NotCommuting(String, String),
    #[error("missing measurement outcome for instruction {0}")]
    MissingOutcome(usize),
    #[error("expected {expected} outcomes, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("distribution is not normalized (total {0})")]
    NotNormalized(f64),
    #[error("observable term {0} is not diagonal")]
    NonDiagonal(String),
    #[error("pattern is not in graph form")]
    NotGraphForm,
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
