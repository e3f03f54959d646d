use thiserror::Error;

use crate::pauli::Basis;

pub type Result<T, E = SpfError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum SpfError {
    #[error("dimension mismatch: {left} vs {right} qubits")]
    Dimension { left: usize, right: usize },

    #[error("qubit index {index} out of range for {n} qubits")]
    QubitIndex { index: usize, n: usize },

    #[error("unknown qubit `{0}`")]
    UnknownQubit(String),

    #[error("qubit label `{0}` already in use")]
    DuplicateLabel(String),

    #[error("two-qubit gate needs distinct targets, got {0} twice")]
    SameQubit(usize),

    #[error("gate {gate} expects {expected} target(s), got {got}")]
    GateArity { gate: &'static str, expected: usize, got: usize },

    #[error("cannot parse Pauli string `{0}`")]
    PauliParse(String),

    #[error("generator slot {0} does not exist")]
    DeadGenerator(usize),

    #[error("empty generator combination")]
    EmptyCombination,

    #[error("measuring qubit {qubit} in basis {basis:?} destroys the encoded logical qubit")]
    LogicalDestroying { qubit: usize, basis: Basis },

    #[error("generator slot {slot} commutes with the measurement on qubit {qubit}")]
    CommutingPivot { slot: usize, qubit: usize },

    #[error("internal consistency: {0}")]
    Internal(String),

    #[error("invalid output qubit: {0}")]
    OutputQubit(String),

    #[error("invalid channel specification: {0}")]
    InvalidChannel(String),

    #[error("{what} exceeds the size guard ({got} > {limit})")]
    SizeGuard { what: &'static str, limit: usize, got: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
