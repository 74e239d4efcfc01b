use thiserror::Error;

/// Errors produced by the simulator, circuit builders, hash and miner.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("requested {requested} qubits, but the simulator cap is {cap}")]
    Capacity { requested: usize, cap: usize },

    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    QubitIndex { index: usize, num_qubits: usize },

    #[error("qubit {0} appears more than once in a gate")]
    DuplicateQubit(usize),

    #[error("malformed gate: {0}")]
    MalformedGate(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("unsupported layout: {0}")]
    UnsupportedLayout(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
