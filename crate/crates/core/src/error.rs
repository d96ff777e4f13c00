use thiserror::Error;

use crate::simcore::MAX_WIRES;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("a state needs at least one wire")]
    ZeroWires,
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("wire {wire} out of range for a {num_wires}-wire register")]
    WireOutOfRange { wire: usize, num_wires: usize },
    #[error("two-wire gate addresses wire {0} twice")]
    CoincidentWires(usize),
    #[error("{0} wires exceeds the hard cap of {MAX_WIRES}")]
    TooManyWires(usize),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("ensemble weights must be nonnegative and sum to 1 (sum was {0})")]
    InvalidWeights(f64),
    #[error("amplitudes are not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("measurement outcome {outcome} has zero probability")]
    ImpossibleOutcome { outcome: u8 },
    #[error("wire {0} still owes an S correction")]
    PendingSCorrection(usize),
    #[error("no key-update rule for {0}")]
    UnsupportedGate(String),
    #[error("circuit error: {0}")]
    Circuit(String),
    #[error("circuit exceeds configured caps: {0}")]
    CapsExceeded(String),
    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("wire frame rejected: {0}")]
    WireFormat(String),
    #[error("leakage descriptors differ: {0}")]
    LeakageMismatch(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}
