//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Game parameters or utility tables that violate their invariants.
    #[error("invalid game: {0}")]
    InvalidGame(String),

    /// A conditional distribution that is not a valid no-signaling box.
    /// The message names the offending constraint.
    #[error("invalid box: {0}")]
    InvalidBox(String),

    /// A density matrix that is not a valid two-qubit state.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// Measurement directions or POVM parameters outside their admissible range.
    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    /// Arguments outside an operation's documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Malformed input files (I/O or JSON shape problems).
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
