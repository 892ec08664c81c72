// Copyright 2026 The QECCD Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = QeccdError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QeccdError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("{qubits} qubits exceeds the dense-matrix limit of {limit}")]
    ResourceLimit { qubits: usize, limit: usize },

    #[error("index {index} out of range (size {size})")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("invalid coordinates: {0}")]
    InvalidCoordinates(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("generators {0} and {1} do not commute")]
    NonCommutingGenerators(usize, usize),

    #[error("generators are not independent")]
    DependentGenerators,

    #[error("codeword {codeword} is not stabilized by generator {generator}")]
    NotStabilized { codeword: usize, generator: usize },

    #[error("syndrome collision: errors {0} and {1} share syndrome {2}")]
    SyndromeCollision(String, String, String),

    #[error("Knill-Laflamme condition violated: residual {residual:e} for pair ({a}, {b})")]
    KnillLaflamme { a: usize, b: usize, residual: f64 },

    #[error("degenerate code: error-correction matrix is singular")]
    DegenerateCode,

    #[error("matrix has eigenvalue {0:e} below tolerance")]
    NegativeEigenvalue(f64),

    #[error("unknown channel '{0}'")]
    UnknownChannel(String),

    #[error("unknown code '{0}'")]
    UnknownCode(String),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("unknown syndrome {0}")]
    UnknownSyndrome(String),

    #[error("channel acts on {channel} qubits but the code's noisy subsystem has {code}")]
    SupportMismatch { channel: usize, code: usize },

    #[error("missing record for configuration {0}")]
    MissingConfiguration(usize),

    #[error("inconsistent readouts for chi[{a},{b}]: spread {spread:e}")]
    InconsistentReadouts { a: usize, b: usize, spread: f64 },

    #[error("invalid toggle: {0}")]
    InvalidToggle(String),

    #[error("negative probability {0:e}")]
    NegativeProbability(f64),

    #[error("shots must be positive")]
    NonPositiveShots,

    #[error("parse error: {0}")]
    Parse(String),
}

impl QeccdError {
    /// True for errors caused by malformed input rather than by the domain.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            QeccdError::Parse(_) | QeccdError::UnknownChannel(_) | QeccdError::UnknownCode(_)
        )
    }
}
