// Copyright 2026 The qmc-engine Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the simulator.
///
/// Contract violations on inputs (`InvalidInput`, `DimensionMismatch`) are
/// distinguished from broken physical invariants (`InvariantViolation`,
/// `SecondLawViolation`), which indicate a non-physical channel or a bug.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QmcError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not a valid density operator: {0}")]
    InvalidState(String),

    #[error("Kraus operators violate completeness (deviation {deviation:.3e})")]
    Completeness { deviation: f64 },

    #[error("second law violated: beta1*dE1 + beta2*dE2 = {slack:.3e}")]
    SecondLawViolation { slack: f64 },

    #[error("no operation class matches ({de1:.3e}, {de2:.3e}, {de:.3e})")]
    Unclassifiable { de1: f64, de2: f64, de: f64 },

    #[error("rank-deficient probe set (rank {rank} of {required})")]
    RankDeficient { rank: usize, required: usize },

    #[error("zero detection probability")]
    ZeroDetection,

    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, QmcError>;
