// Copyright 2026 The qmc-engine Authors
// SPDX-License-Identifier: Apache-2.0

use qmc_engine::QmcError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    ReadConfig { path: String, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    ParseConfig { path: String, source: toml::de::Error },
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
    #[error(transparent)]
    Engine(#[from] QmcError),
}

impl CliError {
    /// 2 for bad input, 3 for a broken physical invariant, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::ReadConfig { .. } | CliError::ParseConfig { .. } => 2,
            CliError::Output(_) => 1,
            CliError::Engine(e) => match e {
                QmcError::InvalidInput(_)
                | QmcError::DimensionMismatch { .. }
                | QmcError::InvalidState(_)
                | QmcError::RankDeficient { .. } => 2,
                QmcError::Completeness { .. }
                | QmcError::SecondLawViolation { .. }
                | QmcError::Unclassifiable { .. }
                | QmcError::ZeroDetection
                | QmcError::InvariantViolation(_) => 3,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
