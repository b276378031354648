// Copyright 2026 The qmc-engine Authors
// SPDX-License-Identifier: Apache-2.0

//! Flat TOML config file merged with command-line overrides.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qmc_engine::engine::{
    EngineConfig, DEFAULT_EPS, EXPERIMENT_OMEGA2, REFERENCE_BETA1, REFERENCE_BETA2, REFERENCE_OMEGA1,
};

use crate::error::{CliError, Result};

pub const DEFAULT_SAMPLES: usize = 10_000;
pub const DEFAULT_SHOTS: u64 = 10_000;
pub const DEFAULT_NU_STEPS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TomographyTarget {
    /// Optical thermalizing stage, one qubit.
    Process,
    /// Canonical-basis measurement, two qubits.
    Measurement,
}

/// Keys accepted in the config file. Every key is optional.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
    pub omega1: Option<f64>,
    pub omega2: Option<Vec<f64>>,
    pub samples: Option<usize>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub eps: Option<f64>,
    pub out: Option<PathBuf>,
    pub beta: Option<f64>,
    pub nu_steps: Option<usize>,
    pub target: Option<TomographyTarget>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
            path: path.display().to_string(),
            source,
        })?;
        toml::from_str(&text).map_err(|source| CliError::ParseConfig {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Flags shared by every subcommand; each wins over the file value.
#[derive(Debug, Default, Clone, Args)]
pub struct Overrides {
    /// Flat TOML file with any of the keys below.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_name = "N")]
    pub samples: Option<usize>,
    /// Repetitions per tomography setting; 0 means exact probabilities.
    #[arg(long, global = true, value_name = "N")]
    pub shots: Option<u64>,
    /// Zero tolerance of the classification.
    #[arg(long, global = true, value_name = "X")]
    pub eps: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub beta1: Option<f64>,
    #[arg(long, global = true)]
    pub beta2: Option<f64>,
    #[arg(long, global = true)]
    pub omega1: Option<f64>,
    /// Comma-separated gaps of qubit 2.
    #[arg(long, global = true, value_delimiter = ',', num_args = 1..)]
    pub omega2: Option<Vec<f64>>,
    /// Bath inverse temperature for hologram and tomography (default: beta2).
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Visibility grid resolution of the noise command.
    #[arg(long, global = true, value_name = "N")]
    pub nu_steps: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub target: Option<TomographyTarget>,
}

/// Fully resolved inputs of a command. Its JSON form is hashed into the
/// CSV header.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub beta1: f64,
    pub beta2: f64,
    pub omega1: f64,
    pub omega2: Vec<f64>,
    pub samples: usize,
    pub shots: u64,
    pub seed: Option<u64>,
    pub eps: f64,
    pub beta: f64,
    pub nu_steps: usize,
    pub target: TomographyTarget,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(command: &str, flags: &Overrides) -> Result<Self> {
        let file = match &flags.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let beta2 = flags.beta2.or(file.beta2).unwrap_or(REFERENCE_BETA2);
        let cfg = RunConfig {
            command: command.to_owned(),
            beta1: flags.beta1.or(file.beta1).unwrap_or(REFERENCE_BETA1),
            beta2,
            omega1: flags.omega1.or(file.omega1).unwrap_or(REFERENCE_OMEGA1),
            omega2: flags
                .omega2
                .clone()
                .or(file.omega2)
                .unwrap_or_else(|| EXPERIMENT_OMEGA2.to_vec()),
            samples: flags.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES),
            shots: flags.shots.or(file.shots).unwrap_or(DEFAULT_SHOTS),
            seed: flags.seed.or(file.seed),
            eps: flags.eps.or(file.eps).unwrap_or(DEFAULT_EPS),
            beta: flags.beta.or(file.beta).unwrap_or(beta2),
            nu_steps: flags.nu_steps.or(file.nu_steps).unwrap_or(DEFAULT_NU_STEPS),
            target: flags.target.or(file.target).unwrap_or(TomographyTarget::Process),
            out: flags.out.clone().or(file.out),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.omega2.is_empty() {
            return Err(CliError::Config("omega2 list is empty".into()));
        }
        for &w in &self.omega2 {
            EngineConfig::new(self.omega1, w, self.beta1, self.beta2)?;
        }
        if !(self.eps.is_finite() && self.eps >= 0.0) {
            return Err(CliError::Config(format!(
                "eps must be finite and non-negative, got {}",
                self.eps
            )));
        }
        if self.samples == 0 {
            return Err(CliError::Config("samples must be at least 1".into()));
        }
        if self.nu_steps == 0 {
            return Err(CliError::Config("nu_steps must be at least 1".into()));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(CliError::Config(format!(
                "beta must be positive, got {}",
                self.beta
            )));
        }
        Ok(())
    }

    pub fn engine(&self, omega2: f64) -> Result<EngineConfig> {
        Ok(EngineConfig::new(self.omega1, omega2, self.beta1, self.beta2)?)
    }

    pub fn require_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| CliError::Config(format!("{} samples randomly and needs --seed", self.command)))
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}
