// Copyright 2026 The qmc-engine Authors
// SPDX-License-Identifier: Apache-2.0

//! Batch front-end for `qmc-engine`: config merging, the experiment
//! reproductions and CSV emission.

pub mod commands;
pub mod config;
pub mod error;

use std::io::Write;

use clap::{Parser, Subcommand};

pub use config::{Overrides, RunConfig};
pub use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "qmc",
    version,
    about = "Measurement-fueled two-qubit engine simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Overrides,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Canonical-basis energy changes and class for each omega2.
    SweepOmega,
    /// Class frequencies over Haar-random measurement bases.
    Frequency,
    /// White-noise and two-photon-visibility curves with the critical visibility.
    Noise,
    /// Haar-averaged energy changes against the depolarizing prediction.
    HaarAverage,
    /// Process or measurement tomography of the optical stages.
    Tomography,
    /// SLM phase profile for a bath temperature.
    Hologram,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SweepOmega => "sweep-omega",
            Command::Frequency => "frequency",
            Command::Noise => "noise",
            Command::HaarAverage => "haar-average",
            Command::Tomography => "tomography",
            Command::Hologram => "hologram",
        }
    }
}

/// Resolves the config and renders the command's CSV.
pub fn render(command: Command, flags: &Overrides) -> Result<(RunConfig, String)> {
    let cfg = RunConfig::resolve(command.name(), flags)?;
    let csv = match command {
        Command::SweepOmega => commands::sweep_omega(&cfg)?,
        Command::Frequency => commands::frequency(&cfg)?,
        Command::Noise => commands::noise(&cfg)?,
        Command::HaarAverage => commands::haar_average(&cfg)?,
        Command::Tomography => commands::tomography(&cfg)?,
        Command::Hologram => commands::hologram(&cfg)?,
    };
    Ok((cfg, csv))
}

/// Runs a parsed invocation, writing to `--out` or standard output.
pub fn run(cli: &Cli) -> Result<()> {
    let (cfg, csv) = render(cli.command, &cli.flags)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, csv)?,
        None => std::io::stdout().lock().write_all(csv.as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn invoke(args: &[&str]) -> Result<String> {
        let cli =
            Cli::try_parse_from(std::iter::once("qmc").chain(args.iter().copied())).expect("valid arguments");
        render(cli.command, &cli.flags).map(|(_, csv)| csv)
    }

    fn exit_code(args: &[&str]) -> i32 {
        match Cli::try_parse_from(std::iter::once("qmc").chain(args.iter().copied())) {
            Ok(cli) => render(cli.command, &cli.flags).map_or_else(|e| e.exit_code(), |_| 0),
            Err(e) => e.exit_code(),
        }
    }

    #[test]
    fn sweep_has_comment_header_and_seven_rows() {
        let text = invoke(&["sweep-omega"]).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with(&format!("# qmc {} config=", env!("CARGO_PKG_VERSION"))));
        assert_eq!(lines[1], "omega2,ratio,de1,de2,de,class,regime");
        let classes: String = lines[2..].iter().map(|l| l.split(',').nth(5).unwrap()).collect();
        assert_eq!(classes, "RRRREEA");
        assert!(!text.contains('\r'));
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn equal_gaps_row_is_an_extractor() {
        let text = invoke(&["sweep-omega", "--omega2", "1.02"]).unwrap();
        let row: Vec<&str> = text.lines().nth(2).unwrap().split(',').collect();
        assert_eq!((row[4], row[5]), ("0", "E"));
    }

    #[test]
    fn empty_omega2_list_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.toml");
        std::fs::write(&path, "omega2 = []\n").unwrap();
        assert_eq!(exit_code(&["sweep-omega", "--config", path.to_str().unwrap()]), 2);
    }

    #[test]
    fn sampling_commands_need_a_seed() {
        assert_eq!(exit_code(&["frequency", "--samples", "10"]), 2);
        assert_eq!(exit_code(&["haar-average", "--samples", "10"]), 2);
        assert_eq!(exit_code(&["tomography", "--shots", "100"]), 2);
        assert_eq!(exit_code(&["tomography", "--shots", "0"]), 0);
    }

    #[test]
    fn bad_values_are_config_errors() {
        assert_eq!(exit_code(&["sweep-omega", "--beta1", "3"]), 2);
        assert_eq!(exit_code(&["sweep-omega", "--eps", "-1"]), 2);
        assert_eq!(exit_code(&["tomography", "--shots", "0", "--omega2", "0.03"]), 2);
        assert_eq!(exit_code(&["sweep-omega", "--config", "/nonexistent.toml"]), 2);
        assert_eq!(exit_code(&["no-such-command"]), 2);
        assert_eq!(exit_code(&["sweep-omega", "--seed", "x"]), 2);
    }

    #[test]
    fn invariant_violations_exit_with_three() {
        let e = CliError::Engine(qmc_engine::QmcError::SecondLawViolation { slack: -1.0 });
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn config_file_and_out_flag() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.toml");
        let out = dir.path().join("freq.csv");
        std::fs::write(&cfg, "seed = 11\nsamples = 200\nomega2 = [0.02, 1.1]\n").unwrap();
        let args = [
            "qmc",
            "frequency",
            "--config",
            cfg.to_str().unwrap(),
            "--samples",
            "300",
            "--out",
            out.to_str().unwrap(),
        ];
        run(&Cli::try_parse_from(args).unwrap()).unwrap();
        let text = std::fs::read_to_string(&out).unwrap();
        let rows: Vec<&str> = text.lines().skip(2).collect();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.split(',').nth(1) == Some("300")));
    }

    #[test]
    fn output_does_not_depend_on_thread_count() {
        let args = ["frequency", "--seed", "5", "--samples", "500"];
        let in_pool = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| invoke(&args).unwrap())
        };
        assert_eq!(in_pool(1), in_pool(4));
        assert_eq!(in_pool(1), invoke(&args).unwrap());
    }

    #[test]
    fn noise_reports_critical_visibility() {
        let text = invoke(&["noise", "--omega2", "0.18", "--nu-steps", "4"]).unwrap();
        let critical = text.lines().find(|l| l.contains(",critical,")).unwrap();
        let nu: f64 = critical.split(',').nth(2).unwrap().parse().unwrap();
        assert!((nu - 0.4416).abs() < 1e-3);
        let text = invoke(&["noise", "--omega2", "1.1", "--nu-steps", "4"]).unwrap();
        assert!(text.contains("1.1,critical,,,,,"));
    }

    #[test]
    fn hologram_has_one_row_per_pixel() {
        let text = invoke(&["hologram", "--beta", "0.4"]).unwrap();
        assert_eq!(text.lines().count(), 2 + 512);
    }

    #[test]
    fn tomography_targets() {
        let text = invoke(&["tomography", "--shots", "0", "--omega2", "0.18"]).unwrap();
        assert_eq!(text.lines().count(), 2 + 16);
        assert!(text
            .lines()
            .skip(2)
            .all(|l| l.ends_with(",1") || l.rsplit(',').next().unwrap().starts_with("0.9999")));
        let text = invoke(&["tomography", "--target", "measurement", "--seed", "3"]).unwrap();
        assert_eq!(text.lines().count(), 2 + 64);
    }

    #[test]
    fn small_floats_use_exponent_form() {
        use crate::commands::Field;
        assert_eq!(1e-17f64.cell(), "1e-17");
        assert_eq!(0.25f64.cell(), "0.25");
        assert_eq!(0.0f64.cell(), "0");
    }
}
