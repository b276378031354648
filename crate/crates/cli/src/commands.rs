// Copyright 2026 The qmc-engine Authors
// SPDX-License-Identifier: Apache-2.0

//! One function per subcommand, each returning the full CSV text.

use qmc_engine::engine::{
    critical_visibility, frequency_sweep, haar_average_prediction, haar_average_report, regime, run_cycle,
    CycleOptions, EngineReport, Measurement, OperationClass, RegimeLabel,
};
use qmc_engine::measure::{canonical_basis, white_noise_povm, PovmSet};
use qmc_engine::optics::{d_of_omega, row_of_pixel, solve_hologram, OpticalThermalizer};
use qmc_engine::qcore::linalg;
use qmc_engine::thermo::{thermalizing_channel, BathSpec, QubitSpec};
use qmc_engine::tomo::{
    effect_fidelity, measurement_tomography, process_fidelity, process_tomography, ChiMatrix, ProbeSet, Shots,
};

use crate::config::{RunConfig, TomographyTarget};
use crate::error::Result;

/// Bisection tolerance on the critical visibility.
pub const CRITICAL_VISIBILITY_TOL: f64 = 1e-4;

/// A value that can be written as one CSV cell.
pub trait Field {
    fn cell(&self) -> String;
}

impl Field for f64 {
    /// Shortest round-trip form; exponent form outside [1e-4, 1e15).
    fn cell(&self) -> String {
        let a = self.abs();
        if *self == 0.0 || !self.is_finite() || (1e-4..1e15).contains(&a) {
            self.to_string()
        } else {
            format!("{self:e}")
        }
    }
}

macro_rules! display_field {
    ($($t:ty),*) => {
        $(impl Field for $t {
            fn cell(&self) -> String {
                self.to_string()
            }
        })*
    };
}

display_field!(usize, u64, i32, &str, String, OperationClass, RegimeLabel);

/// CSV text with the version/hash comment line and a header row.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(cfg: &RunConfig, columns: &[&str]) -> Self {
        let mut text = format!("# qmc {} config={}\n", env!("CARGO_PKG_VERSION"), cfg.hash());
        text.push_str(&columns.join(","));
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, fields: &[&dyn Field]) {
        let line: Vec<String> = fields.iter().map(|f| f.cell()).collect();
        self.text.push_str(&line.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

fn shots_of(cfg: &RunConfig) -> Shots {
    match cfg.shots {
        0 => Shots::Exact,
        n => Shots::Finite(n),
    }
}

pub fn sweep_omega(cfg: &RunConfig) -> Result<String> {
    let mut csv = Csv::new(cfg, &["omega2", "ratio", "de1", "de2", "de", "class", "regime"]);
    let basis = canonical_basis();
    let options = CycleOptions {
        eps: cfg.eps,
        rethermalize: true,
    };
    for &w2 in &cfg.omega2 {
        let engine = cfg.engine(w2)?;
        let r = run_cycle(&engine, &Measurement::Projective(&basis), &options)?;
        csv.row(&[
            &w2,
            &engine.gap_ratio(),
            &r.de1,
            &r.de2,
            &r.de,
            &r.class,
            &regime(&engine),
        ]);
    }
    Ok(csv.finish())
}

pub fn frequency(cfg: &RunConfig) -> Result<String> {
    let seed = cfg.require_seed()?;
    let mut columns = vec!["omega2", "samples"];
    let names: Vec<String> = OperationClass::ALL
        .iter()
        .flat_map(|c| [format!("freq_{c}"), format!("stderr_{c}")])
        .collect();
    columns.extend(names.iter().map(String::as_str));
    let mut csv = Csv::new(cfg, &columns);
    for &w2 in &cfg.omega2 {
        let f = frequency_sweep(&cfg.engine(w2)?, cfg.samples, seed, cfg.eps)?;
        let stats: Vec<f64> = OperationClass::ALL
            .iter()
            .flat_map(|&c| [f.frequency(c), f.stderr(c)])
            .collect();
        let mut fields: Vec<&dyn Field> = vec![&w2, &cfg.samples];
        fields.extend(stats.iter().map(|x| x as &dyn Field));
        csv.row(&fields);
    }
    Ok(csv.finish())
}

pub fn noise(cfg: &RunConfig) -> Result<String> {
    let mut csv = Csv::new(cfg, &["omega2", "model", "nu", "de1", "de2", "de", "class"]);
    let basis = canonical_basis();
    let options = CycleOptions {
        eps: cfg.eps,
        rethermalize: false,
    };
    for &w2 in &cfg.omega2 {
        let engine = cfg.engine(w2)?;
        for k in 0..=cfg.nu_steps {
            let nu = k as f64 / cfg.nu_steps as f64;
            let povm = white_noise_povm(&basis, nu)?;
            let white = run_cycle(&engine, &Measurement::Povm(&povm), &options)?;
            let hom = run_cycle(
                &engine,
                &Measurement::HomNoisy {
                    basis: &basis,
                    visibility: nu,
                },
                &options,
            )?;
            for (model, r) in [("white", white), ("hom", hom)] {
                let EngineReport {
                    de1, de2, de, class, ..
                } = r;
                csv.row(&[&w2, &model, &nu, &de1, &de2, &de, &class]);
            }
        }
        // critical visibility row; empty fields when dE2 never changes sign
        let nu_c = critical_visibility(&engine, &basis, CRITICAL_VISIBILITY_TOL)?;
        let nu_c = nu_c.map(|x| x.cell()).unwrap_or_default();
        csv.row(&[&w2, &"critical", &nu_c, &"", &"", &"", &""]);
    }
    Ok(csv.finish())
}

pub fn haar_average(cfg: &RunConfig) -> Result<String> {
    let seed = cfg.require_seed()?;
    let mut csv = Csv::new(
        cfg,
        &[
            "omega2",
            "samples",
            "mean_de1",
            "stderr_de1",
            "mean_de2",
            "stderr_de2",
            "mean_de",
            "stderr_de",
            "class",
            "analytic_de1",
            "analytic_de2",
            "analytic_de",
        ],
    );
    for &w2 in &cfg.omega2 {
        let engine = cfg.engine(w2)?;
        let avg = haar_average_report(&engine, cfg.samples, seed)?;
        let a = haar_average_prediction(&engine);
        csv.row(&[
            &w2,
            &avg.samples,
            &avg.mean[0],
            &avg.stderr[0],
            &avg.mean[1],
            &avg.stderr[1],
            &avg.mean[2],
            &avg.stderr[2],
            &avg.class,
            &a[0],
            &a[1],
            &a[2],
        ]);
    }
    Ok(csv.finish())
}

pub fn tomography(cfg: &RunConfig) -> Result<String> {
    let shots = shots_of(cfg);
    let seed = match shots {
        Shots::Exact => cfg.seed.unwrap_or(0),
        Shots::Finite(_) => cfg.require_seed()?,
    };
    match cfg.target {
        TomographyTarget::Process => process_rows(cfg, shots, seed),
        TomographyTarget::Measurement => measurement_rows(cfg, shots, seed),
    }
}

fn process_rows(cfg: &RunConfig, shots: Shots, seed: u64) -> Result<String> {
    let mut csv = Csv::new(
        cfg,
        &[
            "omega", "beta", "shots", "m", "n", "chi_re", "chi_im", "ideal_re", "ideal_im", "fidelity",
        ],
    );
    let bath = BathSpec::new(cfg.beta)?;
    let hologram = solve_hologram(bath);
    for &w in &cfg.omega2 {
        let optical = OpticalThermalizer::new(hologram.clone(), d_of_omega(w)?)?;
        let ideal = ChiMatrix::from_kraus(&thermalizing_channel(QubitSpec::new(w)?, bath))?;
        let t = process_tomography(&optical, &ProbeSet::single_qubit(), shots, seed)?;
        let fidelity = process_fidelity(&t.chi, &ideal)?;
        for m in 0..4 {
            for n in 0..4 {
                let (got, want) = (t.chi.matrix()[(m, n)], ideal.matrix()[(m, n)]);
                csv.row(&[
                    &w,
                    &cfg.beta,
                    &cfg.shots,
                    &linalg::pauli_label(m, 1),
                    &linalg::pauli_label(n, 1),
                    &got.re,
                    &got.im,
                    &want.re,
                    &want.im,
                    &fidelity,
                ]);
            }
        }
    }
    Ok(csv.finish())
}

fn measurement_rows(cfg: &RunConfig, shots: Shots, seed: u64) -> Result<String> {
    let mut csv = Csv::new(
        cfg,
        &[
            "effect", "shots", "row", "col", "re", "im", "ideal_re", "ideal_im", "fidelity",
        ],
    );
    let basis = canonical_basis();
    let t = measurement_tomography(&PovmSet::from_basis(&basis), &ProbeSet::two_qubit(), shots, seed)?;
    for (k, (effect, ideal)) in t.effects.iter().zip(basis.projectors()).enumerate() {
        let fidelity = effect_fidelity(effect, &ideal);
        for r in 0..4 {
            for c in 0..4 {
                let (got, want) = (effect[(r, c)], ideal[(r, c)]);
                csv.row(&[
                    &k, &cfg.shots, &r, &c, &got.re, &got.im, &want.re, &want.im, &fidelity,
                ]);
            }
        }
    }
    Ok(csv.finish())
}

pub fn hologram(cfg: &RunConfig) -> Result<String> {
    let mut csv = Csv::new(cfg, &["pixel", "row", "phase_rad"]);
    let holo = solve_hologram(BathSpec::new(cfg.beta)?);
    for (i, phase) in holo.phases().iter().enumerate() {
        csv.row(&[&i, &row_of_pixel(i), phase]);
    }
    Ok(csv.finish())
}
