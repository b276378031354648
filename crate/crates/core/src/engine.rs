// Copyright 2026 The qmc-engine Authors
// SPDX-License-Identifier: Apache-2.0

//! The two-stroke cycle: measure the thermal product state, record the
//! energy each qubit gained, let both qubits rethermalize.
//!
//! Stroke 2 restores `ρ₁ ⊗ ρ₂` exactly (the thermalizing channel's output
//! does not depend on its input), so the energy bookkeeping of a cycle is
//! fully determined by stroke 1. [`CycleOptions::rethermalize`] runs stroke
//! 2 anyway and checks closure.

use std::fmt;

use rayon::prelude::*;

use crate::error::{QmcError, Result};
use crate::measure::{
    haar_basis, hom_noisy_channel, measurement_channel, HaarSampler, MeasurementBasis, PovmSet,
};
use crate::optics::project_optically;
use crate::qcore::linalg::{self, ComplexMatrix};
use crate::qcore::TwoQubitState;
use crate::thermo::{apply_channel, gibbs_state, thermalizing_channel, BathSpec, QubitSpec};

/// Gaps of qubit 2 probed in the reference sweep.
pub const EXPERIMENT_OMEGA2: [f64; 7] = [0.02, 0.06, 0.14, 0.18, 0.46, 0.86, 1.10];
pub const REFERENCE_OMEGA1: f64 = 1.02;
pub const REFERENCE_BETA1: f64 = 1.0 / 2.5;
pub const REFERENCE_BETA2: f64 = 1.0;

/// Default zero tolerance for classification.
pub const DEFAULT_EPS: f64 = 1e-12;
/// Largest tolerated negative second-law slack.
pub const SECOND_LAW_TOL: f64 = 1e-10;

/// Two qubits, each attached to its own bath; bath 1 is the hot one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineConfig {
    pub qubit1: QubitSpec,
    pub qubit2: QubitSpec,
    pub bath1: BathSpec,
    pub bath2: BathSpec,
}

impl EngineConfig {
    pub fn new(omega1: f64, omega2: f64, beta1: f64, beta2: f64) -> Result<Self> {
        let cfg = Self {
            qubit1: QubitSpec::new(omega1)?,
            qubit2: QubitSpec::new(omega2)?,
            bath1: BathSpec::new(beta1)?,
            bath2: BathSpec::new(beta2)?,
        };
        if beta1 >= beta2 {
            return Err(QmcError::InvalidInput(format!(
                "bath 1 must be hotter: need beta1 < beta2, got {beta1} >= {beta2}"
            )));
        }
        Ok(cfg)
    }

    /// ω₁ = 1.02, β₁ = 0.4, β₂ = 1 with the given ω₂.
    pub fn reference(omega2: f64) -> Result<Self> {
        Self::new(REFERENCE_OMEGA1, omega2, REFERENCE_BETA1, REFERENCE_BETA2)
    }

    pub fn with_omega2(&self, omega2: f64) -> Result<Self> {
        Self::new(self.omega1(), omega2, self.beta1(), self.beta2())
    }

    pub fn omega1(&self) -> f64 {
        self.qubit1.omega()
    }
    pub fn omega2(&self) -> f64 {
        self.qubit2.omega()
    }
    pub fn beta1(&self) -> f64 {
        self.bath1.beta()
    }
    pub fn beta2(&self) -> f64 {
        self.bath2.beta()
    }

    /// `ω₂/ω₁`
    pub fn gap_ratio(&self) -> f64 {
        self.omega2() / self.omega1()
    }

    /// `ρ₁ ⊗ ρ₂`, both qubits at equilibrium with their baths.
    pub fn initial_state(&self) -> TwoQubitState {
        TwoQubitState::product(
            &gibbs_state(self.qubit1, self.bath1),
            &gibbs_state(self.qubit2, self.bath2),
        )
    }

    /// `H₁ ⊗ I`
    pub fn hamiltonian1(&self) -> ComplexMatrix {
        linalg::tensor(&self.qubit1.hamiltonian(), &linalg::identity(2))
    }

    /// `I ⊗ H₂`
    pub fn hamiltonian2(&self) -> ComplexMatrix {
        linalg::tensor(&linalg::identity(2), &self.qubit2.hamiltonian())
    }
}

/// The four sign patterns of `(ΔE₁, ΔE₂, ΔE)` allowed by energy
/// conservation and the second law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OperationClass {
    /// [R] heat pumped out of the cold bath, powered by the measurement.
    Refrigerator,
    /// [E] natural heat flow, part of it absorbed by the apparatus.
    Extractor,
    /// [A] natural heat flow, sped up by energy from the apparatus.
    Accelerator,
    /// [H] the apparatus heats both baths.
    Heater,
}

impl OperationClass {
    pub const ALL: [OperationClass; 4] = [
        OperationClass::Refrigerator,
        OperationClass::Extractor,
        OperationClass::Accelerator,
        OperationClass::Heater,
    ];

    pub fn symbol(self) -> char {
        match self {
            OperationClass::Refrigerator => 'R',
            OperationClass::Extractor => 'E',
            OperationClass::Accelerator => 'A',
            OperationClass::Heater => 'H',
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for OperationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Parameter region of a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeLabel {
    /// `ω₂/ω₁ ≤ β₁/β₂`: only [R] and [H] occur.
    Refrigeration,
    /// `β₁/β₂ < ω₂/ω₁ ≤ 1`: [E], [A] and [H].
    Extraction,
    /// `ω₂/ω₁ > 1`: [A] and [H].
    Acceleration,
}

impl fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RegimeLabel::Refrigeration => "R-range",
            RegimeLabel::Extraction => "E-range",
            RegimeLabel::Acceleration => "A-range",
        };
        f.write_str(s)
    }
}

pub fn regime(cfg: &EngineConfig) -> RegimeLabel {
    let ratio = cfg.gap_ratio();
    if ratio <= cfg.beta1() / cfg.beta2() {
        RegimeLabel::Refrigeration
    } else if ratio <= 1.0 {
        RegimeLabel::Extraction
    } else {
        RegimeLabel::Acceleration
    }
}

/// Stroke-1 energy bookkeeping of one cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineReport {
    pub de1: f64,
    pub de2: f64,
    pub de: f64,
    pub class: OperationClass,
    /// `β₁ΔE₁ + β₂ΔE₂`, non-negative for physical measurements.
    pub second_law_slack: f64,
}

/// What stroke 1 does to the working substance.
#[derive(Debug, Clone, Copy)]
pub enum Measurement<'a> {
    /// Ideal non-selective projective measurement.
    Projective(&'a MeasurementBasis),
    /// Generalized measurement given by its operators.
    Povm(&'a PovmSet),
    /// Projective measurement degraded by two-photon interference visibility.
    HomNoisy {
        basis: &'a MeasurementBasis,
        visibility: f64,
    },
    /// Projective measurement simulated through the optical train.
    Optical(&'a MeasurementBasis),
}

impl Measurement<'_> {
    pub fn apply(&self, rho: &TwoQubitState) -> Result<TwoQubitState> {
        match *self {
            Measurement::Projective(basis) => Ok(measurement_channel(basis, rho)),
            Measurement::Povm(povm) => Ok(povm.apply(rho)),
            Measurement::HomNoisy { basis, visibility } => hom_noisy_channel(basis, visibility, rho),
            Measurement::Optical(basis) => Ok(project_optically(basis, rho)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleOptions {
    pub eps: f64,
    /// Run stroke 2 through the thermalizing channels and check that the
    /// cycle closes on the initial state.
    pub rethermalize: bool,
}

impl Default for CycleOptions {
    fn default() -> Self {
        Self {
            eps: DEFAULT_EPS,
            rethermalize: false,
        }
    }
}

/// One engine cycle.
pub fn run_cycle(
    cfg: &EngineConfig,
    measurement: &Measurement<'_>,
    options: &CycleOptions,
) -> Result<EngineReport> {
    let rho = cfg.initial_state();
    let post = measurement.apply(&rho)?;
    let diff = post.matrix() - rho.matrix();
    let de1 = (&diff * cfg.hamiltonian1()).trace().re;
    let de2 = (&diff * cfg.hamiltonian2()).trace().re;
    let de = de1 + de2;
    let second_law_slack = cfg.beta1() * de1 + cfg.beta2() * de2;
    if second_law_slack < -SECOND_LAW_TOL {
        return Err(QmcError::SecondLawViolation {
            slack: second_law_slack,
        });
    }
    if options.rethermalize {
        let bath =
            thermalizing_channel(cfg.qubit1, cfg.bath1).tensor(&thermalizing_channel(cfg.qubit2, cfg.bath2));
        let reset = apply_channel(&bath, post.as_density())?;
        let gap = linalg::max_abs(&(reset.matrix() - rho.matrix()));
        if gap > 1e-12 {
            return Err(QmcError::InvariantViolation(format!(
                "stroke 2 did not restore the initial state (error {gap:.3e})"
            )));
        }
    }
    Ok(EngineReport {
        de1,
        de2,
        de,
        class: classify(de1, de2, de, options.eps)?,
        second_law_slack,
    })
}

/// Sign-pattern classification with weak inequalities at tolerance `eps`,
/// tested in the order R, E, A, H so boundary ties resolve
/// deterministically. The all-zero triple is H.
pub fn classify(de1: f64, de2: f64, de: f64, eps: f64) -> Result<OperationClass> {
    if (de - de1 - de2).abs() > eps.max(1e-15) {
        return Err(QmcError::InvalidInput(format!(
            "energy changes do not add up: {de} != {de1} + {de2}"
        )));
    }
    let nonneg = |x: f64| x >= -eps;
    let nonpos = |x: f64| x <= eps;
    if [de1, de2, de].iter().all(|x| x.abs() <= eps) {
        // a non-invasive measurement moves no energy
        Ok(OperationClass::Heater)
    } else if nonneg(de1) && nonpos(de2) && nonneg(de) {
        Ok(OperationClass::Refrigerator)
    } else if nonpos(de1) && nonneg(de2) && nonpos(de) {
        Ok(OperationClass::Extractor)
    } else if nonpos(de1) && nonneg(de2) && nonneg(de) {
        Ok(OperationClass::Accelerator)
    } else if nonneg(de1) && nonneg(de2) && nonneg(de) {
        Ok(OperationClass::Heater)
    } else {
        Err(QmcError::Unclassifiable { de1, de2, de })
    }
}

/// `δ = (tanh(β₁ω₁/2) − tanh(β₂ω₂/2))/4`: for the canonical basis
/// `ΔE₁ = ω₁δ` and `ΔE₂ = −ω₂δ`.
pub fn canonical_delta(cfg: &EngineConfig) -> f64 {
    let t1 = (0.5 * cfg.beta1() * cfg.omega1()).tanh();
    let t2 = (0.5 * cfg.beta2() * cfg.omega2()).tanh();
    (t1 - t2) / 4.0
}

/// Empirical class frequencies over Haar-random bases.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassFrequencies {
    counts: [usize; 4],
    samples: usize,
}

impl ClassFrequencies {
    pub fn count(&self, class: OperationClass) -> usize {
        self.counts[class.index()]
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn frequency(&self, class: OperationClass) -> f64 {
        self.count(class) as f64 / self.samples as f64
    }

    /// Binomial standard error `√(f(1−f)/n)`.
    pub fn stderr(&self, class: OperationClass) -> f64 {
        let f = self.frequency(class);
        (f * (1.0 - f) / self.samples as f64).sqrt()
    }
}

/// Runs the cycle for `samples` canonical bases rotated by Haar unitaries
/// `(seed, 0..samples)` and tallies the classes.
pub fn frequency_sweep(cfg: &EngineConfig, samples: usize, seed: u64, eps: f64) -> Result<ClassFrequencies> {
    if samples == 0 {
        return Err(QmcError::InvalidInput("need at least one sample".into()));
    }
    let options = CycleOptions {
        eps,
        rethermalize: false,
    };
    let classes: Vec<OperationClass> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let basis = haar_basis(&HaarSampler::at(seed, i));
            run_cycle(cfg, &Measurement::Projective(&basis), &options).map(|r| r.class)
        })
        .collect::<Result<_>>()?;
    let mut counts = [0usize; 4];
    for c in classes {
        counts[c.index()] += 1;
    }
    Ok(ClassFrequencies { counts, samples })
}

/// Sample means of `(ΔE₁, ΔE₂, ΔE)` over Haar-random bases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaarAverage {
    pub mean: [f64; 3],
    pub stderr: [f64; 3],
    /// Classification of the mean triple.
    pub class: OperationClass,
    pub samples: usize,
}

pub fn haar_average_report(cfg: &EngineConfig, samples: usize, seed: u64) -> Result<HaarAverage> {
    if samples < 2 {
        return Err(QmcError::InvalidInput("need at least two samples".into()));
    }
    let options = CycleOptions::default();
    let triples: Vec<[f64; 3]> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let basis = haar_basis(&HaarSampler::at(seed, i));
            run_cycle(cfg, &Measurement::Projective(&basis), &options).map(|r| [r.de1, r.de2, r.de])
        })
        .collect::<Result<_>>()?;
    let n = samples as f64;
    let mut mean = [0.0; 3];
    for t in &triples {
        for k in 0..3 {
            mean[k] += t[k];
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = [0.0; 3];
    for t in &triples {
        for k in 0..3 {
            var[k] += (t[k] - mean[k]).powi(2);
        }
    }
    let stderr = var.map(|v| (v / (n - 1.0) / n).sqrt());
    Ok(HaarAverage {
        mean,
        stderr,
        class: classify(mean[0], mean[1], mean[2], DEFAULT_EPS.max(1e-12))?,
        samples,
    })
}

/// Large-sample limit of [`haar_average_report`]: the averaged measurement
/// is `ρ ↦ ρ/5 + (4/5) I/4`, so `ΔE̅ᵢ = (4/5)(ωᵢ/2) tanh(βᵢωᵢ/2)`.
pub fn haar_average_prediction(cfg: &EngineConfig) -> [f64; 3] {
    let part = |omega: f64, beta: f64| 0.8 * (omega / 2.0) * (0.5 * beta * omega).tanh();
    let d1 = part(cfg.omega1(), cfg.beta1());
    let d2 = part(cfg.omega2(), cfg.beta2());
    [d1, d2, d1 + d2]
}

/// Visibility at which `ΔE₂` changes sign under the HOM noise model,
/// bisected to `tol`. `None` when `ΔE₂` has the same sign at both ends of
/// `[0, 1]`.
pub fn critical_visibility(cfg: &EngineConfig, basis: &MeasurementBasis, tol: f64) -> Result<Option<f64>> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(QmcError::InvalidInput(format!(
            "bisection tolerance {tol} must be positive"
        )));
    }
    let rho = cfg.initial_state();
    let de2 = |nu: f64| -> Result<f64> {
        let post = hom_noisy_channel(basis, nu, &rho)?;
        Ok(((post.matrix() - rho.matrix()) * cfg.hamiltonian2()).trace().re)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    let f_lo = de2(lo)?;
    if f_lo.signum() == de2(hi)?.signum() {
        return Ok(None);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if de2(mid)?.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{canonical_basis, computational_basis};

    fn canonical(omega2: f64) -> EngineReport {
        let cfg = EngineConfig::reference(omega2).unwrap();
        run_cycle(
            &cfg,
            &Measurement::Projective(&canonical_basis()),
            &CycleOptions::default(),
        )
        .unwrap()
    }

    // Frozen from an explicit 4×4 numpy evaluation of Tr((ρ′−ρ)Hᵢ).
    const BRUTE_FORCE: [(f64, f64, f64); 7] = [
        (0.02, 0.048_760_276_967_750_1, -0.000_956_083_862_112_748),
        (0.06, 0.043_662_486_145_250_8, -0.002_568_381_537_955_93),
        (0.14, 0.033_489_289_940_460_6, -0.004_596_569_207_514_2),
        (0.18, 0.028_421_956_860_624_2, -0.005_015_639_445_992_51),
        (0.46, -0.006_327_037_859_911_1, 0.002_853_370_015_254_03),
        (0.86, -0.052_046_741_744_663, 0.043_882_546_961_186_5),
        (1.10, -0.076_322_461_882_36, 0.082_308_537_324_113_8),
    ];

    #[test]
    fn canonical_cycles_match_brute_force() {
        for (w2, d1, d2) in BRUTE_FORCE {
            let r = canonical(w2);
            assert!((r.de1 - d1).abs() < 1e-12, "{w2}");
            assert!((r.de2 - d2).abs() < 1e-12, "{w2}");
            assert!((r.de - (d1 + d2)).abs() < 1e-12);
        }
    }

    #[test]
    fn canonical_classes() {
        let classes: String = EXPERIMENT_OMEGA2
            .iter()
            .map(|&w| canonical(w).class.symbol())
            .collect();
        assert_eq!(classes, "RRRREEA");
        let r = canonical(0.18);
        assert!((r.de1 - 0.02842).abs() < 1e-5);
        assert!((r.de - 0.02341).abs() < 1e-5);
        let r = canonical(1.10);
        assert!((r.de - 0.005986).abs() < 1e-6);
        let cfg = EngineConfig::reference(0.46).unwrap();
        assert!((canonical_delta(&cfg) + 0.00620).abs() < 1e-5);
    }

    #[test]
    fn eigenbasis_measurement_is_a_heater_by_convention() {
        let cfg = EngineConfig::reference(0.18).unwrap();
        let r = run_cycle(
            &cfg,
            &Measurement::Projective(&computational_basis()),
            &CycleOptions::default(),
        )
        .unwrap();
        assert_eq!((r.de1, r.de2), (0.0, 0.0));
        assert_eq!(r.class, OperationClass::Heater);
    }

    #[test]
    fn critical_visibility_values() {
        let nu = critical_visibility(&EngineConfig::reference(0.18).unwrap(), &canonical_basis(), 1e-6)
            .unwrap()
            .unwrap();
        assert!((nu - 0.4416).abs() < 1e-3);
        let none =
            critical_visibility(&EngineConfig::reference(0.86).unwrap(), &canonical_basis(), 1e-4).unwrap();
        assert_eq!(none, None);
    }

    #[test]
    fn classification_examples() {
        assert_eq!(
            classify(0.0284, -0.0050, 0.0234, 1e-12).unwrap(),
            OperationClass::Refrigerator
        );
        assert_eq!(classify(0.0, 0.0, 0.0, 1e-12).unwrap(), OperationClass::Heater);
        assert_eq!(
            classify(-0.0063, 0.0029, -0.0034, 1e-12).unwrap(),
            OperationClass::Extractor
        );
        assert_eq!(
            classify(-0.07, 0.08, 0.01, 1e-12).unwrap(),
            OperationClass::Accelerator
        );
        assert!(matches!(
            classify(-0.01, -0.02, -0.03, 1e-12),
            Err(QmcError::Unclassifiable { .. })
        ));
        assert!(classify(0.1, 0.1, 0.3, 1e-12).is_err());
    }

    #[test]
    fn equal_gaps_resolve_to_extraction() {
        let r = canonical(1.02);
        assert!(r.de.abs() < 1e-15);
        assert_eq!(r.class, OperationClass::Extractor);
    }

    #[test]
    fn regimes_of_reference_points() {
        let label = |w| regime(&EngineConfig::reference(w).unwrap());
        assert_eq!(label(0.18), RegimeLabel::Refrigeration);
        assert_eq!(label(0.46), RegimeLabel::Extraction);
        assert_eq!(label(1.10), RegimeLabel::Acceleration);
        assert!((EngineConfig::reference(0.18).unwrap().gap_ratio() - 0.176_470_588).abs() < 1e-8);
    }

    #[test]
    fn config_rejects_inverted_baths() {
        assert!(EngineConfig::new(1.02, 0.18, 1.0, 0.4).is_err());
        assert!(EngineConfig::new(1.02, 0.18, 1.0, 1.0).is_err());
        assert!(EngineConfig::new(1.02, -0.18, 0.4, 1.0).is_err());
    }

    #[test]
    fn rethermalization_closes_the_cycle() {
        let cfg = EngineConfig::reference(0.46).unwrap();
        let basis = haar_basis(&HaarSampler::at(4, 4));
        let opts = CycleOptions {
            rethermalize: true,
            ..Default::default()
        };
        let with = run_cycle(&cfg, &Measurement::Projective(&basis), &opts).unwrap();
        let without = run_cycle(&cfg, &Measurement::Projective(&basis), &CycleOptions::default()).unwrap();
        assert_eq!(with, without);
    }

    #[test]
    fn frequencies_sum_to_one_and_are_seed_deterministic() {
        let cfg = EngineConfig::reference(0.06).unwrap();
        let a = frequency_sweep(&cfg, 500, 11, DEFAULT_EPS).unwrap();
        let b = frequency_sweep(&cfg, 500, 11, DEFAULT_EPS).unwrap();
        assert_eq!(a, b);
        let total: f64 = OperationClass::ALL.iter().map(|&c| a.frequency(c)).sum();
        assert!((total - 1.0).abs() < 1e-15);
        assert!(frequency_sweep(&cfg, 0, 11, DEFAULT_EPS).is_err());
    }

    #[test]
    fn haar_prediction_reference_value() {
        let cfg = EngineConfig::reference(1.10).unwrap();
        let p = haar_average_prediction(&cfg);
        assert!((p[0] - 0.082_096_307_153_84).abs() < 1e-12);
        assert!((p[1] - 0.220_228_892_923_704).abs() < 1e-12);
    }
}
