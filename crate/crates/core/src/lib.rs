// Copyright 2026 The qmc-engine Authors
// SPDX-License-Identifier: Apache-2.0

//! Simulator of a two-qubit, two-stroke cooling engine fueled by a
//! non-selective entangled measurement.
//!
//! Two qubits with gaps ω₁, ω₂ start in equilibrium with baths at inverse
//! temperatures β₁ < β₂. Stroke 1 measures them in a two-qubit basis and
//! discards the outcome; stroke 2 lets each qubit rethermalize. The signs
//! of the energy the qubits gained in stroke 1 decide whether the cycle
//! refrigerates the cold bath, extracts energy, accelerates the natural
//! heat flow or just heats both baths.
//!
//! ```
//! use qmc_engine::engine::{run_cycle, CycleOptions, EngineConfig, Measurement, OperationClass};
//! use qmc_engine::measure::canonical_basis;
//!
//! let cfg = EngineConfig::new(1.02, 0.18, 0.4, 1.0)?;
//! let report = run_cycle(&cfg, &Measurement::Projective(&canonical_basis()), &CycleOptions::default())?;
//! assert_eq!(report.class, OperationClass::Refrigerator);
//! assert!(report.de2 < 0.0);
//! # Ok::<(), qmc_engine::QmcError>(())
//! ```
//!
//! Modules, bottom up: [`qcore`] (matrices, states), [`thermo`] (Gibbs
//! states, thermalizing channel), [`measure`] (bases, Haar sampling, noise
//! models), [`engine`] (cycle, taxonomy, Monte Carlo), [`optics`]
//! (linear-optical implementation) and [`tomo`] (process and measurement
//! tomography).

pub mod engine;
pub mod error;
pub mod measure;
pub mod optics;
pub mod qcore;
pub mod rng;
pub mod thermo;
pub mod tomo;

pub use error::{QmcError, Result};

/// Guide chapters, compiled and run as doc-tests.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/states-and-channels.md")]
    mod states_and_channels {}
    #[doc = include_str!("../../../book/src/measurements.md")]
    mod measurements {}
    #[doc = include_str!("../../../book/src/engine-cycle.md")]
    mod engine_cycle {}
    #[doc = include_str!("../../../book/src/noise.md")]
    mod noise {}
    #[doc = include_str!("../../../book/src/optics.md")]
    mod optics {}
    #[doc = include_str!("../../../book/src/tomography.md")]
    mod tomography {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
