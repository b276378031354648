// Copyright 2026 The qmc-engine Authors
// SPDX-License-Identifier: Apache-2.0

//! Complex linear algebra and quantum-state primitives.
//!
//! Basis order is fixed everywhere as (|00⟩, |01⟩, |10⟩, |11⟩) with qubit 1
//! the slow index. Units are ħ = k_B = 1.

pub mod linalg;
pub mod state;

pub use linalg::{tensor, ComplexMatrix, ComplexVector, C64};
pub use state::{
    partial_trace, state_fidelity, DensityMatrix, Qubit, SingleQubitState, State, TwoQubitState,
};
