// Copyright 2026 The qmc-engine Authors
// SPDX-License-Identifier: Apache-2.0

//! Gibbs states, qubit energies and the thermalizing channel.
//!
//! Each qubit has `H = −ω σ_z / 2`, so |0⟩ is the ground state with energy
//! `−ω/2`. The thermalizing channel is the infinite-time limit of
//! generalized amplitude damping: its output is the Gibbs state for every
//! input.

use crate::error::{QmcError, Result};
use crate::qcore::linalg::{self, diag_real, from_real_rows, real, ComplexMatrix};
use crate::qcore::{DensityMatrix, SingleQubitState};

/// Completeness tolerance for `Σ K†K = I`.
pub const COMPLETENESS_TOL: f64 = 1e-12;

/// Energy gap of one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitSpec {
    omega: f64,
}

impl QubitSpec {
    pub fn new(omega: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(QmcError::InvalidInput(format!("energy gap {omega} must be > 0")));
        }
        Ok(Self { omega })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `diag(−ω/2, +ω/2)`
    pub fn hamiltonian(&self) -> ComplexMatrix {
        diag_real(&[-self.omega / 2.0, self.omega / 2.0])
    }
}

/// Inverse temperature of a bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    beta: f64,
}

impl BathSpec {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(QmcError::InvalidInput(format!(
                "inverse temperature {beta} must be > 0"
            )));
        }
        Ok(Self { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// A completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    operators: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Checks that all operators share one square shape and that
    /// `Σ K†K = I` within [`COMPLETENESS_TOL`].
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| QmcError::InvalidInput("empty Kraus set".into()))?;
        let dim = first.nrows();
        for k in &operators {
            if !k.is_square() || k.nrows() != dim {
                return Err(QmcError::DimensionMismatch {
                    expected: dim,
                    found: k.nrows(),
                });
            }
        }
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for k in &operators {
            sum += k.adjoint() * k;
        }
        let deviation = linalg::max_abs(&(sum - linalg::identity(dim)));
        if deviation > COMPLETENESS_TOL {
            return Err(QmcError::Completeness { deviation });
        }
        Ok(Self { operators })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            operators: vec![linalg::identity(dim)],
        }
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn dim(&self) -> usize {
        self.operators[0].nrows()
    }

    /// Independent action on two subsystems, `ε₁ ⊗ ε₂`.
    pub fn tensor(&self, other: &KrausChannel) -> KrausChannel {
        let operators = self
            .operators
            .iter()
            .flat_map(|a| other.operators.iter().map(move |b| linalg::tensor(a, b)))
            .collect();
        KrausChannel { operators }
    }
}

/// Ground-state population `p = (1 + tanh(βω/2)) / 2`.
pub fn gibbs_population(spec: QubitSpec, bath: BathSpec) -> f64 {
    0.5 * (1.0 + (0.5 * bath.beta * spec.omega).tanh())
}

/// `e^{−βH}/Z = diag(p, 1 − p)`
pub fn gibbs_state(spec: QubitSpec, bath: BathSpec) -> SingleQubitState {
    let p = gibbs_population(spec, bath);
    SingleQubitState::from_matrix_unchecked(diag_real(&[p, 1.0 - p]))
}

/// `Tr(ρ H)`
pub fn energy(rho: &SingleQubitState, spec: QubitSpec) -> f64 {
    rho.expectation(&spec.hamiltonian())
}

/// The four operators
/// `K₁ = √p |0⟩⟨0|`, `K₂ = √p |0⟩⟨1|`, `K₃ = √(1−p) |1⟩⟨1|`, `K₄ = √(1−p) |1⟩⟨0|`.
pub fn thermalizing_channel(spec: QubitSpec, bath: BathSpec) -> KrausChannel {
    thermalizing_channel_from_population(gibbs_population(spec, bath))
}

pub(crate) fn thermalizing_channel_from_population(p: f64) -> KrausChannel {
    let (g, e) = (p.sqrt(), (1.0 - p).sqrt());
    KrausChannel {
        operators: vec![
            from_real_rows(2, 2, &[g, 0.0, 0.0, 0.0]),
            from_real_rows(2, 2, &[0.0, g, 0.0, 0.0]),
            from_real_rows(2, 2, &[0.0, 0.0, 0.0, e]),
            from_real_rows(2, 2, &[0.0, 0.0, e, 0.0]),
        ],
    }
}

/// `Σ_k K_k ρ K_k†`
pub fn apply_channel(channel: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if channel.dim() != rho.dim() {
        return Err(QmcError::DimensionMismatch {
            expected: channel.dim(),
            found: rho.dim(),
        });
    }
    let out = linalg::kraus_sum(&channel.operators, rho.matrix());
    let drift = (out.trace() - real(1.0)).norm();
    if drift > 1e-10 {
        return Err(QmcError::InvariantViolation(format!("trace drift {drift:.3e}")));
    }
    Ok(DensityMatrix::from_matrix_unchecked(out))
}
