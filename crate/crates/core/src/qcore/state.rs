// Copyright 2026 The qmc-engine Authors
// SPDX-License-Identifier: Apache-2.0

use std::ops::Deref;

use super::linalg::{self, real, ComplexMatrix, ComplexVector};
use crate::error::{QmcError, Result};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted as non-negative.
pub const PSD_FLOOR: f64 = -1e-10;

/// A validated density operator of any dimension.
///
/// Construction checks Hermiticity, unit trace and positivity; violations
/// are errors and nothing is ever renormalized behind the caller's back.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(QmcError::InvalidState(format!(
                "shape {}x{} is not square and non-empty",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QmcError::InvalidState("non-finite entry".into()));
        }
        let herm = linalg::hermiticity_error(&matrix);
        if herm > HERMITIAN_TOL {
            return Err(QmcError::InvalidState(format!("Hermiticity error {herm:.3e}")));
        }
        let tr = matrix.trace();
        if (tr - real(1.0)).norm() > TRACE_TOL {
            return Err(QmcError::InvalidState(format!("trace {tr}")));
        }
        let (values, _) = linalg::hermitian_eigen(&matrix);
        if values[0] < PSD_FLOOR {
            return Err(QmcError::InvalidState(format!(
                "negative eigenvalue {:.3e}",
                values[0]
            )));
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix already known to be a valid state (output of an exact
    /// CPTP map applied to a valid state).
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        debug_assert!(linalg::hermiticity_error(&matrix) < 1e-9);
        Self { matrix }
    }

    pub fn pure(v: &ComplexVector) -> Result<Self> {
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(QmcError::InvalidInput(format!("vector norm {norm}")));
        }
        Self::new(linalg::projector(v))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: linalg::identity(dim) * real(1.0 / dim as f64),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigen(&self.matrix).0
    }

    /// Von Neumann entropy in nats.
    pub fn entropy(&self) -> f64 {
        self.eigenvalues()
            .into_iter()
            .filter(|&p| p > 1e-15)
            .map(|p| -p * p.ln())
            .sum()
    }

    /// `Tr(ρ A)`, real part (A Hermitian).
    pub fn expectation(&self, observable: &ComplexMatrix) -> f64 {
        (&self.matrix * observable).trace().re
    }
}

/// A density operator on `D` dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct State<const D: usize>(DensityMatrix);

/// One qubit, basis (|0⟩, |1⟩).
pub type SingleQubitState = State<2>;
/// Two qubits, basis (|00⟩, |01⟩, |10⟩, |11⟩) with qubit 1 the slow index.
pub type TwoQubitState = State<4>;

impl<const D: usize> State<D> {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.nrows() != D {
            return Err(QmcError::DimensionMismatch {
                expected: D,
                found: matrix.nrows(),
            });
        }
        DensityMatrix::new(matrix).map(Self)
    }

    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), D);
        Self(DensityMatrix::from_matrix_unchecked(matrix))
    }

    pub fn pure(v: &ComplexVector) -> Result<Self> {
        if v.len() != D {
            return Err(QmcError::DimensionMismatch {
                expected: D,
                found: v.len(),
            });
        }
        DensityMatrix::pure(v).map(Self)
    }

    pub fn maximally_mixed() -> Self {
        Self(DensityMatrix::maximally_mixed(D))
    }

    pub fn as_density(&self) -> &DensityMatrix {
        &self.0
    }

    pub fn into_density(self) -> DensityMatrix {
        self.0
    }
}

impl<const D: usize> TryFrom<DensityMatrix> for State<D> {
    type Error = QmcError;

    fn try_from(value: DensityMatrix) -> Result<Self> {
        if value.dim() != D {
            return Err(QmcError::DimensionMismatch {
                expected: D,
                found: value.dim(),
            });
        }
        Ok(Self(value))
    }
}

impl<const D: usize> Deref for State<D> {
    type Target = DensityMatrix;

    fn deref(&self) -> &DensityMatrix {
        &self.0
    }
}

impl TwoQubitState {
    /// `ρ₁ ⊗ ρ₂`
    pub fn product(a: &SingleQubitState, b: &SingleQubitState) -> Self {
        Self::from_matrix_unchecked(linalg::tensor(a.matrix(), b.matrix()))
    }
}

/// Which qubit of the pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Qubit {
    One,
    Two,
}

impl TryFrom<usize> for Qubit {
    type Error = QmcError;

    fn try_from(index: usize) -> Result<Self> {
        match index {
            1 => Ok(Qubit::One),
            2 => Ok(Qubit::Two),
            other => Err(QmcError::InvalidInput(format!(
                "qubit index {other} not in {{1, 2}}"
            ))),
        }
    }
}

/// Reduced state of the kept qubit.
pub fn partial_trace(rho: &TwoQubitState, keep: Qubit) -> SingleQubitState {
    SingleQubitState::from_matrix_unchecked(partial_trace_matrix(rho.matrix(), keep))
}

/// Partial trace on raw matrices; no state validation. `partial_trace_matrix(a ⊗ b, One) = a·Tr b`.
pub fn partial_trace_matrix(m: &ComplexMatrix, keep: Qubit) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(2, 2);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                out[(i, j)] += match keep {
                    Qubit::One => m[(2 * i + k, 2 * j + k)],
                    Qubit::Two => m[(2 * k + i, 2 * k + j)],
                };
            }
        }
    }
    out
}

/// Uhlmann fidelity `(Tr √(√a b √a))²`, clamped to [0, 1].
pub fn state_fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(QmcError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(linalg::uhlmann_fidelity(a.matrix(), b.matrix()))
}
