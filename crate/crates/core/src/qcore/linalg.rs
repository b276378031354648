// Copyright 2026 The qmc-engine Authors
// SPDX-License-Identifier: Apache-2.0

//! Small dense complex matrices and the handful of decompositions the
//! simulator needs. Everything here is at most 256×256.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type C64 = Complex64;
/// Dense row/column complex matrix. Entries are indexed `(row, col)`.
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

/// Builds a matrix from real row-major entries.
pub fn from_real_rows(rows: usize, cols: usize, entries: &[f64]) -> ComplexMatrix {
    assert_eq!(entries.len(), rows * cols);
    ComplexMatrix::from_row_iterator(rows, cols, entries.iter().map(|&x| real(x)))
}

pub fn diag_real(entries: &[f64]) -> ComplexMatrix {
    let n = entries.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for (i, &x) in entries.iter().enumerate() {
        m[(i, i)] = real(x);
    }
    m
}

pub fn ket(entries: &[C64]) -> ComplexVector {
    ComplexVector::from_column_slice(entries)
}

pub fn ket_real(entries: &[f64]) -> ComplexVector {
    ComplexVector::from_iterator(entries.len(), entries.iter().map(|&x| real(x)))
}

/// `|v⟩⟨v|`
pub fn projector(v: &ComplexVector) -> ComplexMatrix {
    v * v.adjoint()
}

/// Kronecker product; the left factor is the slow index (qubit 1).
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn tensor_ket(a: &ComplexVector, b: &ComplexVector) -> ComplexVector {
    a.kronecker(b)
}

/// `Σ_k K_k ρ K_k†`
pub fn kraus_sum(ops: &[ComplexMatrix], rho: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(rho.nrows(), rho.ncols());
    for k in ops {
        out += k * rho * k.adjoint();
    }
    out
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.trace()
}

/// Largest entrywise modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn hermiticity_error(m: &ComplexMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn is_unitary(u: &ComplexMatrix, tol: f64) -> bool {
    u.is_square() && max_abs(&(u.adjoint() * u - identity(u.nrows()))) <= tol
}

/// Eigen-decomposition of a Hermitian matrix. The matrix is symmetrized
/// first so round-off in the strictly-lower triangle is ignored.
/// Eigenvalues are returned in ascending order with matching columns.
pub fn hermitian_eigen(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let h = (m + m.adjoint()) * real(0.5);
    let eig = SymmetricEigen::new(h);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_map(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let mapped = DVector::from_iterator(values.len(), values.iter().map(|&x| real(f(x))));
    &vectors * ComplexMatrix::from_diagonal(&mapped) * vectors.adjoint()
}

/// Principal square root of a PSD matrix; small negative eigenvalues from
/// round-off are clamped to zero.
pub fn sqrt_psd(m: &ComplexMatrix) -> ComplexMatrix {
    hermitian_map(m, |x| x.max(0.0).sqrt())
}

/// Uhlmann fidelity `(Tr √(√a b √a))²` of two PSD matrices, clamped to [0, 1].
pub fn uhlmann_fidelity(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let sa = sqrt_psd(a);
    let inner = &sa * b * &sa;
    let root_trace: f64 = hermitian_eigen(&inner)
        .0
        .into_iter()
        .map(|x| x.max(0.0).sqrt())
        .sum();
    (root_trace * root_trace).clamp(0.0, 1.0)
}

/// `½‖a − b‖₁` for Hermitian arguments.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let (values, _) = hermitian_eigen(&(a - b));
    0.5 * values.iter().map(|x| x.abs()).sum::<f64>()
}

/// Frobenius norm of the difference.
pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Single-qubit Pauli matrices in the order I, X, Y, Z.
pub fn paulis() -> [ComplexMatrix; 4] {
    [
        identity(2),
        from_real_rows(2, 2, &[0.0, 1.0, 1.0, 0.0]),
        ComplexMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        from_real_rows(2, 2, &[1.0, 0.0, 0.0, -1.0]),
    ]
}

/// Tensor products of Paulis for `n_qubits` qubits, qubit 1 slowest.
/// Index `m` has base-4 digits (p₁, p₂, …) with 0=I, 1=X, 2=Y, 3=Z.
pub fn pauli_basis(n_qubits: usize) -> Vec<ComplexMatrix> {
    let single = paulis();
    let mut basis = vec![identity(1)];
    for _ in 0..n_qubits {
        basis = basis
            .iter()
            .flat_map(|b| single.iter().map(move |p| tensor(b, p)))
            .collect();
    }
    basis
}

pub fn pauli_label(mut index: usize, n_qubits: usize) -> String {
    const LETTERS: [char; 4] = ['I', 'X', 'Y', 'Z'];
    let mut out = vec!['I'; n_qubits];
    for slot in out.iter_mut().rev() {
        *slot = LETTERS[index % 4];
        index /= 4;
    }
    out.into_iter().collect()
}

/// Swap of two qubits on the 4-dimensional product space.
pub fn swap_gate() -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(4, 4);
    s[(0, 0)] = ONE;
    s[(1, 2)] = ONE;
    s[(2, 1)] = ONE;
    s[(3, 3)] = ONE;
    s
}
