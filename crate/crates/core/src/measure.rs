// Copyright 2026 The qmc-engine Authors
// SPDX-License-Identifier: Apache-2.0

//! Measurement bases, the non-selective measurement channel, Haar-random
//! bases and the two measurement-noise models.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{QmcError, Result};
use crate::optics;
use crate::qcore::linalg::{self, c, ket_real, real, ComplexMatrix, ComplexVector};
use crate::qcore::TwoQubitState;
use crate::rng::substream;

pub const ORTHONORMAL_TOL: f64 = 1e-10;
pub const UNITARY_TOL: f64 = 1e-10;

/// Four orthonormal two-qubit vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    vectors: [ComplexVector; 4],
}

impl MeasurementBasis {
    pub fn new(vectors: [ComplexVector; 4]) -> Result<Self> {
        for v in &vectors {
            if v.len() != 4 {
                return Err(QmcError::DimensionMismatch {
                    expected: 4,
                    found: v.len(),
                });
            }
        }
        let gram = gram_matrix(&vectors);
        let err = linalg::max_abs(&(gram - linalg::identity(4)));
        if err > ORTHONORMAL_TOL {
            return Err(QmcError::InvalidInput(format!(
                "basis not orthonormal (Gram error {err:.3e})"
            )));
        }
        Ok(Self { vectors })
    }

    /// The columns of a unitary.
    pub fn from_unitary(u: &ComplexMatrix) -> Result<Self> {
        if u.nrows() != 4 || !linalg::is_unitary(u, UNITARY_TOL) {
            return Err(QmcError::InvalidInput("not a 4×4 unitary".into()));
        }
        Ok(Self {
            vectors: std::array::from_fn(|k| u.column(k).into_owned()),
        })
    }

    pub fn vectors(&self) -> &[ComplexVector; 4] {
        &self.vectors
    }

    pub fn projectors(&self) -> [ComplexMatrix; 4] {
        std::array::from_fn(|k| linalg::projector(&self.vectors[k]))
    }

    /// `⟨ψ_j|ψ_k⟩`
    pub fn gram(&self) -> ComplexMatrix {
        gram_matrix(&self.vectors)
    }
}

fn gram_matrix(vectors: &[ComplexVector; 4]) -> ComplexMatrix {
    DMatrix::from_fn(4, 4, |j, k| vectors[j].dotc(&vectors[k]))
}

/// `{|00⟩, (|01⟩+|10⟩)/√2, (|01⟩−|10⟩)/√2, |11⟩}`
pub fn canonical_basis() -> MeasurementBasis {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    MeasurementBasis {
        vectors: [
            ket_real(&[1.0, 0.0, 0.0, 0.0]),
            ket_real(&[0.0, s, s, 0.0]),
            ket_real(&[0.0, s, -s, 0.0]),
            ket_real(&[0.0, 0.0, 0.0, 1.0]),
        ],
    }
}

/// The product eigenbasis of both Hamiltonians.
pub fn computational_basis() -> MeasurementBasis {
    MeasurementBasis {
        vectors: std::array::from_fn(|k| {
            let mut v = ComplexVector::zeros(4);
            v[k] = real(1.0);
            v
        }),
    }
}

/// `ρ′ = Σ_k ⟨ψ_k|ρ|ψ_k⟩ |ψ_k⟩⟨ψ_k|`
pub fn measurement_channel(basis: &MeasurementBasis, rho: &TwoQubitState) -> TwoQubitState {
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(4, 4);
    for v in &basis.vectors {
        let weight = v.dotc(&(m * v)).re;
        out += linalg::projector(v) * real(weight);
    }
    TwoQubitState::from_matrix_unchecked(out)
}

/// Position in a reproducible sequence of Haar-random unitaries.
///
/// The unitary at `(seed, counter)` depends on nothing else, so serial and
/// parallel sweeps over counters produce identical samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HaarSampler {
    pub seed: u64,
    pub counter: u64,
}

impl HaarSampler {
    pub fn new(seed: u64) -> Self {
        Self { seed, counter: 0 }
    }

    pub fn at(seed: u64, counter: u64) -> Self {
        Self { seed, counter }
    }

    /// The unitary at the current position and the sampler advanced by one.
    pub fn next_unitary(self) -> (ComplexMatrix, HaarSampler) {
        (
            haar_unitary(&self),
            Self {
                counter: self.counter + 1,
                ..self
            },
        )
    }
}

/// Haar-random element of U(4).
///
/// Draws a complex Ginibre matrix, takes its QR decomposition and multiplies
/// each column of Q by the phase of the matching diagonal entry of R, which
/// removes the bias of the QR sign convention. The global phase is left
/// Haar-distributed over U(4); measurement channels are blind to it.
pub fn haar_unitary(sampler: &HaarSampler) -> ComplexMatrix {
    let mut rng = substream(sampler.seed, sampler.counter);
    let ginibre = DMatrix::from_fn(4, 4, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        c(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = ginibre.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..4 {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { real(1.0) };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

/// `{U|ψ_k⟩}`
pub fn rotate_basis(u: &ComplexMatrix, basis: &MeasurementBasis) -> Result<MeasurementBasis> {
    if u.nrows() != 4 || !linalg::is_unitary(u, UNITARY_TOL) {
        return Err(QmcError::InvalidInput("rotation is not a 4×4 unitary".into()));
    }
    Ok(MeasurementBasis {
        vectors: std::array::from_fn(|k| u * &basis.vectors[k]),
    })
}

/// Canonical basis rotated by the unitary at `sampler`.
pub fn haar_basis(sampler: &HaarSampler) -> MeasurementBasis {
    let u = haar_unitary(sampler);
    MeasurementBasis {
        vectors: std::array::from_fn(|k| &u * &canonical_basis().vectors[k]),
    }
}

/// Four measurement operators `M_k` with `Σ M_k† M_k = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmSet {
    operators: [ComplexMatrix; 4],
}

impl PovmSet {
    pub fn new(operators: [ComplexMatrix; 4]) -> Result<Self> {
        let mut sum = ComplexMatrix::zeros(4, 4);
        for m in &operators {
            if m.nrows() != 4 || m.ncols() != 4 {
                return Err(QmcError::DimensionMismatch {
                    expected: 4,
                    found: m.nrows(),
                });
            }
            sum += m.adjoint() * m;
        }
        let deviation = linalg::max_abs(&(sum - linalg::identity(4)));
        if deviation > ORTHONORMAL_TOL {
            return Err(QmcError::Completeness { deviation });
        }
        Ok(Self { operators })
    }

    pub fn from_basis(basis: &MeasurementBasis) -> Self {
        Self {
            operators: basis.projectors(),
        }
    }

    pub fn operators(&self) -> &[ComplexMatrix; 4] {
        &self.operators
    }

    /// Effects `M_k† M_k`.
    pub fn effects(&self) -> [ComplexMatrix; 4] {
        std::array::from_fn(|k| self.operators[k].adjoint() * &self.operators[k])
    }

    /// Non-selective post-measurement state `Σ M_k ρ M_k†`.
    pub fn apply(&self, rho: &TwoQubitState) -> TwoQubitState {
        TwoQubitState::from_matrix_unchecked(linalg::kraus_sum(&self.operators, rho.matrix()))
    }
}

/// Measurement that fires with probability `ν`: effects
/// `ν|ψ_k⟩⟨ψ_k| + (1−ν) I/4`, realized by the operators
/// `M_k = (√(1+3ν) − √(1−ν))/2 · |ψ_k⟩⟨ψ_k| + √(1−ν)/2 · I`.
pub fn white_noise_povm(basis: &MeasurementBasis, nu: f64) -> Result<PovmSet> {
    check_unit_interval("nu", nu)?;
    let (lift, floor) = white_noise_amplitudes(nu);
    let id = linalg::identity(4);
    let operators =
        std::array::from_fn(|k| linalg::projector(&basis.vectors[k]) * real(lift) + &id * real(floor));
    PovmSet::new(operators)
}

fn white_noise_amplitudes(nu: f64) -> (f64, f64) {
    let (s_up, s_down) = ((1.0 + 3.0 * nu).sqrt(), (1.0 - nu).sqrt());
    ((s_up - s_down) / 2.0, s_down / 2.0)
}

/// Weights `(c₁, c₂)` in `Σ M_k ρ M_k† = c₁ ρ′ + c₂ ρ`, with `c₁ + c₂ = 1`.
pub fn white_noise_weights(nu: f64) -> (f64, f64) {
    let (s_up, s_down) = ((1.0 + 3.0 * nu).sqrt(), (1.0 - nu).sqrt());
    let c1 = ((s_up - s_down) / 2.0).powi(2);
    let c2 = ((s_up * s_down) + (1.0 - nu)) / 2.0;
    (c1, c2)
}

fn check_unit_interval(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(QmcError::InvalidInput(format!("{name} = {x} outside [0, 1]")));
    }
    Ok(())
}

/// Measurement channel degraded by imperfect two-photon interference.
///
/// Each projector is implemented as local optics around a beam-splitter
/// singlet filter (see [`optics::projector_optics`]). A fraction `ν` of
/// pairs interferes and is projected on the singlet. The remaining pairs
/// are distinguishable: a coincidence happens when both photons are
/// transmitted (weight 1/4, identity) or both reflected (weight 1/4, the
/// photons swap paths), so half of them are detected. Both cases still pass
/// the local unitaries and bias filters. Each projector branch is divided by
/// its calibrated efficiency `η_k²`, the branches are summed and the result
/// renormalized by the total detected weight.
pub fn hom_noisy_channel(
    basis: &MeasurementBasis,
    visibility: f64,
    rho: &TwoQubitState,
) -> Result<TwoQubitState> {
    check_unit_interval("visibility", visibility)?;
    let swap = linalg::swap_gate();
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(4, 4);
    for v in basis.vectors() {
        let optics = optics::projector_optics(v);
        let pre = &optics.filter * optics.local.adjoint();
        let post = &optics.local * &optics.filter;
        let interfering = &post * optics::singlet_projector() * &pre;
        let transmitted = &post * &pre;
        let reflected = &post * &swap * &pre;
        let mut branch = linalg::kraus_sum(&[interfering], m) * real(visibility);
        branch += linalg::kraus_sum(&[transmitted, reflected], m) * real((1.0 - visibility) / 4.0);
        out += branch * real(1.0 / (optics.efficiency * optics.efficiency));
    }
    let total = out.trace().re;
    if total <= 1e-300 {
        return Err(QmcError::ZeroDetection);
    }
    Ok(TwoQubitState::from_matrix_unchecked(out * real(1.0 / total)))
}

/// Sample mean and standard error of a matrix-valued Monte Carlo estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixEstimate {
    pub mean: ComplexMatrix,
    /// Standard error of the real parts.
    pub stderr_re: DMatrix<f64>,
    /// Standard error of the imaginary parts.
    pub stderr_im: DMatrix<f64>,
    pub samples: usize,
}

/// Mean of `measurement_channel(U·basis, ρ)` over `samples` Haar unitaries.
/// Depends only on `(basis, ρ, samples, seed)`, not on the thread count.
pub fn haar_mean_output(
    basis: &MeasurementBasis,
    rho: &TwoQubitState,
    samples: usize,
    seed: u64,
) -> Result<MatrixEstimate> {
    if samples < 2 {
        return Err(QmcError::InvalidInput("need at least two samples".into()));
    }
    let outputs: Vec<ComplexMatrix> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let u = haar_unitary(&HaarSampler::at(seed, i));
            let rotated = MeasurementBasis {
                vectors: std::array::from_fn(|k| &u * &basis.vectors[k]),
            };
            measurement_channel(&rotated, rho).into_density().into_matrix()
        })
        .collect();
    let n = samples as f64;
    let mut mean = ComplexMatrix::zeros(4, 4);
    for o in &outputs {
        mean += o;
    }
    mean /= real(n);
    let mut var_re = DMatrix::<f64>::zeros(4, 4);
    let mut var_im = DMatrix::<f64>::zeros(4, 4);
    for o in &outputs {
        for idx in 0..16 {
            let d = o[idx] - mean[idx];
            var_re[idx] += d.re * d.re;
            var_im[idx] += d.im * d.im;
        }
    }
    let scale = 1.0 / ((n - 1.0) * n);
    Ok(MatrixEstimate {
        mean,
        stderr_re: var_re.map(|x| (x * scale).sqrt()),
        stderr_im: var_im.map(|x| (x * scale).sqrt()),
        samples,
    })
}

/// Haar average of a rank-one projective measurement in dimension 4:
/// `ρ ↦ λρ + (1−λ) I/4` with `λ = 1/5`.
pub fn haar_depolarized(rho: &TwoQubitState) -> ComplexMatrix {
    const LAMBDA: f64 = 0.2;
    rho.matrix() * real(LAMBDA) + linalg::identity(4) * real((1.0 - LAMBDA) / 4.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::diag_real;
    use crate::qcore::{partial_trace, Qubit};
    use crate::thermo::{gibbs_state, BathSpec, QubitSpec};

    fn reference_state() -> TwoQubitState {
        let r1 = gibbs_state(QubitSpec::new(1.02).unwrap(), BathSpec::new(0.4).unwrap());
        let r2 = gibbs_state(QubitSpec::new(0.18).unwrap(), BathSpec::new(1.0).unwrap());
        TwoQubitState::product(&r1, &r2)
    }

    #[test]
    fn canonical_basis_is_orthonormal_and_entangled() {
        let b = canonical_basis();
        assert!(linalg::max_abs(&(b.gram() - linalg::identity(4))) < 1e-15);
        assert!(b.vectors()[1].dotc(&b.vectors()[2]).norm() < 1e-15);
        let psi2 = TwoQubitState::pure(&b.vectors()[1]).unwrap();
        for q in [Qubit::One, Qubit::Two] {
            let r = partial_trace(&psi2, q);
            assert!(linalg::max_abs(&(r.matrix() - diag_real(&[0.5, 0.5]))) < 1e-15);
        }
    }

    #[test]
    fn eigenbasis_measurement_is_non_invasive() {
        let rho = reference_state();
        let out = measurement_channel(&computational_basis(), &rho);
        assert!(linalg::max_abs(&(out.matrix() - rho.matrix())) < 1e-15);
    }

    #[test]
    fn canonical_measurement_averages_middle_populations() {
        let rho = reference_state();
        let m = rho.matrix();
        let mid = (m[(1, 1)].re + m[(2, 2)].re) / 2.0;
        let expected = diag_real(&[m[(0, 0)].re, mid, mid, m[(3, 3)].re]);
        let out = measurement_channel(&canonical_basis(), &rho);
        assert!(linalg::max_abs(&(out.matrix() - expected)) < 1e-15);
    }

    #[test]
    fn maximally_mixed_is_a_fixed_point() {
        let mixed = TwoQubitState::maximally_mixed();
        for i in 0..5 {
            let b = haar_basis(&HaarSampler::at(3, i));
            let out = measurement_channel(&b, &mixed);
            assert!(linalg::max_abs(&(out.matrix() - mixed.matrix())) < 1e-14);
        }
    }

    #[test]
    fn haar_unitaries_are_unitary_and_reproducible() {
        let s = HaarSampler::new(42);
        let (u0, s1) = s.next_unitary();
        assert_eq!(s1.counter, 1);
        assert!(linalg::is_unitary(&u0, 1e-10));
        assert_eq!(u0, haar_unitary(&HaarSampler::at(42, 0)));
        assert_ne!(u0, haar_unitary(&HaarSampler::at(42, 1)));
        assert_ne!(u0, haar_unitary(&HaarSampler::at(43, 0)));
    }

    #[test]
    fn rotation_preserves_orthonormality() {
        let b = canonical_basis();
        assert_eq!(rotate_basis(&linalg::identity(4), &b).unwrap(), b);
        let u = haar_unitary(&HaarSampler::at(9, 9));
        let r = rotate_basis(&u, &b).unwrap();
        assert!(linalg::max_abs(&(r.gram() - linalg::identity(4))) < 1e-12);
        let mixed = TwoQubitState::maximally_mixed();
        let out = measurement_channel(&r, &mixed);
        assert!(linalg::max_abs(&(out.matrix() - mixed.matrix())) < 1e-14);
        assert!(rotate_basis(&(linalg::identity(4) * real(2.0)), &b).is_err());
    }

    #[test]
    fn non_orthonormal_vectors_are_rejected() {
        let v = ket_real(&[1.0, 0.0, 0.0, 0.0]);
        let w = ket_real(&[0.0, 1.0, 0.0, 0.0]);
        let x = ket_real(&[0.0, 0.0, 1.0, 0.0]);
        assert!(MeasurementBasis::new([v.clone(), w, x, v]).is_err());
    }

    #[test]
    fn white_noise_limits() {
        let b = canonical_basis();
        let sharp = white_noise_povm(&b, 1.0).unwrap();
        for (m, p) in sharp.operators().iter().zip(b.projectors()) {
            assert!(linalg::max_abs(&(m - p)) < 1e-15);
        }
        let blind = white_noise_povm(&b, 0.0).unwrap();
        for e in blind.effects() {
            assert!(linalg::max_abs(&(e - linalg::identity(4) * real(0.25))) < 1e-15);
        }
        assert!(white_noise_povm(&b, 1.1).is_err());
        assert!(white_noise_povm(&b, -0.1).is_err());
    }

    #[test]
    fn white_noise_effects_match_target_form() {
        let b = haar_basis(&HaarSampler::at(1, 0));
        for nu in [0.0, 0.25, 0.5, 0.9] {
            let povm = white_noise_povm(&b, nu).unwrap();
            for (e, p) in povm.effects().iter().zip(b.projectors()) {
                let target = p * real(nu) + linalg::identity(4) * real((1.0 - nu) / 4.0);
                assert!(linalg::max_abs(&(e - target)) < 1e-14);
            }
            let (c1, c2) = white_noise_weights(nu);
            assert!((c1 + c2 - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn perfect_visibility_is_the_ideal_channel() {
        let rho = reference_state();
        for basis in [canonical_basis(), haar_basis(&HaarSampler::at(5, 2))] {
            let ideal = measurement_channel(&basis, &rho);
            let hom = hom_noisy_channel(&basis, 1.0, &rho).unwrap();
            assert!(linalg::max_abs(&(ideal.matrix() - hom.matrix())) < 1e-12);
        }
        assert!(hom_noisy_channel(&canonical_basis(), 1.5, &rho).is_err());
    }

    #[test]
    fn hom_channel_output_is_a_state() {
        let rho = reference_state();
        let basis = haar_basis(&HaarSampler::at(8, 1));
        for nu in [0.0, 0.3, 0.7] {
            let out = hom_noisy_channel(&basis, nu, &rho).unwrap();
            assert!(TwoQubitState::new(out.matrix().clone()).is_ok());
        }
    }
}
