// Copyright 2026 The qmc-engine Authors
// SPDX-License-Identifier: Apache-2.0

//! Process and measurement tomography by linear inversion, with an
//! optional shot-noise layer.
//!
//! Probe states are products of {|0⟩, |1⟩, |+⟩, |+i⟩}. Output states are
//! reconstructed from Pauli expectation values; in finite-shot mode every
//! non-identity Pauli string is measured `shots` times. Process matrices
//! use the unnormalized Pauli basis, `ε(ρ) = Σ χ_mn σ_m ρ σ_n†`, so a
//! trace-preserving χ has unit trace.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{QmcError, Result};
use crate::measure::PovmSet;
use crate::optics::OpticalThermalizer;
use crate::qcore::linalg::{self, c, ket, real, ComplexMatrix, ComplexVector};
use crate::qcore::DensityMatrix;
use crate::rng::substream;
use crate::thermo::{apply_channel, KrausChannel};

/// Tolerance for a negative probability to count as round-off.
pub const NEGATIVE_PROBABILITY_TOL: f64 = 1e-12;

/// Anything that maps density operators to density operators.
pub trait QuantumProcess: Sync {
    fn dim(&self) -> usize;
    fn process(&self, rho: &DensityMatrix) -> Result<DensityMatrix>;
}

impl QuantumProcess for KrausChannel {
    fn dim(&self) -> usize {
        KrausChannel::dim(self)
    }

    fn process(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        apply_channel(self, rho)
    }
}

impl QuantumProcess for OpticalThermalizer {
    fn dim(&self) -> usize {
        2
    }

    fn process(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.apply(rho)
    }
}

/// Exact probabilities or a finite number of repetitions per setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shots {
    Exact,
    Finite(u64),
}

/// Input states for tomography.
#[derive(Debug, Clone)]
pub struct ProbeSet {
    n_qubits: usize,
    states: Vec<DensityMatrix>,
}

fn single_qubit_probes() -> Vec<DensityMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        ket(&[real(1.0), real(0.0)]),
        ket(&[real(0.0), real(1.0)]),
        ket(&[real(s), real(s)]),
        ket(&[real(s), c(0.0, s)]),
    ]
    .iter()
    .map(|v| DensityMatrix::pure(v).expect("unit vectors"))
    .collect()
}

impl ProbeSet {
    /// {|0⟩, |1⟩, |+⟩, |+i⟩}
    pub fn single_qubit() -> Self {
        Self {
            n_qubits: 1,
            states: single_qubit_probes(),
        }
    }

    /// All 16 products of the single-qubit probes.
    pub fn two_qubit() -> Self {
        let single = single_qubit_probes();
        let states = single
            .iter()
            .flat_map(|a| {
                single.iter().map(move |b| {
                    DensityMatrix::new(linalg::tensor(a.matrix(), b.matrix())).expect("product state")
                })
            })
            .collect();
        Self { n_qubits: 2, states }
    }

    pub fn from_states(states: Vec<DensityMatrix>) -> Result<Self> {
        let dim = states
            .first()
            .ok_or_else(|| QmcError::InvalidInput("empty probe set".into()))?
            .dim();
        let n_qubits = match dim {
            2 => 1,
            4 => 2,
            other => return Err(QmcError::InvalidInput(format!("unsupported dimension {other}"))),
        };
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(QmcError::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self { n_qubits, states })
    }

    pub fn for_dim(dim: usize) -> Result<Self> {
        match dim {
            2 => Ok(Self::single_qubit()),
            4 => Ok(Self::two_qubit()),
            other => Err(QmcError::InvalidInput(format!("unsupported dimension {other}"))),
        }
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }
}

/// Multinomial draw of `shots` outcomes.
pub fn sample_counts(probabilities: &[f64], shots: u64, seed: u64) -> Result<Vec<u64>> {
    sample_counts_with(&mut substream(seed, 0), probabilities, shots)
}

fn sample_counts_with<R: Rng>(rng: &mut R, probabilities: &[f64], shots: u64) -> Result<Vec<u64>> {
    if let Some(&p) = probabilities
        .iter()
        .find(|&&p| p < -NEGATIVE_PROBABILITY_TOL || !p.is_finite())
    {
        return Err(QmcError::InvalidInput(format!("invalid probability {p}")));
    }
    let clean: Vec<f64> = probabilities.iter().map(|&p| p.max(0.0)).collect();
    let total: f64 = clean.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(QmcError::InvalidInput(format!("probabilities sum to {total}")));
    }
    // sequential conditional binomials
    let mut counts = vec![0u64; clean.len()];
    let (mut left, mut mass) = (shots, 1.0f64);
    for (k, &p) in clean.iter().enumerate() {
        if left == 0 {
            break;
        }
        if k + 1 == clean.len() || mass <= 0.0 {
            counts[k] = left;
            break;
        }
        let q = (p / mass).clamp(0.0, 1.0);
        let n = Binomial::new(left, q).expect("valid binomial").sample(rng);
        counts[k] = n;
        left -= n;
        mass -= p;
    }
    Ok(counts)
}

/// Reconstructs a state from (possibly sampled) Pauli expectations.
fn output_tomogram<R: Rng>(
    rho: &DensityMatrix,
    paulis: &[ComplexMatrix],
    shots: Shots,
    rng: &mut R,
) -> Result<ComplexMatrix> {
    let shots = match shots {
        Shots::Exact => return Ok(rho.matrix().clone()),
        Shots::Finite(n) => n,
    };
    let dim = rho.dim();
    let mut est = linalg::identity(dim);
    for p in paulis.iter().skip(1) {
        let expectation = rho.expectation(p).clamp(-1.0, 1.0);
        let plus = (1.0 + expectation) / 2.0;
        let counts = sample_counts_with(rng, &[plus, 1.0 - plus], shots)?;
        let mean = (counts[0] as f64 - counts[1] as f64) / shots as f64;
        est += p * real(mean);
    }
    Ok(est * real(1.0 / dim as f64))
}

/// Least squares via SVD, failing if the system is rank deficient.
fn solve_full_rank<T>(a: DMatrix<T>, b: DMatrix<T>) -> Result<DMatrix<T>>
where
    T: nalgebra::ComplexField<RealField = f64>,
{
    let required = a.ncols();
    let svd = a.svd(true, true);
    let max = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|&&s| s > 1e-10 * max).count();
    if rank < required {
        return Err(QmcError::RankDeficient { rank, required });
    }
    svd.solve(&b, 1e-12 * max)
        .map_err(|e| QmcError::InvariantViolation(e.to_string()))
}

/// Process matrix in the Pauli basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiMatrix {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

impl ChiMatrix {
    /// `χ_mn = Σ_k c_km c_kn*` with `K_k = Σ_m c_km σ_m`.
    pub fn from_kraus(channel: &KrausChannel) -> Result<Self> {
        let dim = channel.dim();
        let n_qubits = n_qubits_of(dim)?;
        let basis = linalg::pauli_basis(n_qubits);
        let d2 = basis.len();
        let mut matrix = ComplexMatrix::zeros(d2, d2);
        for k in channel.operators() {
            let coeffs = ComplexVector::from_iterator(
                d2,
                basis.iter().map(|p| (p.adjoint() * k).trace() / real(dim as f64)),
            );
            matrix += &coeffs * coeffs.adjoint();
        }
        Ok(Self { n_qubits, matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// `Σ χ_mn σ_m ρ σ_n†`
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let basis = linalg::pauli_basis(self.n_qubits);
        let mut out = ComplexMatrix::zeros(rho.nrows(), rho.ncols());
        for (m, pm) in basis.iter().enumerate() {
            let left = pm * rho;
            for (n, pn) in basis.iter().enumerate() {
                let w = self.matrix[(m, n)];
                if w.norm() > 0.0 {
                    out += &left * pn.adjoint() * w;
                }
            }
        }
        out
    }
}

fn n_qubits_of(dim: usize) -> Result<usize> {
    match dim {
        2 => Ok(1),
        4 => Ok(2),
        other => Err(QmcError::InvalidInput(format!("unsupported dimension {other}"))),
    }
}

/// Process fidelity `F(χ_a, χ_b)` (Uhlmann fidelity of the unit-trace
/// process matrices).
pub fn process_fidelity(a: &ChiMatrix, b: &ChiMatrix) -> Result<f64> {
    if a.n_qubits != b.n_qubits {
        return Err(QmcError::DimensionMismatch {
            expected: a.matrix.nrows(),
            found: b.matrix.nrows(),
        });
    }
    Ok(linalg::uhlmann_fidelity(&a.matrix, &b.matrix))
}

/// Result of [`process_tomography`].
#[derive(Debug, Clone)]
pub struct ProcessTomography {
    /// Reconstructed process; PSD-projected in finite-shot mode.
    pub chi: ChiMatrix,
    /// Linear-inversion estimate before any projection.
    pub raw: ComplexMatrix,
    /// Total negative spectral weight removed by the projection.
    pub clipped_weight: f64,
    pub shots: Shots,
    pub seed: u64,
}

/// Linear-inversion process tomography.
pub fn process_tomography(
    process: &dyn QuantumProcess,
    probes: &ProbeSet,
    shots: Shots,
    seed: u64,
) -> Result<ProcessTomography> {
    let dim = process.dim();
    if probes.dim() != dim {
        return Err(QmcError::DimensionMismatch {
            expected: dim,
            found: probes.dim(),
        });
    }
    let basis = linalg::pauli_basis(probes.n_qubits());
    let d2 = basis.len();
    let rows = probes.states().len() * dim * dim;
    let mut a = ComplexMatrix::zeros(rows, d2 * d2);
    let mut y = ComplexMatrix::zeros(rows, 1);
    for (j, probe) in probes.states().iter().enumerate() {
        let output = process.process(probe)?;
        let mut rng = substream(seed, j as u64);
        let tomogram = output_tomogram(&output, &basis, shots, &mut rng)?;
        for (m, pm) in basis.iter().enumerate() {
            let left = pm * probe.matrix();
            for (n, pn) in basis.iter().enumerate() {
                let term = &left * pn.adjoint();
                for r in 0..dim {
                    for col in 0..dim {
                        a[(j * dim * dim + r * dim + col, m * d2 + n)] = term[(r, col)];
                    }
                }
            }
        }
        for r in 0..dim {
            for col in 0..dim {
                y[(j * dim * dim + r * dim + col, 0)] = tomogram[(r, col)];
            }
        }
    }
    let x = solve_full_rank(a, y)?;
    let raw = ComplexMatrix::from_fn(d2, d2, |m, n| x[(m * d2 + n, 0)]);
    let (matrix, clipped_weight) = match shots {
        Shots::Exact => (raw.clone(), 0.0),
        Shots::Finite(_) => project_psd_unit_trace(&raw),
    };
    Ok(ProcessTomography {
        chi: ChiMatrix {
            n_qubits: probes.n_qubits(),
            matrix,
        },
        raw,
        clipped_weight,
        shots,
        seed,
    })
}

/// Hermitian part, eigenvalues clipped at zero, trace renormalized to one.
fn project_psd_unit_trace(m: &ComplexMatrix) -> (ComplexMatrix, f64) {
    let (values, _) = linalg::hermitian_eigen(m);
    let clipped: f64 = values.iter().filter(|&&x| x < 0.0).map(|x| -x).sum();
    let psd = linalg::hermitian_map(m, |x| x.max(0.0));
    let tr = psd.trace().re;
    (psd * real(1.0 / tr), clipped)
}

/// Result of [`measurement_tomography`].
#[derive(Debug, Clone)]
pub struct MeasurementTomography {
    /// Reconstructed effects; PSD-clipped in finite-shot mode.
    pub effects: Vec<ComplexMatrix>,
    /// Least-squares estimates before clipping.
    pub raw: Vec<ComplexMatrix>,
    pub shots: Shots,
    pub seed: u64,
}

/// Least-squares reconstruction of the effects `M_k†M_k` from outcome
/// frequencies on the probe states.
pub fn measurement_tomography(
    povm: &PovmSet,
    probes: &ProbeSet,
    shots: Shots,
    seed: u64,
) -> Result<MeasurementTomography> {
    let effects = povm.effects();
    let dim = 4;
    if probes.dim() != dim {
        return Err(QmcError::DimensionMismatch {
            expected: dim,
            found: probes.dim(),
        });
    }
    let basis = linalg::pauli_basis(probes.n_qubits());
    let n_probes = probes.states().len();
    let design = DMatrix::<f64>::from_fn(n_probes, basis.len(), |j, m| {
        probes.states()[j].expectation(&basis[m]) / dim as f64
    });
    let mut freqs = DMatrix::<f64>::zeros(n_probes, effects.len());
    for (j, probe) in probes.states().iter().enumerate() {
        let probs: Vec<f64> = effects.iter().map(|e| probe.expectation(e)).collect();
        let row: Vec<f64> = match shots {
            Shots::Exact => probs,
            Shots::Finite(n) => {
                let mut rng = substream(seed, j as u64);
                sample_counts_with(&mut rng, &probs, n)?
                    .into_iter()
                    .map(|k| k as f64 / n as f64)
                    .collect()
            }
        };
        for (k, f) in row.into_iter().enumerate() {
            freqs[(j, k)] = f;
        }
    }
    let coeffs = solve_full_rank(design, freqs)?;
    let raw: Vec<ComplexMatrix> = (0..effects.len())
        .map(|k| {
            let mut e = ComplexMatrix::zeros(dim, dim);
            for (m, p) in basis.iter().enumerate() {
                e += p * real(coeffs[(m, k)] / dim as f64);
            }
            e
        })
        .collect();
    let reconstructed = match shots {
        Shots::Exact => raw.clone(),
        Shots::Finite(_) => raw
            .iter()
            .map(|e| linalg::hermitian_map(e, |x| x.max(0.0)))
            .collect(),
    };
    Ok(MeasurementTomography {
        effects: reconstructed,
        raw,
        shots,
        seed,
    })
}

/// Fidelity of two effects after normalizing each to unit trace.
pub fn effect_fidelity(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let na = a * real(1.0 / a.trace().re);
    let nb = b * real(1.0 / b.trace().re);
    linalg::uhlmann_fidelity(&na, &nb)
}

/// Plain-text rendering: one `label,re,im` line per matrix entry.
pub fn render_matrix(out: &mut String, label: &str, m: &ComplexMatrix) {
    for r in 0..m.nrows() {
        for col in 0..m.ncols() {
            let z = m[(r, col)];
            let _ = writeln!(out, "{label},{r},{col},{},{}", z.re, z.im);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{canonical_basis, haar_basis, white_noise_povm, HaarSampler};
    use crate::thermo::{thermalizing_channel, BathSpec, QubitSpec};

    fn thermal_channel() -> KrausChannel {
        thermalizing_channel(QubitSpec::new(1.02).unwrap(), BathSpec::new(1.0).unwrap())
    }

    #[test]
    fn identity_channel_has_single_entry() {
        let t = process_tomography(
            &KrausChannel::identity(2),
            &ProbeSet::single_qubit(),
            Shots::Exact,
            0,
        )
        .unwrap();
        let mut expected = ComplexMatrix::zeros(4, 4);
        expected[(0, 0)] = real(1.0);
        assert!(linalg::max_abs(&(t.chi.matrix() - expected)) < 1e-10);
    }

    #[test]
    fn exact_tomography_recovers_analytic_chi() {
        let ch = thermal_channel();
        let analytic = ChiMatrix::from_kraus(&ch).unwrap();
        let t = process_tomography(&ch, &ProbeSet::single_qubit(), Shots::Exact, 0).unwrap();
        assert!(linalg::max_abs(&(t.chi.matrix() - analytic.matrix())) < 1e-10);
        assert!((process_fidelity(&t.chi, &analytic).unwrap() - 1.0).abs() < 1e-10);
        assert!((analytic.matrix().trace().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn chi_reproduces_channel_action() {
        let ch = thermal_channel();
        let chi = ChiMatrix::from_kraus(&ch).unwrap();
        let rho = DensityMatrix::maximally_mixed(2);
        let direct = apply_channel(&ch, &rho).unwrap();
        assert!(linalg::max_abs(&(chi.apply(rho.matrix()) - direct.matrix())) < 1e-14);
    }

    #[test]
    fn two_qubit_process_round_trip() {
        let ch = thermal_channel().tensor(&KrausChannel::identity(2));
        let analytic = ChiMatrix::from_kraus(&ch).unwrap();
        let t = process_tomography(&ch, &ProbeSet::two_qubit(), Shots::Exact, 0).unwrap();
        assert!(linalg::max_abs(&(t.chi.matrix() - analytic.matrix())) < 1e-10);
    }

    #[test]
    fn rank_deficient_probes_are_rejected() {
        let probes = ProbeSet::from_states(ProbeSet::single_qubit().states()[..3].to_vec()).unwrap();
        assert!(matches!(
            process_tomography(&thermal_channel(), &probes, Shots::Exact, 0),
            Err(QmcError::RankDeficient { .. })
        ));
        let probes = ProbeSet::from_states(ProbeSet::two_qubit().states()[..10].to_vec()).unwrap();
        let povm = PovmSet::from_basis(&canonical_basis());
        assert!(measurement_tomography(&povm, &probes, Shots::Exact, 0).is_err());
    }

    #[test]
    fn exact_measurement_tomography_recovers_projectors() {
        let basis = canonical_basis();
        let t = measurement_tomography(
            &PovmSet::from_basis(&basis),
            &ProbeSet::two_qubit(),
            Shots::Exact,
            0,
        )
        .unwrap();
        for (e, p) in t.effects.iter().zip(basis.projectors()) {
            assert!(linalg::max_abs(&(e - p)) < 1e-10);
        }
    }

    #[test]
    fn exact_measurement_tomography_recovers_noisy_effects() {
        let basis = haar_basis(&HaarSampler::at(2, 3));
        let povm = white_noise_povm(&basis, 0.5).unwrap();
        let t = measurement_tomography(&povm, &ProbeSet::two_qubit(), Shots::Exact, 0).unwrap();
        for (e, p) in t.effects.iter().zip(basis.projectors()) {
            let target = p * real(0.5) + linalg::identity(4) * real(0.125);
            assert!(linalg::max_abs(&(e - target)) < 1e-10);
        }
    }

    #[test]
    fn sample_counts_edge_cases() {
        assert_eq!(
            sample_counts(&[1.0, 0.0, 0.0, 0.0], 1000, 3).unwrap(),
            vec![1000, 0, 0, 0]
        );
        assert_eq!(sample_counts(&[0.25; 4], 0, 3).unwrap(), vec![0; 4]);
        assert!(sample_counts(&[1.1, -0.1], 10, 3).is_err());
        assert!(sample_counts(&[0.5, 0.2], 10, 3).is_err());
        let a = sample_counts(&[0.1, 0.2, 0.3, 0.4], 5000, 9).unwrap();
        assert_eq!(a, sample_counts(&[0.1, 0.2, 0.3, 0.4], 5000, 9).unwrap());
        assert_eq!(a.iter().sum::<u64>(), 5000);
        // round-off negatives are tolerated
        assert!(sample_counts(&[1.0 + 1e-13, -1e-13], 10, 1).is_ok());
    }
}
