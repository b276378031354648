// Copyright 2026 The qmc-engine Authors
// SPDX-License-Identifier: Apache-2.0

//! Path-polarization encoding and the linear-optical implementation of
//! both strokes.
//!
//! A qubit with gap ω lives on two rails of a 512-row SLM grid: |0⟩ is
//! |H⟩ at row −d/2 and |1⟩ is |V⟩ at row +d/2, with ω = 0.02 per 8 pixels
//! of separation d. The thermalizing channel is a hologram φ_β(z) plus two
//! wave-plate settings. A two-qubit projector is a singlet filter
//! (two-photon interference at a beam splitter) dressed with local
//! unitaries and a polarization-dependent-loss "bias" interferometer.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{QmcError, Result};
use crate::measure::MeasurementBasis;
use crate::qcore::linalg::{self, from_real_rows, real, ComplexMatrix, ComplexVector, C64};
use crate::qcore::{DensityMatrix, TwoQubitState};
use crate::thermo::{gibbs_population, BathSpec, QubitSpec};

/// SLM rows.
pub const GRID_ROWS: usize = 512;
/// Smallest gap increment.
pub const OMEGA_STEP: f64 = 0.02;
/// Rail separation (pixels) per gap increment.
pub const PIXELS_PER_STEP: u32 = 8;
/// Largest separation that fits on the SLM.
pub const MAX_SEPARATION: u32 = 512;
pub const OMEGA_MAX: f64 = 1.28;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarization {
    H,
    V,
}

/// One spatial-polarization mode of a photon; `z` is the pixel row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mode {
    pub z: i32,
    pub pol: Polarization,
}

/// Single-photon amplitudes over path-polarization modes. The squared norm
/// may drop below one after lossy (post-selected) elements.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PathPolState {
    amplitudes: BTreeMap<Mode, C64>,
}

impl PathPolState {
    /// `α₀|H⟩_{−d/2} + α₁|V⟩_{d/2}`
    pub fn encode_qubit(alpha0: C64, alpha1: C64, separation: u32) -> Result<Self> {
        omega_of_d(separation)?;
        let half = (separation / 2) as i32;
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(
            Mode {
                z: -half,
                pol: Polarization::H,
            },
            alpha0,
        );
        amplitudes.insert(
            Mode {
                z: half,
                pol: Polarization::V,
            },
            alpha1,
        );
        Ok(Self { amplitudes })
    }

    pub fn amplitude(&self, mode: Mode) -> C64 {
        self.amplitudes.get(&mode).copied().unwrap_or(linalg::ZERO)
    }

    pub fn modes(&self) -> impl Iterator<Item = (&Mode, &C64)> {
        self.amplitudes.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    fn add(&mut self, mode: Mode, amp: C64) {
        *self.amplitudes.entry(mode).or_insert(linalg::ZERO) += amp;
    }

    /// Half-separation `d/2` if every populated mode sits on the
    /// `(H, −d/2)` / `(V, +d/2)` rail pair.
    pub fn rail_half_separation(&self) -> Option<i32> {
        let mut half = None;
        for (mode, amp) in &self.amplitudes {
            if amp.norm() == 0.0 {
                continue;
            }
            let h = match mode.pol {
                Polarization::H if mode.z < 0 => -mode.z,
                Polarization::V if mode.z > 0 => mode.z,
                _ => return None,
            };
            match half {
                None => half = Some(h),
                Some(prev) if prev != h => return None,
                _ => {}
            }
        }
        half
    }

    /// Qubit amplitudes `(α₀, α₁)` on the rails at `±d/2`.
    pub fn decode_qubit(&self, separation: u32) -> [C64; 2] {
        let half = (separation / 2) as i32;
        [
            self.amplitude(Mode {
                z: -half,
                pol: Polarization::H,
            }),
            self.amplitude(Mode {
                z: half,
                pol: Polarization::V,
            }),
        ]
    }
}

/// Gap simulated by rail separation `d` (pixels).
pub fn omega_of_d(d: u32) -> Result<f64> {
    if d == 0 || !d.is_multiple_of(PIXELS_PER_STEP) || d > MAX_SEPARATION {
        return Err(QmcError::InvalidInput(format!(
            "separation {d} px is off the grid (positive multiple of 8, at most 512)"
        )));
    }
    Ok(OMEGA_STEP * (d / PIXELS_PER_STEP) as f64)
}

/// Inverse of [`omega_of_d`].
pub fn d_of_omega(omega: f64) -> Result<u32> {
    let steps = (omega / OMEGA_STEP).round();
    if omega.is_nan() || omega <= 0.0 || (steps * OMEGA_STEP - omega).abs() > 1e-9 || omega > OMEGA_MAX + 1e-9
    {
        return Err(QmcError::InvalidInput(format!(
            "gap {omega} is not a multiple of 0.02 in (0, 1.28]"
        )));
    }
    Ok(steps as u32 * PIXELS_PER_STEP)
}

/// Phase profile on the SLM rows, one entry per row `z ∈ {−256..−1, 1..256}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hologram {
    beta: f64,
    phases: Vec<f64>,
}

impl Hologram {
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Phases by pixel index 0..512 (see [`row_of_pixel`]).
    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn phase_at(&self, z: i32) -> Result<f64> {
        Ok(self.phases[pixel_of_row(z)?])
    }

    /// Two columns `pixel phase_rad`, one line per pixel, `#` comments.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# hologram beta={} rows={}", self.beta, GRID_ROWS);
        let _ = writeln!(
            out,
            "# row z = pixel - 256 for pixel < 256, pixel - 255 otherwise"
        );
        let _ = writeln!(out, "pixel,phase_rad");
        for (i, phase) in self.phases.iter().enumerate() {
            let _ = writeln!(out, "{i},{phase}");
        }
        out
    }
}

/// Row `z` of pixel index `i`. Row 0 does not exist; the grid is split
/// symmetrically around the optical axis.
pub fn row_of_pixel(i: usize) -> i32 {
    let half = (GRID_ROWS / 2) as i32;
    let i = i as i32;
    if i < half {
        i - half
    } else {
        i - half + 1
    }
}

pub fn pixel_of_row(z: i32) -> Result<usize> {
    let half = (GRID_ROWS / 2) as i32;
    match z {
        z if (-half..0).contains(&z) => Ok((z + half) as usize),
        z if (1..=half).contains(&z) => Ok((z + half - 1) as usize),
        _ => Err(QmcError::InvalidInput(format!("row {z} is off the SLM"))),
    }
}

/// Gap band of an upper-half row: rows `(4(k−1), 4k]` carry `ω = 0.02 k`,
/// so the rail at `d/2 = 4k` reads the value for separation `d = 8k`.
fn band_omega(z: i32) -> f64 {
    let k = z.unsigned_abs().div_ceil(PIXELS_PER_STEP / 2);
    OMEGA_STEP * k as f64
}

/// Solves `sin²(φ(d/2)/2) = p(ω(d), β)` on every row of the upper half and
/// fills the lower half with `φ(−z) = φ(z) − π`.
pub fn solve_hologram(bath: BathSpec) -> Hologram {
    let mut phases = vec![0.0; GRID_ROWS];
    for (i, slot) in phases.iter_mut().enumerate() {
        let z = row_of_pixel(i);
        let spec = QubitSpec::new(band_omega(z)).expect("band gaps are positive");
        let upper = 2.0 * gibbs_population(spec, bath).sqrt().asin();
        *slot = if z > 0 { upper } else { upper - PI };
    }
    Hologram {
        beta: bath.beta(),
        phases,
    }
}

/// The two wave-plate configurations of the thermalizing stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThermalSetting {
    /// HWP1-3 at (22.5°, 22.5°, 0°): rails keep their mode.
    Cosine,
    /// HWP1-3 at (22.5°, −22.5°, 45°): rails swap path and polarization.
    Sine,
}

impl ThermalSetting {
    pub const ALL: [ThermalSetting; 2] = [ThermalSetting::Cosine, ThermalSetting::Sine];

    pub fn plate_angles_deg(self) -> [f64; 3] {
        match self {
            ThermalSetting::Cosine => [22.5, 22.5, 0.0],
            ThermalSetting::Sine => [22.5, -22.5, 45.0],
        }
    }
}

/// One pass through the SLM stage in the given setting.
///
/// Cosine: `|V⟩_z → cos(φ(z)/2)|V⟩_z`, `|H⟩_{−z} → cos(φ(−z)/2)|H⟩_{−z}`.
/// Sine: `|V⟩_z → sin(φ(z)/2)|H⟩_{−z}`, `|H⟩_{−z} → −sin(φ(−z)/2)|V⟩_z`.
/// Light leaving the rails is discarded.
pub fn thermalize_optically(
    state: &PathPolState,
    hologram: &Hologram,
    setting: ThermalSetting,
) -> Result<PathPolState> {
    if state.rail_half_separation().is_none() {
        return Err(QmcError::InvalidInput("state is not on a ±d/2 rail pair".into()));
    }
    let mut out = PathPolState::default();
    for (&mode, &amp) in state.modes() {
        let phi = hologram.phase_at(mode.z)?;
        let (target, factor) = match (setting, mode.pol) {
            (ThermalSetting::Cosine, _) => (mode, (phi / 2.0).cos()),
            (ThermalSetting::Sine, Polarization::V) => (
                Mode {
                    z: -mode.z,
                    pol: Polarization::H,
                },
                (phi / 2.0).sin(),
            ),
            (ThermalSetting::Sine, Polarization::H) => (
                Mode {
                    z: -mode.z,
                    pol: Polarization::V,
                },
                -(phi / 2.0).sin(),
            ),
        };
        out.add(target, amp * factor);
    }
    Ok(out)
}

/// Thermalizing stage acting on the qubit encoded at separation `d`, with
/// both settings time-mixed and inter-rail coherence removed by the path
/// length difference.
#[derive(Debug, Clone)]
pub struct OpticalThermalizer {
    hologram: Hologram,
    separation: u32,
}

impl OpticalThermalizer {
    pub fn new(hologram: Hologram, separation: u32) -> Result<Self> {
        omega_of_d(separation)?;
        Ok(Self { hologram, separation })
    }

    pub fn separation(&self) -> u32 {
        self.separation
    }

    /// One operator per (setting, input rail): the rail's image under the
    /// setting, `|out⟩⟨rail|`.
    pub fn kraus_operators(&self) -> Vec<ComplexMatrix> {
        let mut ops = Vec::with_capacity(4);
        for setting in ThermalSetting::ALL {
            for rail in 0..2 {
                let (a0, a1) = if rail == 0 {
                    (linalg::ONE, linalg::ZERO)
                } else {
                    (linalg::ZERO, linalg::ONE)
                };
                let input = PathPolState::encode_qubit(a0, a1, self.separation)
                    .expect("separation validated in constructor");
                let output = thermalize_optically(&input, &self.hologram, setting)
                    .expect("encoded state is on the rails");
                let image = output.decode_qubit(self.separation);
                let mut k = ComplexMatrix::zeros(2, 2);
                k[(0, rail)] = image[0];
                k[(1, rail)] = image[1];
                ops.push(k);
            }
        }
        ops
    }

    /// Sum of both settings' detected outputs.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != 2 {
            return Err(QmcError::DimensionMismatch {
                expected: 2,
                found: rho.dim(),
            });
        }
        Ok(DensityMatrix::from_matrix_unchecked(linalg::kraus_sum(
            &self.kraus_operators(),
            rho.matrix(),
        )))
    }
}

/// `vec = (U1 ⊗ U2)(a|HV⟩ − b|VH⟩)` with `0 ≤ a ≤ b`, `a² + b² = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtForm {
    pub u1: ComplexMatrix,
    pub u2: ComplexMatrix,
    pub a: f64,
    pub b: f64,
}

impl SchmidtForm {
    pub fn reconstruct(&self) -> ComplexVector {
        let core = linalg::ket_real(&[0.0, self.a, -self.b, 0.0]);
        linalg::tensor(&self.u1, &self.u2) * core
    }
}

/// Schmidt decomposition onto the singlet-like form used by the optics.
///
/// With the coefficient matrix `M_ij = ⟨ij|vec⟩ = u Σ v†` (singular values
/// sorted descending, `Σ = diag(b, a)`), the form `a|HV⟩ − b|VH⟩` has
/// coefficient matrix `C = YΣ` with `Y = [[0,1],[−1,0]]`, so
/// `U1 = u Yᵀ` and `U2 = (v†)ᵀ`.
pub fn schmidt_projector(vec: &ComplexVector) -> Result<SchmidtForm> {
    if vec.len() != 4 || (vec.norm() - 1.0).abs() > 1e-10 {
        return Err(QmcError::InvalidInput("expected a two-qubit unit vector".into()));
    }
    let m = ComplexMatrix::from_row_slice(2, 2, vec.as_slice());
    let svd = m.svd(true, true);
    let mut u = svd.u.expect("requested");
    let mut v_t = svd.v_t.expect("requested");
    let mut s = [svd.singular_values[0], svd.singular_values[1]];
    if s[0] < s[1] {
        u.swap_columns(0, 1);
        v_t.swap_rows(0, 1);
        s.swap(0, 1);
    }
    let y_t = from_real_rows(2, 2, &[0.0, -1.0, 1.0, 0.0]);
    Ok(SchmidtForm {
        u1: u * y_t,
        u2: v_t.transpose(),
        a: s[1],
        b: s[0],
    })
}

/// Half-wave plate at `theta` (degrees) from the horizontal.
pub fn half_wave_plate(theta_deg: f64) -> ComplexMatrix {
    let t = 2.0 * theta_deg.to_radians();
    from_real_rows(2, 2, &[t.cos(), t.sin(), t.sin(), -t.cos()])
}

/// Quarter-wave plate at `theta` (degrees), up to a global phase.
pub fn quarter_wave_plate(theta_deg: f64) -> ComplexMatrix {
    let t = theta_deg.to_radians();
    let (cs, sn) = (t.cos(), t.sin());
    let i = linalg::I;
    ComplexMatrix::from_row_slice(
        2,
        2,
        &[
            real(cs * cs) + i * (sn * sn),
            (real(1.0) - i) * (sn * cs),
            (real(1.0) - i) * (sn * cs),
            real(sn * sn) + i * (cs * cs),
        ],
    )
}

pub fn pauli_x() -> ComplexMatrix {
    from_real_rows(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

/// Half-wave-plate angle of the bias interferometer's H arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasSetting {
    pub theta_deg: f64,
}

impl BiasSetting {
    pub fn new(theta_deg: f64) -> Result<Self> {
        if !(0.0..=45.0).contains(&theta_deg) {
            return Err(QmcError::InvalidInput(format!(
                "bias angle {theta_deg}° outside [0, 45]"
            )));
        }
        Ok(Self { theta_deg })
    }

    /// `sin 2θ`
    pub fn h_transmission(&self) -> f64 {
        (2.0 * self.theta_deg.to_radians()).sin()
    }

    /// Projection efficiency `η = (sin² 2θ + 1)/2`.
    pub fn efficiency(&self) -> f64 {
        (self.h_transmission().powi(2) + 1.0) / 2.0
    }

    /// Jones matrix of the interferometer: a beam displacer splits H and V
    /// into two arms, the H arm passes a HWP at θ and the V arm a HWP at
    /// 45°, and the recombining displacer accepts V from the first arm and
    /// H from the second. The polarization flip is undone by a Pauli X
    /// that the downstream wave plates absorb, leaving `diag(sin 2θ, 1)`.
    pub fn jones(&self) -> ComplexMatrix {
        let h_arm = half_wave_plate(self.theta_deg);
        let v_arm = half_wave_plate(45.0);
        let mut mz = ComplexMatrix::zeros(2, 2);
        // column = input polarization; H input runs the H arm, exits as V.
        mz[(1, 0)] = h_arm[(1, 0)];
        mz[(0, 1)] = v_arm[(0, 1)];
        pauli_x() * mz
    }
}

/// Bias setting reproducing Schmidt coefficients `(a, b)`, `a ≤ b`.
pub fn bias_from_coefficients(a: f64, b: f64) -> Result<BiasSetting> {
    if b <= 0.0 {
        return Err(QmcError::InvalidInput("b must be positive".into()));
    }
    if a < 0.0 || a > b + 1e-12 || (a * a + b * b - 1.0).abs() > 1e-10 {
        return Err(QmcError::InvalidInput(format!(
            "coefficients ({a}, {b}) violate 0 ≤ a ≤ b, a² + b² = 1"
        )));
    }
    let ratio = (a / b).min(1.0);
    BiasSetting::new(0.5 * ratio.asin().to_degrees())
}

/// Optical train realizing one projector `|φ⟩⟨φ|`.
#[derive(Debug, Clone)]
pub struct ProjectorOptics {
    pub schmidt: SchmidtForm,
    pub bias: BiasSetting,
    /// `U1 ⊗ U2`
    pub local: ComplexMatrix,
    /// Bias filter on photon 1, `F ⊗ I`.
    pub filter: ComplexMatrix,
    /// `η`; the train applies `η |φ⟩⟨φ|`.
    pub efficiency: f64,
}

/// `(|HV⟩ − |VH⟩)(⟨HV| − ⟨VH|)/2`
pub fn singlet_projector() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    linalg::projector(&linalg::ket_real(&[0.0, s, -s, 0.0]))
}

/// Local optics around the singlet filter for a unit vector.
pub fn projector_optics(vec: &ComplexVector) -> ProjectorOptics {
    let schmidt = schmidt_projector(vec).expect("basis vectors are unit vectors");
    let bias = bias_from_coefficients(schmidt.a, schmidt.b).expect("Schmidt form is normalized");
    let local = linalg::tensor(&schmidt.u1, &schmidt.u2);
    let filter = linalg::tensor(&bias.jones(), &linalg::identity(2));
    ProjectorOptics {
        efficiency: bias.efficiency(),
        schmidt,
        bias,
        local,
        filter,
    }
}

/// Non-selective measurement realized optically: each projector is the
/// chain `U·F · Π_singlet · F·U†`, rescaled by `1/η²`, and the four
/// branches are mixed. Equals the abstract measurement channel.
pub fn project_optically(basis: &MeasurementBasis, rho: &TwoQubitState) -> TwoQubitState {
    let singlet = singlet_projector();
    let mut out = ComplexMatrix::zeros(4, 4);
    for v in basis.vectors() {
        let optics = projector_optics(v);
        let k = &optics.local * &optics.filter * &singlet * &optics.filter * optics.local.adjoint();
        out += linalg::kraus_sum(&[k], rho.matrix()) * real(1.0 / optics.efficiency.powi(2));
    }
    TwoQubitState::from_matrix_unchecked(out)
}
