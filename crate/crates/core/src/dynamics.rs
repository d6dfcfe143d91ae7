//! Pseudo-spin-½ pulse-sequence dynamics and Monte Carlo photon readout.
//!
//! State convention follows the interaction-picture treatment of the
//! Ramsey sequence: |↑⟩ = |m_s = 0⟩, |↓⟩ = |m_s = +1⟩, with the final
//! state after the two π/2 pulses
//!
//! ```text
//! |ψ̃⟩ = cos((φ−ϑ)/2)|↓⟩ + i e^{iϑ} sin((φ−ϑ)/2)|↑⟩,
//! ```
//!
//! and ⟨S_z⟩ = (ħ/2)cos(φ−ϑ), i.e. σ_z has eigenvalue +1 on |↓⟩. Optical
//! readout maps |↑⟩ onto the brighter coherent mode (mean `a` photons) and
//! |↓⟩ onto the dimmer one (mean `b`). These assignments reproduce
//! ⟨N̂⟩ = b·cos²((φ−ϑ)/2) + a·sin²((φ−ϑ)/2) and the photon-number variance
//! (a−b)²/4·sin²(φ−ϑ) + ⟨N̂⟩, which is what every noise formula in this
//! crate builds on. Pulses are treated as instantaneous rotations.

use num_complex::Complex64;
use thiserror::Error;

use crate::constants::constants;
use crate::rng::CounterRng;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("linearization fails at ϑ = 0: the linear term δ⟨S_z⟩ vanishes")]
    Linearization,
    #[error("no photon counts supplied")]
    EmptyCounts,
    #[error("readout model requires a ≥ b ≥ 0, got a = {a}, b = {b}")]
    InvalidReadoutModel { a: f64, b: f64 },
}

/// Two-level state (c_up, c_down) in the {|↑⟩, |↓⟩} = {|m_s=0⟩, |m_s=+1⟩}
/// labels above.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinState {
    pub c_up: Complex64,
    pub c_down: Complex64,
}

impl SpinState {
    pub fn up() -> Self {
        Self {
            c_up: Complex64::new(1.0, 0.0),
            c_down: Complex64::new(0.0, 0.0),
        }
    }

    pub fn down() -> Self {
        Self {
            c_up: Complex64::new(0.0, 0.0),
            c_down: Complex64::new(1.0, 0.0),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c_up.norm_sqr() + self.c_down.norm_sqr()
    }

    /// ⟨S_z⟩ in units of ħ/2 (σ_z eigenvalue +1 on |↓⟩).
    pub fn sz_expectation(&self) -> f64 {
        self.c_down.norm_sqr() - self.c_up.norm_sqr()
    }

    /// Apply a 2×2 matrix given in (|↓⟩, |↑⟩) ordering, matching the
    /// propagators as printed in the derivation.
    fn apply(&self, m: [[Complex64; 2]; 2]) -> Self {
        let down = m[0][0] * self.c_down + m[0][1] * self.c_up;
        let up = m[1][0] * self.c_down + m[1][1] * self.c_up;
        Self {
            c_up: up,
            c_down: down,
        }
    }
}

/// Ramsey fringe observable ⟨S_z⟩ in units of ħ/2 for accumulated phase
/// `phi` and final-pulse phase `vartheta`: cos(φ − ϑ).
pub fn ramsey_expectation(phi: f64, vartheta: f64) -> f64 {
    (phi - vartheta).cos()
}

/// Result of propagating a Ramsey sequence.
#[derive(Debug, Clone, Copy)]
pub struct RamseyPropagation {
    pub state: SpinState,
    /// Set when |γ_e·B_sense| / Ω_Rabi ≥ 1e-2, i.e. the B_sense ≪ B₁
    /// assumption behind dropping the sensed field during pulses is shaky.
    pub weak_drive_warning: bool,
}

/// Propagate the π/2 — free precession(τ) — π/2(ϑ) sequence for a sensed
/// axial field `b_sense_t` (tesla) and Rabi angular frequency `b1_rabi`
/// (rad/s, used only for the weak-drive check).
pub fn propagate_ramsey(
    b_sense_t: f64,
    tau_s: f64,
    b1_rabi: f64,
    vartheta: f64,
) -> RamseyPropagation {
    let gamma_e = constants().gamma_e();
    let phi = gamma_e * b_sense_t * tau_s;
    let state = propagate_ramsey_phase(phi, vartheta);
    let weak_drive_warning = b1_rabi > 0.0 && (gamma_e * b_sense_t).abs() / b1_rabi >= 1e-2;
    RamseyPropagation {
        state,
        weak_drive_warning,
    }
}

/// Same sequence parameterized directly by the accumulated phase φ.
pub fn propagate_ramsey_phase(phi: f64, vartheta: f64) -> SpinState {
    let i = Complex64::new(0.0, 1.0);
    let invsq = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);

    // exp(−iπσ_y/4) in (|↓⟩, |↑⟩) ordering.
    let first = [
        [invsq, -invsq],
        [invsq, invsq],
    ];
    // Free precession exp(−iφσ_z/2).
    let free = [
        [(-i * phi / 2.0).exp(), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), (i * phi / 2.0).exp()],
    ];
    // Second π/2 pulse with relative phase ϑ.
    let e_m = (-i * vartheta).exp();
    let e_p = (i * vartheta).exp();
    let second = [
        [invsq, -invsq * e_m],
        [invsq * e_p, invsq],
    ];

    SpinState::up().apply(first).apply(free).apply(second)
}

/// Free-induction-decay signal Σ_k w_k cos(2π(f₀ + Δ_k)τ) · e^{−(τ/T₂*)^p}
/// over `tau_grid`, with hyperfine line offsets Δ_k centered on f₀ and
/// weights normalized to unit sum.
pub fn fid_signal(
    tau_grid: &[f64],
    t2star_s: f64,
    p: f64,
    fringe_freq_hz: f64,
    hyperfine: Option<&HyperfineLines>,
) -> Vec<f64> {
    assert!(t2star_s > 0.0 && p > 0.0);
    let lines: Vec<(f64, f64)> = match hyperfine {
        None => vec![(fringe_freq_hz, 1.0)],
        Some(h) => {
            let n = h.weights.len();
            let total: f64 = h.weights.iter().sum();
            h.weights
                .iter()
                .enumerate()
                .map(|(k, w)| {
                    let offset = (k as f64 - (n as f64 - 1.0) / 2.0) * h.splitting_hz;
                    (fringe_freq_hz + offset, w / total)
                })
                .collect()
        }
    };
    tau_grid
        .iter()
        .map(|&tau| {
            let envelope = (-(tau / t2star_s).powf(p)).exp();
            let carrier: f64 = lines
                .iter()
                .map(|&(f, w)| w * (std::f64::consts::TAU * f * tau).cos())
                .sum();
            carrier * envelope
        })
        .collect()
}

/// Hyperfine multiplet description for [`fid_signal`].
#[derive(Debug, Clone)]
pub struct HyperfineLines {
    pub splitting_hz: f64,
    pub weights: Vec<f64>,
}

/// Phase accumulated by a Hahn echo sequence sensing a sinusoidal field of
/// amplitude `b_ac_t` and period `t_b_s`, with the three pulses at t = 0,
/// τ/2, τ and the field starting at a node (phase-locked case).
///
/// For a static field (infinite period) the refocusing pulse cancels the
/// phase exactly. Phase-locked at τ = T_B the magnitude is maximal,
/// (2/π)·γ_e·B_ac·τ; without phase lock the RMS phase over a uniformly
/// random field phase is that value divided by √2.
pub fn hahn_echo_phase(b_ac_t: f64, t_b_s: f64, tau_s: f64, phase_locked: bool) -> f64 {
    assert!(tau_s > 0.0);
    if b_ac_t == 0.0 || !t_b_s.is_finite() {
        return 0.0;
    }
    let gamma_e = constants().gamma_e();
    let omega = std::f64::consts::TAU / t_b_s;
    // ∫₀^{τ/2} sin(ωt)dt − ∫_{τ/2}^{τ} sin(ωt)dt
    let integral = (1.0 - 2.0 * (omega * tau_s / 2.0).cos() + (omega * tau_s).cos()) / omega;
    let locked = gamma_e * b_ac_t * integral;
    if phase_locked {
        locked
    } else {
        locked / std::f64::consts::SQRT_2
    }
}

/// Coherent-state photon readout model: mean `a` photons from m_s = 0 and
/// mean `b` from m_s = ±1 per readout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutModel {
    pub a: f64,
    pub b: f64,
}

impl ReadoutModel {
    pub fn new(a: f64, b: f64) -> Result<Self, DynamicsError> {
        if !(a >= b && b >= 0.0) {
            return Err(DynamicsError::InvalidReadoutModel { a, b });
        }
        Ok(Self { a, b })
    }

    /// Fringe contrast C = (a−b)/(a+b).
    pub fn contrast(&self) -> f64 {
        (self.a - self.b) / (self.a + self.b)
    }

    /// Mean photons per readout n_avg = (a+b)/2.
    pub fn n_avg(&self) -> f64 {
        0.5 * (self.a + self.b)
    }
}

/// Simulate photon counts for `shots` readouts of `state`.
///
/// Per shot: the spin branch is drawn with the Born probabilities, then a
/// Poisson count with mean `a` (↑ branch) or `b` (↓ branch). Each shot uses
/// its own counter-derived substream, so output is identical however the
/// shot range is partitioned across threads.
pub fn monte_carlo_readout(
    state: &SpinState,
    model: &ReadoutModel,
    shots: u64,
    seed: u64,
) -> Vec<u64> {
    assert!(shots >= 1);
    let norm = state.norm_sqr();
    let p_up = state.c_up.norm_sqr() / norm;
    (0..shots)
        .map(|shot| single_shot(p_up, model, seed, shot))
        .collect()
}

/// One readout draw from substream `shot` of `seed`; exposed so callers can
/// distribute shots across threads without changing the output.
pub fn single_shot(p_up: f64, model: &ReadoutModel, seed: u64, shot: u64) -> u64 {
    let mut rng = CounterRng::substream(seed, shot);
    let mean = if rng.next_f64() < p_up {
        model.a
    } else {
        model.b
    };
    rng.poisson(mean)
}

/// Calibration data for [`estimate_field`].
#[derive(Debug, Clone, Copy)]
pub struct EstimatorCalibration {
    pub a: f64,
    pub b: f64,
    pub tau_s: f64,
    pub vartheta: f64,
}

/// Invert the linearized Ramsey fringe to estimate the sensed field from
/// photon counts.
///
/// Reconstructs ⟨S_z⟩ (ħ/2 units) from the mean count via
/// s = −(⟨N⟩ − (a+b)/2)/((a−b)/2) and applies
/// B ≈ (s − cos ϑ)/(γ_e τ sin ϑ); at ϑ = π/2 this is (2/ħγ_eτ)⟨S_z⟩. Fails
/// at ϑ = 0 where the fringe slope vanishes.
pub fn estimate_field(
    counts: &[u64],
    cal: &EstimatorCalibration,
) -> Result<f64, DynamicsError> {
    if counts.is_empty() {
        return Err(DynamicsError::EmptyCounts);
    }
    let sin_t = cal.vartheta.sin();
    if sin_t.abs() < 1e-12 {
        return Err(DynamicsError::Linearization);
    }
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / counts.len() as f64;
    let s = -(mean - 0.5 * (cal.a + cal.b)) / (0.5 * (cal.a - cal.b));
    let gamma_e = constants().gamma_e();
    Ok((s - cal.vartheta.cos()) / (gamma_e * cal.tau_s * sin_t))
}

/// One full simulated Ramsey magnetometry measurement: draw a dephasing
/// detuning for this realization, propagate the sequence, and read out a
/// photon count.
///
/// The detuning distribution reproduces the FID envelope e^{−(τ/T₂*)^p}:
/// Lorentzian with HWHM 1/T₂* (rad/s) for p = 1, Gaussian with
/// σ = √2/T₂* for p = 2 (only those two exponents are supported here).
/// `measurement` indexes the substream; stream `2·measurement` drives the
/// dephasing draw and `2·measurement + 1` the readout.
#[derive(Debug, Clone, Copy)]
pub struct RamseyMeasurementConfig {
    pub b_sense_t: f64,
    pub tau_s: f64,
    pub vartheta: f64,
    pub model: ReadoutModel,
    /// None disables dephasing draws.
    pub dephasing: Option<(f64, f64)>, // (t2star_s, p)
}

pub fn simulate_ramsey_measurement(
    cfg: &RamseyMeasurementConfig,
    seed: u64,
    measurement: u64,
) -> u64 {
    let gamma_e = constants().gamma_e();
    let mut phi = gamma_e * cfg.b_sense_t * cfg.tau_s;
    if let Some((t2star, p)) = cfg.dephasing {
        let mut rng = CounterRng::substream(seed, 2 * measurement);
        let delta_omega = if p == 1.0 {
            rng.lorentzian(1.0 / t2star)
        } else if p == 2.0 {
            rng.standard_normal() * std::f64::consts::SQRT_2 / t2star
        } else {
            panic!("dephasing draws support p = 1 or p = 2, got {p}");
        };
        phi += delta_omega * cfg.tau_s;
    }
    let state = propagate_ramsey_phase(phi, cfg.vartheta);
    let p_up = state.c_up.norm_sqr() / state.norm_sqr();
    single_shot(p_up, &cfg.model, seed, 2 * measurement + 1)
}
