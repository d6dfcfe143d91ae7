//! One-dimensional optimizations and parameter sweeps.
//!
//! The free-precession time that minimizes the Ramsey (or echo)
//! sensitivity balances the dephasing penalty against the per-measurement
//! duty cycle. With overhead t_O = t_I + t_R the τ-dependent part of the
//! sensitivity is e^{(τ/T)^p}·√(τ+t_O)/τ; it is minimized at exactly
//! τ = T/2 for t_O = 0 and p ∈ {1, 2}, approaching τ = T for t_O ≫ T
//! (p = 1). Golden-section search over a bracket is used instead of
//! derivative root finding; the objective is smooth and unimodal on the
//! bracket for the p range of interest.

use serde::Serialize;

use crate::budget::ScalingConstants;
use crate::constants::{constants, PPM_TO_PER_MM3};
use crate::sample::{DiamondSample, ProtocolParams, SampleError};
use crate::sensitivity::eta_ramsey_shot;

/// Minimize `f` on `[a, b]` by golden-section search to absolute bracket
/// width `tol`. Returns the midpoint of the final bracket.
pub fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// τ-dependent part of the pulsed sensitivity,
/// e^{(τ/T)^p}·√(τ + t_O)/τ. Projection and readout factors cancel in any
/// ratio of these figures.
pub fn relative_eta(tau_s: f64, t_coh_s: f64, p: f64, t_o_s: f64) -> f64 {
    ((tau_s / t_coh_s).powf(p)).exp() * (tau_s + t_o_s).sqrt() / tau_s
}

/// Optimal free-precession time for coherence time `t_coh_s`, stretch
/// exponent `p`, and overhead `t_o_s`, to 1e-8 relative tolerance on the
/// bracket [1e-3·T, 3·T].
pub fn optimal_tau(t_coh_s: f64, p: f64, t_o_s: f64) -> f64 {
    assert!(t_coh_s > 0.0 && p > 0.0 && t_o_s >= 0.0);
    golden_section_min(
        |tau| relative_eta(tau, t_coh_s, p, t_o_s),
        1e-3 * t_coh_s,
        3.0 * t_coh_s,
        1e-8 * t_coh_s,
    )
}

/// Sensitivity enhancement from extending the dephasing time
/// `t2star_ref_s` → `t2star_new_s` at fixed overhead, with τ re-optimized
/// on both sides: η(ref, τ*)/η(new, τ*). Bounded below by √r and above by
/// r for r = T_new/T_ref.
pub fn enhancement(t2star_new_s: f64, t2star_ref_s: f64, t_o_s: f64, p: f64) -> f64 {
    let tau_ref = optimal_tau(t2star_ref_s, p, t_o_s);
    let tau_new = optimal_tau(t2star_new_s, p, t_o_s);
    relative_eta(tau_ref, t2star_ref_s, p, t_o_s) / relative_eta(tau_new, t2star_new_s, p, t_o_s)
}

/// One grid point of a nitrogen-concentration sweep.
#[derive(Debug, Clone, Serialize)]
pub struct NitrogenSweepRow {
    pub n_total_ppm: f64,
    pub t2star_s: f64,
    pub tau_s: f64,
    /// Photons per measurement 𝒩 from a 1 mm³ interrogation volume.
    pub photons_per_measurement: f64,
    pub eta_t_per_sqrt_hz: f64,
}

/// Nitrogen sweep result: the per-point table plus the consolidated rate
/// constant κ and the knee concentration [N*] = 1/(κ·T₂*{other}) above
/// which nitrogen dominates dephasing (0 when no non-nitrogen mechanism is
/// present).
#[derive(Debug, Clone, Serialize)]
pub struct NitrogenSweep {
    pub kappa_per_s_ppm: f64,
    pub knee_ppm: f64,
    pub rows: Vec<NitrogenSweepRow>,
}

/// Sweep total nitrogen concentration holding the template's conversion
/// efficiencies fixed.
///
/// κ = A_N·(1−E−E⁰−E⁺) + A_NV⁻·E + A_NV⁰·E⁰, with the N_S⁰ fraction
/// taken directly from the template and A_NV⁰ zero unless
/// `nv0_as_nitrogen` enables the A_N-valued toggle. The sensor count uses
/// a 1 mm³ reference volume (1 ppm NV⁻ = 1.76e14 sensors); τ is
/// re-optimized at every grid point.
pub fn nitrogen_sweep(
    template: &DiamondSample,
    n_range_ppm: &[f64],
    protocol: &ProtocolParams,
    nv0_as_nitrogen: bool,
) -> Result<NitrogenSweep, SampleError> {
    template.validate()?;
    protocol.validate()?;
    let k = ScalingConstants::default();
    if template.n_total_ppm <= 0.0 {
        return Err(SampleError::Validation {
            field: "n_total_ppm",
            message: "nitrogen sweep requires a template with n_total > 0".into(),
        });
    }
    let f_ns0 = template.n_s0_ppm / template.n_total_ppm;
    let e_conv = template.e_conv;
    let e0 = template.nv0_ppm / template.n_total_ppm;
    let a_nv0 = if nv0_as_nitrogen { k.a_n } else { 0.0 };
    let kappa = k.a_n * f_ns0 + k.a_nv_perp_group * e_conv + a_nv0 * e0;
    let other_rate = if template.t2star_other_s.is_finite() {
        1.0 / template.t2star_other_s
    } else {
        0.0
    };
    let knee_ppm = if other_rate > 0.0 { other_rate / kappa } else { 0.0 };

    let t_o = protocol.t_i_s + protocol.t_r_s;
    let mut rows = Vec::with_capacity(n_range_ppm.len());
    for &n_ppm in n_range_ppm {
        if !(n_ppm > 0.0) {
            return Err(SampleError::Validation {
                field: "n_total_ppm",
                message: format!("sweep point {n_ppm} must be > 0"),
            });
        }
        let t2star = 1.0 / (kappa * n_ppm + other_rate);
        let tau = optimal_tau(t2star, protocol.p_exponent, t_o);
        let sensors = (n_ppm * e_conv * PPM_TO_PER_MM3).max(1.0);
        let mut p = protocol.clone();
        p.tau_s = tau;
        p.n_sensors = sensors;
        let eta = eta_ramsey_shot(&p, t2star)?.eta_t_per_sqrt_hz;
        rows.push(NitrogenSweepRow {
            n_total_ppm: n_ppm,
            t2star_s: t2star,
            tau_s: tau,
            photons_per_measurement: sensors * protocol.n_avg,
            eta_t_per_sqrt_hz: eta,
        });
    }
    Ok(NitrogenSweep {
        kappa_per_s_ppm: kappa,
        knee_ppm,
        rows,
    })
}

/// Optical initialization energy and mean power for `n_sensors` NV⁻
/// centers at `m_photons_per_nv` initialization photons each, with one
/// measurement per T₂*.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InitPower {
    pub energy_j: f64,
    pub power_w: f64,
}

pub fn init_power(
    n_sensors: f64,
    m_photons_per_nv: f64,
    t2star_s: f64,
    wavelength_m: f64,
) -> InitPower {
    assert!(n_sensors > 0.0 && m_photons_per_nv > 0.0 && t2star_s > 0.0 && wavelength_m > 0.0);
    let k = constants();
    let energy_j = n_sensors * m_photons_per_nv * k.h * k.c / wavelength_m;
    InitPower {
        energy_j,
        power_w: energy_j / t2star_s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn optimal_tau_zero_overhead_is_half_t2star() {
        for p in [1.0, 2.0] {
            let tau = optimal_tau(1e-6, p, 0.0);
            assert_relative_eq!(tau, 0.5e-6, max_relative = 1e-6);
        }
    }

    #[test]
    fn optimal_tau_large_overhead_approaches_t2star() {
        let t2 = 1e-6;
        let tau = optimal_tau(t2, 1.0, 100.0 * t2);
        assert!((tau - t2).abs() / t2 < 0.02, "τ = {tau}");
        // Brute-force oracle on a fine grid.
        let mut best = (f64::INFINITY, 0.0);
        for i in 1..1_000_000u64 {
            let t = 3.0 * t2 * i as f64 / 1_000_000.0;
            let v = relative_eta(t, t2, 1.0, 100.0 * t2);
            if v < best.0 {
                best = (v, t);
            }
        }
        assert_relative_eq!(tau, best.1, max_relative = 1e-4);
    }

    #[test]
    fn optimal_tau_first_order_optimality() {
        for (p, t_o) in [(1.0, 0.0), (2.0, 0.0), (1.0, 5e-6), (1.5, 1e-6)] {
            let t2 = 1e-6;
            let tau = optimal_tau(t2, p, t_o);
            let h = tau * 1e-5;
            let d = (relative_eta(tau + h, t2, p, t_o) - relative_eta(tau - h, t2, p, t_o))
                / (2.0 * h);
            let scale = relative_eta(tau, t2, p, t_o) / tau;
            assert!(
                (d / scale).abs() < 1e-6,
                "stationarity violated at p={p}, t_O={t_o}: {}",
                d / scale
            );
        }
    }

    #[test]
    fn enhancement_zero_overhead_is_sqrt_ratio() {
        let e = enhancement(10e-6, 1e-6, 0.0, 1.0);
        assert_relative_eq!(e, 10.0f64.sqrt(), max_relative = 1e-7);
    }

    #[test]
    fn enhancement_large_overhead_approaches_ratio() {
        let r = 10.0;
        let t_ref = 1e-6;
        let e = enhancement(r * t_ref, t_ref, 1e6 * t_ref * r, 1.0);
        assert_relative_eq!(e, r, max_relative = 1e-2);
    }

    proptest! {
        #[test]
        fn enhancement_bounds(r in 1.0f64..100.0, t_o_frac in 0.0f64..100.0) {
            let t_ref = 1e-6;
            let e = enhancement(r * t_ref, t_ref, t_o_frac * t_ref, 1.0);
            prop_assert!(e >= r.sqrt() * (1.0 - 1e-6), "e = {e} < √r = {}", r.sqrt());
            prop_assert!(e <= r * (1.0 + 1e-6), "e = {e} > r = {r}");
        }
    }

    fn sweep_template() -> DiamondSample {
        DiamondSample {
            n_total_ppm: 10.0,
            n_s0_ppm: 7.0,
            nv_minus_ppm: 3.0,
            nv0_ppm: 0.0,
            c13_ppm: 0.0,
            e_conv: 0.3,
            chi: 0.3,
            zeta: 1.0,
            xi_perp_hz: 0.0,
            xi_perp_spread_hz: 0.0,
            t2star_other_s: f64::INFINITY,
            t1_s: f64::INFINITY,
        }
    }

    #[test]
    fn sweep_eta_constant_without_other_mechanisms() {
        // With T₂*{other} → ∞ and zero overhead, 𝒩·T₂* is constant and so
        // is the optimized sensitivity.
        let template = sweep_template();
        let protocol = ProtocolParams::ramsey(1e-6, 0.0, 0.0, 0.01, 0.01, 1.0);
        let grid: Vec<f64> = (0..20).map(|i| 0.5 * 1.3f64.powi(i)).collect();
        let sweep = nitrogen_sweep(&template, &grid, &protocol, false).unwrap();
        let eta0 = sweep.rows[0].eta_t_per_sqrt_hz;
        for row in &sweep.rows {
            assert_relative_eq!(row.eta_t_per_sqrt_hz, eta0, max_relative = 1e-9);
        }
        assert_eq!(sweep.knee_ppm, 0.0);
    }

    #[test]
    fn sweep_knee_location_pinned() {
        // E_conv = 0.3, E⁰ = E⁺ = 0, A_NV⁰ = 0, T₂*{other} = 10 µs:
        // κ = 101e3·0.7 + 165e3·0.3 = 120.2e3 s⁻¹/ppm and
        // [N*] = 1/(κ·1e-5) ≈ 0.832 ppm.
        let mut template = sweep_template();
        template.t2star_other_s = 10e-6;
        let protocol = ProtocolParams::ramsey(1e-6, 0.0, 0.0, 0.01, 0.01, 1.0);
        let sweep = nitrogen_sweep(&template, &[1.0], &protocol, false).unwrap();
        assert_relative_eq!(sweep.kappa_per_s_ppm, 120.2e3, max_relative = 1e-12);
        assert_relative_eq!(sweep.knee_ppm, 1.0 / (120.2e3 * 1e-5), max_relative = 1e-12);
        assert_relative_eq!(sweep.knee_ppm, 0.832, max_relative = 1e-3);
    }

    #[test]
    fn sweep_low_n_slope_is_minus_half() {
        // Below the knee η ∝ 1/√[N]: log-log slope −1/2 within 2%.
        let mut template = sweep_template();
        template.t2star_other_s = 10e-6;
        let protocol = ProtocolParams::ramsey(1e-6, 0.0, 0.0, 0.01, 0.01, 1.0);
        let knee = 1.0 / (120.2e3 * 1e-5);
        let grid = [knee * 1e-4, knee * 2e-4];
        let sweep = nitrogen_sweep(&template, &grid, &protocol, false).unwrap();
        let slope = (sweep.rows[1].eta_t_per_sqrt_hz.ln() - sweep.rows[0].eta_t_per_sqrt_hz.ln())
            / (grid[1].ln() - grid[0].ln());
        assert!((slope + 0.5).abs() < 0.01, "slope {slope}");
    }

    #[test]
    fn init_power_worked_example() {
        // 1.76e14 sensors, m = 3, λ = 532 nm, T₂* = 1 µs → ≈ 200 µJ, 200 W.
        let p = init_power(1.76e14, 3.0, 1e-6, 532e-9);
        assert!((p.energy_j - 200e-6).abs() / 200e-6 < 0.05, "E = {}", p.energy_j);
        assert!((p.power_w - 200.0).abs() / 200.0 < 0.05, "P = {}", p.power_w);
    }

    #[test]
    fn init_power_scalings() {
        let base = init_power(1e14, 3.0, 1e-6, 532e-9);
        let doubled = init_power(2e14, 3.0, 1e-6, 532e-9);
        assert_relative_eq!(doubled.power_w, 2.0 * base.power_w, max_relative = 1e-12);
        let slower = init_power(1e14, 3.0, 10e-6, 532e-9);
        assert_relative_eq!(slower.power_w, base.power_w / 10.0, max_relative = 1e-12);
        assert_relative_eq!(slower.energy_j, base.energy_j, max_relative = 1e-12);
    }
}
