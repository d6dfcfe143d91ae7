//! Magnetic-field sensitivity formulas for every supported protocol.
//!
//! Every pulsed-protocol sensitivity is assembled as the product of four
//! factors — the ensemble spin-projection limit, the dephasing penalty
//! e^{+(τ/T)^p}, the readout penalty, and the overhead penalty
//! √((t_I+τ+t_R)/τ) — and the report keeps the breakdown so the
//! multiplicative structure can be inspected. Units: T/√Hz.

use serde::Serialize;

use crate::constants::constants;
use crate::sample::{Protocol, ProtocolParams, SampleError};

/// Multiplicative factor breakdown of a sensitivity value.
///
/// `projection_limit` carries the dimensions (T/√Hz) and any protocol
/// prefactor (π/2 for echo-type sequences, √2 for unknown AC phase); the
/// other three factors are dimensionless and ≥ 1 in their exact forms.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SensitivityFactors {
    pub projection_limit: f64,
    pub dephasing_factor: f64,
    pub readout_factor: f64,
    pub overhead_factor: f64,
}

impl SensitivityFactors {
    pub fn product(&self) -> f64 {
        self.projection_limit * self.dephasing_factor * self.readout_factor * self.overhead_factor
    }
}

/// Sensitivity η with its factor breakdown and the inputs that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct SensitivityReport {
    pub protocol: Protocol,
    pub eta_t_per_sqrt_hz: f64,
    pub factors: SensitivityFactors,
    pub inputs: ProtocolParams,
    pub warnings: Vec<String>,
}

impl SensitivityReport {
    fn assemble(protocol: Protocol, factors: SensitivityFactors, inputs: ProtocolParams) -> Self {
        Self {
            protocol,
            eta_t_per_sqrt_hz: factors.product(),
            factors,
            inputs,
            warnings: Vec::new(),
        }
    }
}

/// Ensemble spin-projection-limited sensitivity
/// η = ħ/(Δm_s g_e μ_B) · 1/√(Nτ).
pub fn eta_spin_projection(n_sensors: f64, tau_s: f64, delta_ms: u8) -> f64 {
    assert!(n_sensors >= 1.0 && tau_s > 0.0 && delta_ms >= 1);
    constants().hbar_over_ge_mub() / (delta_ms as f64) / (n_sensors * tau_s).sqrt()
}

/// Overhead penalty √((t_I + τ + t_R)/τ) ≥ 1.
pub fn overhead_factor(t_i_s: f64, tau_s: f64, t_r_s: f64) -> f64 {
    assert!(tau_s > 0.0);
    ((t_i_s + tau_s + t_r_s) / tau_s).sqrt()
}

fn dephasing_factor(tau_s: f64, t_coh_s: f64, p: f64) -> f64 {
    ((tau_s / t_coh_s).powf(p)).exp()
}

/// Ramsey ensemble sensitivity with the exact readout factor
/// σ_R = √(1 + 1/(C²n_avg)).
pub fn eta_ramsey_exact(p: &ProtocolParams, t2star_s: f64) -> Result<SensitivityReport, SampleError> {
    p.validate()?;
    let factors = SensitivityFactors {
        projection_limit: eta_spin_projection(p.n_sensors, p.tau_s, p.delta_ms),
        dephasing_factor: dephasing_factor(p.tau_s, t2star_s, p.p_exponent),
        readout_factor: (1.0 + 1.0 / (p.contrast * p.contrast * p.n_avg)).sqrt(),
        overhead_factor: overhead_factor(p.t_i_s, p.tau_s, p.t_r_s),
    };
    Ok(SensitivityReport::assemble(Protocol::Ramsey, factors, p.clone()))
}

/// Shot-noise-limited Ramsey sensitivity,
/// η ≈ ħ/(Δm_s g_e μ_B) · 1/(C e^{−(τ/T₂*)^p} √𝒩) · √(t_I+τ+t_R)/τ with
/// 𝒩 = N·n_avg. A warning is attached when C²n_avg > 0.1 and the shot
/// approximation starts to deviate from the exact form.
pub fn eta_ramsey_shot(p: &ProtocolParams, t2star_s: f64) -> Result<SensitivityReport, SampleError> {
    p.validate()?;
    let factors = SensitivityFactors {
        projection_limit: eta_spin_projection(p.n_sensors, p.tau_s, p.delta_ms),
        dephasing_factor: dephasing_factor(p.tau_s, t2star_s, p.p_exponent),
        readout_factor: 1.0 / (p.contrast * p.n_avg.sqrt()),
        overhead_factor: overhead_factor(p.t_i_s, p.tau_s, p.t_r_s),
    };
    let mut report = SensitivityReport::assemble(Protocol::Ramsey, factors, p.clone());
    let c2n = p.contrast * p.contrast * p.n_avg;
    if c2n > 0.1 {
        report.warnings.push(format!(
            "C²n_avg = {c2n:.3} > 0.1: shot-noise approximation degraded, use the exact form"
        ));
    }
    Ok(report)
}

/// CW-ODMR sensitivity and the detuning that realizes it.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CwOdmrSensitivity {
    pub eta_t_per_sqrt_hz: f64,
    /// Steepest-slope detuning Δν/(2√3) from line center for a Lorentzian
    /// profile.
    pub optimal_detuning_hz: f64,
}

/// η_CW = 4/(3√3) · h/(g_e μ_B) · Δν/(C_CW √R).
pub fn eta_cw_odmr(linewidth_hz: f64, contrast: f64, rate_hz: f64) -> CwOdmrSensitivity {
    assert!(linewidth_hz > 0.0 && contrast > 0.0 && rate_hz > 0.0);
    let prefactor = 4.0 / (3.0 * 3.0f64.sqrt());
    CwOdmrSensitivity {
        eta_t_per_sqrt_hz: prefactor * constants().h_over_ge_mub() * linewidth_hz
            / (contrast * rate_hz.sqrt()),
        optimal_detuning_hz: linewidth_hz / (2.0 * 3.0f64.sqrt()),
    }
}

/// Pulsed-ODMR sensitivity with the π-pulse interrogation fixed at
/// τ_π = T₂* (Lorentzian linewidth assumption Δν ≈ 1/(πT₂*)):
/// η ≈ 8/(3√3) · ħ/(g_e μ_B) · 1/(C √𝒩) · √(t_I+T₂*+t_R)/T₂*.
pub fn eta_pulsed_odmr(
    t2star_s: f64,
    contrast: f64,
    n_photons: f64,
    t_i_s: f64,
    t_r_s: f64,
) -> f64 {
    assert!(t2star_s > 0.0 && contrast > 0.0 && n_photons > 0.0);
    let prefactor = 8.0 / (3.0 * 3.0f64.sqrt());
    prefactor * constants().hbar_over_ge_mub() / (contrast * n_photons.sqrt())
        * (t_i_s + t2star_s + t_r_s).sqrt()
        / t2star_s
}

/// Hahn-echo AC sensitivity: the Ramsey product with a π/2 prefactor and
/// T₂ in the decoherence factor; a further √2 penalty applies when the
/// pulse sequence cannot be phase-locked to the AC field.
pub fn eta_hahn_echo(
    p: &ProtocolParams,
    t2_s: f64,
    phase_locked: bool,
) -> Result<SensitivityReport, SampleError> {
    p.validate()?;
    let lock_penalty = if phase_locked { 1.0 } else { std::f64::consts::SQRT_2 };
    let factors = SensitivityFactors {
        projection_limit: std::f64::consts::FRAC_PI_2
            * lock_penalty
            * eta_spin_projection(p.n_sensors, p.tau_s, p.delta_ms),
        dephasing_factor: dephasing_factor(p.tau_s, t2_s, p.p_exponent),
        readout_factor: (1.0 + 1.0 / (p.contrast * p.contrast * p.n_avg)).sqrt(),
        overhead_factor: overhead_factor(p.t_i_s, p.tau_s, p.t_r_s),
    };
    Ok(SensitivityReport::assemble(Protocol::HahnEcho, factors, p.clone()))
}

/// Multipulse (CPMG-k) AC sensitivity at τ = (k/2)·T_B with the coherence
/// extension T₂ → k^s·T₂.
///
/// Measured order-of-magnitude gains over Hahn echo at fixed frequency
/// are sample-dependent; the attainable factor enters only through the
/// noise-spectrum exponent `s` and is not pinned here.
pub fn eta_multipulse(
    p: &ProtocolParams,
    t2_s: f64,
    k: u32,
    s: f64,
) -> Result<SensitivityReport, SampleError> {
    p.validate()?;
    assert!(k >= 1, "pulse count must be ≥ 1");
    assert!((0.0..1.0).contains(&s), "scaling exponent must be in [0, 1)");
    let t_b = p.t_b_s.ok_or(SampleError::Validation {
        field: "t_b_s",
        message: "multipulse sensitivity requires the AC field period".into(),
    })?;
    let tau = 0.5 * k as f64 * t_b;
    let mut inputs = p.clone();
    inputs.tau_s = tau;
    inputs.k_pulses = k;
    inputs.s_scaling = s;
    let factors = SensitivityFactors {
        projection_limit: std::f64::consts::FRAC_PI_2
            * eta_spin_projection(p.n_sensors, tau, p.delta_ms),
        dephasing_factor: dephasing_factor(tau, (k as f64).powf(s) * t2_s, p.p_exponent),
        readout_factor: (1.0 + 1.0 / (p.contrast * p.contrast * p.n_avg)).sqrt(),
        overhead_factor: overhead_factor(p.t_i_s, tau, p.t_r_s),
    };
    Ok(SensitivityReport::assemble(Protocol::Cpmg, factors, inputs))
}

/// Real-valued stationary point of the multipulse sensitivity,
/// k = [ (2T₂/T_B)^p / (2p(1−s)) ]^{1/(p(1−s))}, clamped to ≥ 1.
pub fn k_opt_real(t2_s: f64, t_b_s: f64, p: f64, s: f64) -> f64 {
    assert!(t2_s > 0.0 && t_b_s > 0.0 && p > 0.0 && (0.0..1.0).contains(&s));
    let expo = 1.0 / (p * (1.0 - s));
    let base = (2.0 * t2_s / t_b_s).powf(p) / (2.0 * p * (1.0 - s));
    base.powf(expo).max(1.0)
}

/// Optimal integer pulse count: the closed-form stationary point
/// integerized by comparing floor and ceil under the zero-overhead
/// multipulse objective e^{[τ_k/(k^s T₂)]^p}/√τ_k with τ_k = (k/2)T_B.
pub fn k_opt(t2_s: f64, t_b_s: f64, p: f64, s: f64) -> u32 {
    let k_real = k_opt_real(t2_s, t_b_s, p, s);
    let objective = |k: f64| {
        let tau = 0.5 * k * t_b_s;
        ((tau / (k.powf(s) * t2_s)).powf(p)).exp() / tau.sqrt()
    };
    let lo = k_real.floor().max(1.0);
    let hi = k_real.ceil().max(1.0);
    if objective(lo) <= objective(hi) {
        lo as u32
    } else {
        hi as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::Basis;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn base_ramsey() -> ProtocolParams {
        ProtocolParams::ramsey(1e-6, 0.0, 0.0, 0.01, 0.01, 1.76e14)
    }

    #[test]
    fn spin_projection_reference_value() {
        // N = 1, τ = 1 s, Δm_s = 1: ħ/(g_e μ_B) ≈ 5.68e-12 T/√Hz.
        let eta = eta_spin_projection(1.0, 1.0, 1);
        assert!((eta - 5.68e-12).abs() / 5.68e-12 < 1e-3, "η_sp = {eta}");
    }

    #[test]
    fn spin_projection_scalings() {
        let base = eta_spin_projection(1.0, 1.0, 1);
        assert_relative_eq!(eta_spin_projection(1.0, 1.0, 2), base / 2.0, max_relative = 1e-15);
        assert_relative_eq!(eta_spin_projection(100.0, 1.0, 1), base / 10.0, max_relative = 1e-14);
    }

    #[test]
    fn overhead_reference_points() {
        assert_eq!(overhead_factor(0.0, 1e-6, 0.0), 1.0);
        assert_relative_eq!(overhead_factor(1.5e-6, 1e-6, 1.5e-6), 2.0, max_relative = 1e-12);
        // t_I = 1 µs, t_R = 300 ns, τ = 500 ns: √3.6.
        assert_relative_eq!(
            overhead_factor(1e-6, 0.5e-6, 0.3e-6),
            3.6f64.sqrt(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn ramsey_exact_floor_case() {
        // t_I = t_R = 0, C²n_avg → ∞, τ = T₂*, p = 1: η = e·η_sp.
        let mut p = base_ramsey();
        p.contrast = 1.0;
        p.n_avg = 1e18;
        let r = eta_ramsey_exact(&p, 1e-6).unwrap();
        let sp = eta_spin_projection(p.n_sensors, p.tau_s, 1);
        assert_relative_eq!(
            r.eta_t_per_sqrt_hz,
            std::f64::consts::E * sp,
            max_relative = 1e-9
        );
    }

    #[test]
    fn ramsey_eta_diverges_at_small_tau() {
        let mut p = base_ramsey();
        p.t_i_s = 1e-6;
        let eta_at = |tau: f64| {
            let mut q = p.clone();
            q.tau_s = tau;
            eta_ramsey_exact(&q, 1e-6).unwrap().eta_t_per_sqrt_hz
        };
        assert!(eta_at(1e-9) > eta_at(1e-8));
        assert!(eta_at(1e-10) > eta_at(1e-9));
    }

    #[test]
    fn ramsey_exact_vs_shot_within_bound() {
        // Relative gap between the forms is √(1 + C²n_avg) − 1.
        let p = base_ramsey();
        let exact = eta_ramsey_exact(&p, 1e-6).unwrap().eta_t_per_sqrt_hz;
        let shot = eta_ramsey_shot(&p, 1e-6).unwrap().eta_t_per_sqrt_hz;
        let c2n = p.contrast * p.contrast * p.n_avg;
        let bound = (1.0 + c2n).sqrt() - 1.0;
        assert!(bound < 1e-6);
        assert!(((exact - shot) / exact).abs() <= bound * (1.0 + 1e-9));
    }

    #[test]
    fn shot_warning_outside_regime() {
        let mut p = base_ramsey();
        p.contrast = 0.8;
        p.n_avg = 10.0;
        let r = eta_ramsey_shot(&p, 1e-6).unwrap();
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn shot_scales_inverse_sqrt_photons() {
        let mut p = base_ramsey();
        let e1 = eta_ramsey_shot(&p, 1e-6).unwrap().eta_t_per_sqrt_hz;
        p.n_avg *= 2.0;
        let e2 = eta_ramsey_shot(&p, 1e-6).unwrap().eta_t_per_sqrt_hz;
        assert_relative_eq!(e2, e1 / 2.0f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn dq_basis_sqrt2_gain_at_optimum() {
        // Δm_s = 2 with T₂*_DQ = T₂*_SQ/2, both at their optimal τ = T/2
        // and zero overhead: net gain √2.
        let t2_sq = 2e-6;
        let mut sq = base_ramsey();
        sq.tau_s = t2_sq / 2.0;
        let eta_sq = eta_ramsey_shot(&sq, t2_sq).unwrap().eta_t_per_sqrt_hz;

        let mut dq = base_ramsey();
        dq.basis = Basis::Dq;
        dq.delta_ms = 2;
        dq.tau_s = t2_sq / 4.0;
        let eta_dq = eta_ramsey_shot(&dq, t2_sq / 2.0).unwrap().eta_t_per_sqrt_hz;
        assert_relative_eq!(eta_sq / eta_dq, 2.0f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn cw_odmr_reference_value() {
        // Δν = 1 MHz, C = 0.01, R = 1e12/s → ≈ 2.75e-9 T/√Hz.
        let r = eta_cw_odmr(1e6, 0.01, 1e12);
        assert!((r.eta_t_per_sqrt_hz - 2.75e-9).abs() / 2.75e-9 < 2e-3, "{}", r.eta_t_per_sqrt_hz);
        assert_relative_eq!(r.optimal_detuning_hz, 1e6 / (2.0 * 3.0f64.sqrt()), max_relative = 1e-12);
    }

    #[test]
    fn cw_odmr_rate_scaling() {
        let base = eta_cw_odmr(1e6, 0.01, 1e12).eta_t_per_sqrt_hz;
        let double = eta_cw_odmr(1e6, 0.01, 2e12).eta_t_per_sqrt_hz;
        assert_relative_eq!(double, base / 2.0f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn pulsed_odmr_golden_value_and_scaling() {
        // T₂* = 3 µs, C = 0.01, 𝒩 = 1e6, zero overhead — frozen reference
        // computed from 8/(3√3)·ħ/(g_eμ_B)·0.1/√(3e-6).
        let eta = eta_pulsed_odmr(3e-6, 0.01, 1e6, 0.0, 0.0);
        assert_relative_eq!(eta, 5.046e-10, max_relative = 2e-3);
        let eta2 = eta_pulsed_odmr(3e-6, 0.01, 2e6, 0.0, 0.0);
        assert_relative_eq!(eta2, eta / 2.0f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn pulsed_odmr_to_ramsey_formula_ratio() {
        // With equal C and 𝒩 and zero overhead the two formulas sit at the
        // fixed ratio η_pulsed/η_ramsey(τ=T₂*) = 8/(3√3)·e⁻¹. The practical
        // pulsed-ODMR penalties enter through degraded contrast and
        // linewidth, not through this idealized ratio.
        let t2 = 3e-6;
        let c = 0.01;
        let n_photons = 1e6;
        let pulsed = eta_pulsed_odmr(t2, c, n_photons, 0.0, 0.0);
        let mut p = base_ramsey();
        p.tau_s = t2;
        p.n_sensors = 1e8;
        p.n_avg = n_photons / p.n_sensors;
        p.contrast = c;
        let ramsey = eta_ramsey_shot(&p, t2).unwrap().eta_t_per_sqrt_hz;
        let expected = 8.0 / (3.0 * 3.0f64.sqrt()) / std::f64::consts::E;
        assert_relative_eq!(pulsed / ramsey, expected, max_relative = 1e-9);
    }

    #[test]
    fn hahn_echo_is_half_pi_times_ramsey() {
        let p = base_ramsey();
        let t = 1e-6;
        let ramsey = eta_ramsey_exact(&p, t).unwrap().eta_t_per_sqrt_hz;
        let echo = eta_hahn_echo(&p, t, true).unwrap().eta_t_per_sqrt_hz;
        assert_relative_eq!(echo, std::f64::consts::FRAC_PI_2 * ramsey, max_relative = 1e-12);
        let unlocked = eta_hahn_echo(&p, t, false).unwrap().eta_t_per_sqrt_hz;
        assert_relative_eq!(unlocked, echo * 2.0f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn echo_gain_from_extended_coherence() {
        // T₂ = 100·T₂*, τ re-optimized for each: the echo's optimal η is
        // √100/(π/2) times better than Ramsey's.
        let t2star = 1e-6;
        let t2 = 100.0 * t2star;
        let tau_r = crate::optimizer::optimal_tau(t2star, 1.0, 0.0);
        let tau_e = crate::optimizer::optimal_tau(t2, 1.0, 0.0);
        let mut pr = base_ramsey();
        pr.tau_s = tau_r;
        let mut pe = base_ramsey();
        pe.tau_s = tau_e;
        let ramsey = eta_ramsey_exact(&pr, t2star).unwrap().eta_t_per_sqrt_hz;
        let echo = eta_hahn_echo(&pe, t2, true).unwrap().eta_t_per_sqrt_hz;
        assert_relative_eq!(
            ramsey / echo,
            10.0 / std::f64::consts::FRAC_PI_2,
            max_relative = 1e-9
        );
    }

    #[test]
    fn multipulse_k1_equals_echo_at_half_period() {
        let mut p = base_ramsey();
        p.protocol = Protocol::Cpmg;
        p.t_b_s = Some(20e-6);
        let t2 = 100e-6;
        let multi = eta_multipulse(&p, t2, 1, 0.5).unwrap();
        let mut echo_params = p.clone();
        echo_params.tau_s = 10e-6;
        let echo = eta_hahn_echo(&echo_params, t2, true).unwrap();
        assert_relative_eq!(
            multi.eta_t_per_sqrt_hz,
            echo.eta_t_per_sqrt_hz,
            max_relative = 1e-12
        );
    }

    #[test]
    fn k_opt_closed_form_case() {
        // T_B = 2T₂, p = 1, s = 2/3: k_real = 1.5³ = 3.375.
        let t2 = 50e-6;
        let k_real = k_opt_real(t2, 2.0 * t2, 1.0, 2.0 / 3.0);
        assert_relative_eq!(k_real, 3.375, max_relative = 1e-12);
        let k = k_opt(t2, 2.0 * t2, 1.0, 2.0 / 3.0);
        assert!(k == 3 || k == 4);
    }

    #[test]
    fn k_opt_clamps_to_one_for_slow_fields() {
        assert_eq!(k_opt(10e-6, 10e-3, 1.0, 2.0 / 3.0), 1);
    }

    #[test]
    fn k_opt_matches_brute_force_scan() {
        for &(t2, tb) in &[(100e-6, 30e-6), (50e-6, 10e-6), (200e-6, 100e-6)] {
            for &s in &[0.5, 2.0 / 3.0] {
                for &p in &[1.0, 2.0] {
                    let k = k_opt(t2, tb, p, s);
                    let objective = |kk: f64| {
                        let tau = 0.5 * kk * tb;
                        ((tau / (kk.powf(s) * t2)).powf(p)).exp() / tau.sqrt()
                    };
                    let k_max = (10.0 * k_opt_real(t2, tb, p, s)).ceil() as u32 + 2;
                    let best = (1..=k_max.max(50))
                        .min_by(|&a, &b| {
                            objective(a as f64).partial_cmp(&objective(b as f64)).unwrap()
                        })
                        .unwrap();
                    assert!(
                        (k as i64 - best as i64).abs() <= 1,
                        "k_opt {k} vs scan {best} for T₂={t2}, T_B={tb}, p={p}, s={s}"
                    );
                }
            }
        }
    }

    #[test]
    fn factorization_invariant() {
        let p = base_ramsey();
        for r in [
            eta_ramsey_exact(&p, 1e-6).unwrap(),
            eta_ramsey_shot(&p, 1e-6).unwrap(),
            eta_hahn_echo(&p, 1e-4, false).unwrap(),
        ] {
            let prod = r.factors.product();
            assert!(
                ((r.eta_t_per_sqrt_hz - prod) / prod).abs() < 1e-12,
                "factorization broken for {:?}",
                r.protocol
            );
            assert!(r.factors.dephasing_factor >= 1.0);
            assert!(r.factors.overhead_factor >= 1.0);
        }
    }

    proptest! {
        #[test]
        fn eta_monotone_in_resources(
            n in 1.0f64..1e12,
            n_avg in 1e-4f64..1.0,
            c in 1e-3f64..0.3,
            t2 in 1e-7f64..1e-4,
            t_o in 0.0f64..1e-4,
        ) {
            let mk = |n: f64, n_avg: f64, c: f64, t2: f64, t_o: f64| {
                let tau = crate::optimizer::optimal_tau(t2, 1.0, t_o);
                let mut p = ProtocolParams::ramsey(tau, t_o, 0.0, c, n_avg, n);
                p.p_exponent = 1.0;
                eta_ramsey_exact(&p, t2).unwrap().eta_t_per_sqrt_hz
            };
            let base = mk(n, n_avg, c, t2, t_o);
            prop_assert!(mk(n * 2.0, n_avg, c, t2, t_o) < base);
            prop_assert!(mk(n, n_avg * 2.0, c, t2, t_o) < base);
            prop_assert!(mk(n, n_avg, (c * 1.5).min(1.0), t2, t_o) < base);
            prop_assert!(mk(n, n_avg, c, t2 * 2.0, t_o) < base);
            prop_assert!(mk(n, n_avg, c, t2, t_o + 1e-6) > base);
        }

        #[test]
        fn shot_eta_bounded_below_by_projection_times_overhead(
            n in 1.0f64..1e10,
            n_avg in 1e-4f64..0.5,
            c in 1e-3f64..0.2,
            tau in 1e-7f64..1e-5,
        ) {
            let p = ProtocolParams::ramsey(tau, 1e-6, 3e-7, c, n_avg, n);
            let eta = eta_ramsey_shot(&p, 1e-5).unwrap().eta_t_per_sqrt_hz;
            let floor = eta_spin_projection(n, tau, 1) * overhead_factor(1e-6, tau, 3e-7);
            prop_assert!(eta >= floor);
        }
    }
}
