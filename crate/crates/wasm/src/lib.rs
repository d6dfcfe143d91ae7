//! Browser bindings for the interactive demo page.
//!
//! Three operations back the static page in `www/`: an itemized dephasing
//! budget, a sensitivity-versus-precession-time curve with its optimum,
//! and a free-induction-decay trace. Curves are returned as flat
//! `Float64Array`s (x values followed by y values); the budget is a JSON
//! string.

use wasm_bindgen::prelude::wasm_bindgen;

use nvsk_core::budget::{total_budget, BudgetEnvironment, BudgetToggles};
use nvsk_core::constants::constants;
use nvsk_core::dynamics::{fid_signal, HyperfineLines};
use nvsk_core::optimizer::{optimal_tau, relative_eta};
use nvsk_core::sample::{Basis, DiamondSample};

/// Itemized dephasing budget as JSON:
/// `{"entries": [{"mechanism": .., "rate_per_s": ..}, ..],
///   "total_t2star_us": .., "dominant": ..}`.
///
/// Concentrations in ppm, couplings in Hz, rates in 1/s, bias field in mT.
/// The flat scalar signature keeps the JS call site framework-free.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn budget_json(
    n_s0_ppm: f64,
    c13_ppm: f64,
    nv_minus_ppm: f64,
    xi_perp_hz: f64,
    xi_spread_hz: f64,
    b_z_mt: f64,
    strain_axial_rate: f64,
    temp_rate: f64,
    gradients_rate: f64,
    dq_basis: bool,
    bath_drive: bool,
) -> String {
    let sample = DiamondSample {
        n_total_ppm: n_s0_ppm + nv_minus_ppm,
        n_s0_ppm: n_s0_ppm.max(0.0),
        nv_minus_ppm: nv_minus_ppm.max(0.0),
        nv0_ppm: 0.0,
        c13_ppm: c13_ppm.max(0.0),
        e_conv: 0.0,
        chi: 0.0,
        zeta: 0.7,
        xi_perp_hz: xi_perp_hz.max(0.0),
        xi_perp_spread_hz: xi_spread_hz.max(0.0),
        t2star_other_s: f64::INFINITY,
        t1_s: 6e-3,
    };
    let env = BudgetEnvironment {
        beta_z_hz: constants().gamma_e_over_2pi() * b_z_mt.max(0.0) * 1e-3,
        gradients_rate_per_s: gradients_rate.max(0.0),
        temperature_rate_per_s: temp_rate.max(0.0),
        strain_axial_rate_per_s: strain_axial_rate.max(0.0),
    };
    let basis = if dq_basis { Basis::Dq } else { Basis::Sq };
    let toggles = BudgetToggles {
        bath_drive,
        ..BudgetToggles::default()
    };
    let budget = total_budget(&sample, &env, basis, &toggles);
    let entries: Vec<serde_json::Value> = budget
        .entries
        .iter()
        .map(|(m, r)| {
            serde_json::json!({
                "mechanism": m.as_str(),
                "rate_per_s": r,
            })
        })
        .collect();
    serde_json::json!({
        "entries": entries,
        "total_rate_per_s": budget.total_rate_per_s,
        "total_t2star_us": budget.total_t2star_s * 1e6,
        "dominant": budget.dominant.as_str(),
        "basis": budget.basis.as_str(),
    })
    .to_string()
}

/// Ramsey sensitivity versus precession time on a grid of `points`
/// values of τ spanning [0.02, 3]·T₂*. Returns τ in µs followed by η in
/// pT/√Hz (flat array of length 2·points).
#[wasm_bindgen]
pub fn sensitivity_curve(
    t2star_us: f64,
    p: f64,
    overhead_us: f64,
    contrast: f64,
    n_avg: f64,
    log10_sensors: f64,
    points: usize,
) -> Vec<f64> {
    let t2 = (t2star_us * 1e-6).max(1e-12);
    let t_o = (overhead_us * 1e-6).max(0.0);
    let p = p.clamp(0.5, 3.0);
    let n = 10f64.powf(log10_sensors.clamp(0.0, 20.0));
    let k = constants();
    let prefactor = k.hbar_over_ge_mub() / n.sqrt();
    let sigma_r = (1.0 + 1.0 / (contrast * contrast * n_avg)).sqrt();
    let points = points.clamp(2, 4096);
    let mut out = Vec::with_capacity(2 * points);
    for i in 0..points {
        let tau = t2 * (0.02 + (3.0 - 0.02) * i as f64 / (points - 1) as f64);
        out.push(tau * 1e6);
    }
    for i in 0..points {
        let tau = out[i] * 1e-6;
        // η = ħ/(g_eμ_B√N) · σ_R · e^{(τ/T)^p}·√(τ+t_O)/τ
        let eta = prefactor * sigma_r * relative_eta(tau, t2, p, t_o);
        out.push(eta * 1e12); // pT/√Hz
    }
    out
}

/// Optimal precession time in µs for the sensitivity-curve panel marker.
#[wasm_bindgen]
pub fn optimal_tau_us(t2star_us: f64, p: f64, overhead_us: f64) -> f64 {
    optimal_tau(
        (t2star_us * 1e-6).max(1e-12),
        p.clamp(0.5, 3.0),
        (overhead_us * 1e-6).max(0.0),
    ) * 1e6
}

/// Free-induction-decay trace over [0, tau_max_us]. A non-zero hyperfine
/// splitting (MHz) synthesizes the ¹⁴N triplet with equal weights.
/// Returns τ in µs followed by the signal (flat array of length
/// 2·points).
#[wasm_bindgen]
pub fn fid_curve(
    t2star_us: f64,
    p: f64,
    fringe_freq_mhz: f64,
    hyperfine_splitting_mhz: f64,
    tau_max_us: f64,
    points: usize,
) -> Vec<f64> {
    let t2 = (t2star_us * 1e-6).max(1e-12);
    let p = p.clamp(0.5, 3.0);
    let points = points.clamp(2, 16384);
    let tau_max = (tau_max_us * 1e-6).max(1e-9);
    let tau_grid: Vec<f64> = (0..points)
        .map(|i| tau_max * i as f64 / (points - 1) as f64)
        .collect();
    let hyperfine = (hyperfine_splitting_mhz > 0.0).then(|| HyperfineLines {
        splitting_hz: hyperfine_splitting_mhz * 1e6,
        weights: vec![1.0, 1.0, 1.0],
    });
    let signal = fid_signal(
        &tau_grid,
        t2,
        p,
        fringe_freq_mhz * 1e6,
        hyperfine.as_ref(),
    );
    let mut out: Vec<f64> = tau_grid.iter().map(|t| t * 1e6).collect();
    out.extend(signal);
    out
}
