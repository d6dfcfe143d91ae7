//! Diamond treatment calculators: LPHT annealing vacancy diffusion and
//! electron-irradiation dose.
//!
//! Vacancy diffusion follows the Arrhenius law D = D₀·e^{−E_a/(k_B T)}
//! with the literature defaults D₀ = 1.6e-7 m²/s and E_a = 2.3 eV; the
//! root-mean-square diffusion distance after a time t is √(6Dt). The
//! ±0.3 eV uncertainty in E_a swings D by roughly an order of magnitude at
//! 800 °C, so results carry a min/max band evaluated at E_a ± 0.3 eV.

use serde::Serialize;

use crate::constants::{constants, ELEMENTARY_CHARGE, PPM_TO_PER_CM3};

/// Default vacancy diffusion prefactor D₀ in m²/s (1.6e-3 cm²/s).
pub const DEFAULT_D0_M2S: f64 = 1.6e-7;
/// Default vacancy migration activation energy in eV.
pub const DEFAULT_EA_EV: f64 = 2.3;
/// Activation-energy uncertainty used for the diffusion band, in eV.
pub const EA_UNCERTAINTY_EV: f64 = 0.3;

/// Default vacancy creation yield for ~1 MeV electrons, per electron per
/// µm of path.
pub const DEFAULT_VACANCY_YIELD_PER_E_PER_UM: f64 = 2e-4;
/// Default fraction of created vacancies lost to immediate recombination.
pub const DEFAULT_RECOMBINATION_FRACTION: f64 = 0.4;
/// Default substitutional nitrogen atoms consumed per NV⁻ created (one
/// for the defect, one as the charge donor).
pub const DEFAULT_NITROGENS_PER_NV: f64 = 2.0;

/// Arrhenius diffusion result with the E_a ± 0.3 eV uncertainty band.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiffusionResult {
    pub d_m2s: f64,
    pub r_rms_m: f64,
    /// (min, max) diffusion coefficient over the activation-energy band.
    pub d_band_m2s: (f64, f64),
    /// (min, max) RMS distance over the activation-energy band.
    pub r_rms_band_m: (f64, f64),
}

/// Vacancy diffusion coefficient and RMS diffusion distance for an anneal
/// at `temp_k` lasting `duration_s`.
pub fn vacancy_diffusion(temp_k: f64, duration_s: f64, d0_m2s: f64, ea_ev: f64) -> DiffusionResult {
    assert!(temp_k > 0.0 && duration_s >= 0.0 && d0_m2s > 0.0 && ea_ev > 0.0);
    let k_b = constants().k_b;
    let d_at = |ea: f64| d0_m2s * (-ea * ELEMENTARY_CHARGE / (k_b * temp_k)).exp();
    let d = d_at(ea_ev);
    let d_lo = d_at(ea_ev + EA_UNCERTAINTY_EV);
    let d_hi = d_at(ea_ev - EA_UNCERTAINTY_EV);
    let r = |dv: f64| (6.0 * dv * duration_s).sqrt();
    DiffusionResult {
        d_m2s: d,
        r_rms_m: r(d),
        d_band_m2s: (d_lo, d_hi),
        r_rms_band_m: (r(d_lo), r(d_hi)),
    }
}

/// Electron dose (e⁻/cm²) required for surviving vacancies to match
/// [N^T]/`nitrogens_per_nv`: created vacancies per electron per cm of
/// path, reduced by the immediate-recombination fraction, must integrate
/// to the target volume density.
pub fn irradiation_dose(
    n_total_ppm: f64,
    vacancy_yield_per_e_per_um: f64,
    recombination_frac: f64,
    nitrogens_per_nv: f64,
) -> f64 {
    assert!(n_total_ppm > 0.0 && vacancy_yield_per_e_per_um > 0.0 && nitrogens_per_nv > 0.0);
    assert!((0.0..1.0).contains(&recombination_frac));
    let target_per_cm3 = n_total_ppm * PPM_TO_PER_CM3 / nitrogens_per_nv;
    let surviving_per_e_per_cm = vacancy_yield_per_e_per_um * 1e4 * (1.0 - recombination_frac);
    target_per_cm3 / surviving_per_e_per_cm
}
