//! Physical constants for the NV⁻ ground state and shared unit conversions.
//!
//! Fundamental constants are CODATA 2018 exact/recommended values. The
//! NV-specific couplings (zero-field splitting, hyperfine constants,
//! electric dipole couplings) are the compiled ground-state values for the
//! negatively charged nitrogen-vacancy center in diamond. Hyperfine
//! constants are signed; everything else is positive.
//!
//! All frequencies are in Hz (H/h convention), fields in tesla, energies in
//! joules.

use serde::Serialize;

/// Defect concentration conversion: 1 ppm of carbon lattice sites
/// corresponds to 1.76e17 defects per cm³ (diamond has 1.76e23 carbon
/// atoms per cm³).
pub const PPM_TO_PER_CM3: f64 = 1.76e17;

/// Same conversion per mm³: 1 ppm = 1.76e14 defects per mm³.
pub const PPM_TO_PER_MM3: f64 = 1.76e14;

/// Temperature coefficient of the zero-field splitting, dD/dT in Hz/K.
pub const DD_DT: f64 = -74e3;

/// Elementary charge in coulombs (CODATA 2018, exact).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Fixed constants of the NV⁻ electronic ground state.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhysicalConstants {
    /// Electronic g-factor of the NV⁻ center (dimensionless).
    pub g_e: f64,
    /// Bohr magneton (J/T).
    pub mu_b: f64,
    /// Planck constant (J·s).
    pub h: f64,
    /// Reduced Planck constant (J·s).
    pub hbar: f64,
    /// Boltzmann constant (J/K).
    pub k_b: f64,
    /// Speed of light (m/s).
    pub c: f64,
    /// Zero-field splitting D (Hz) at room temperature.
    pub d_zfs: f64,
    /// ¹⁴N axial magnetic hyperfine constant A∥ (Hz), signed.
    pub a_par_14n: f64,
    /// ¹⁴N transverse magnetic hyperfine constant A⊥ (Hz), signed.
    pub a_perp_14n: f64,
    /// ¹⁴N nuclear electric quadrupole parameter P (Hz), signed.
    pub p_14n: f64,
    /// ¹⁵N axial magnetic hyperfine constant A∥ (Hz).
    pub a_par_15n: f64,
    /// ¹⁵N transverse magnetic hyperfine constant A⊥ (Hz).
    pub a_perp_15n: f64,
    /// Axial electric dipole coupling d∥ (Hz per V/m).
    pub d_par: f64,
    /// Transverse electric dipole coupling d⊥ (Hz per V/m).
    pub d_perp: f64,
}

impl PhysicalConstants {
    /// Gyromagnetic ratio γ_e = g_e μ_B / ħ in rad/(s·T).
    pub fn gamma_e(&self) -> f64 {
        self.g_e * self.mu_b / self.hbar
    }

    /// γ_e / 2π = g_e μ_B / h in Hz/T (≈ 28.03 GHz/T).
    pub fn gamma_e_over_2pi(&self) -> f64 {
        self.g_e * self.mu_b / self.h
    }

    /// ħ / (g_e μ_B) in T·s — the spin-projection sensitivity prefactor.
    pub fn hbar_over_ge_mub(&self) -> f64 {
        self.hbar / (self.g_e * self.mu_b)
    }

    /// h / (g_e μ_B) in T/Hz (≈ 3.57e-11), used by the ODMR formulas.
    pub fn h_over_ge_mub(&self) -> f64 {
        self.h / (self.g_e * self.mu_b)
    }
}

/// The fixed constant set. Repeated calls return identical values.
pub fn constants() -> PhysicalConstants {
    PhysicalConstants {
        g_e: 2.003,
        mu_b: 9.274_010_078_3e-24,
        h: 6.626_070_15e-34,
        hbar: 1.054_571_817e-34,
        k_b: 1.380_649e-23,
        c: 2.997_924_58e8,
        d_zfs: 2.87e9,
        a_par_14n: -2.14e6,
        a_perp_14n: -2.70e6,
        p_14n: -4.945e6,
        a_par_15n: 3.03e6,
        a_perp_15n: 3.65e6,
        d_par: 3.5e-3,
        d_perp: 0.17,
    }
}
