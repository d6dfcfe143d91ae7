//! Itemized dephasing and decoherence budgets.
//!
//! Rates from independent mechanisms add linearly (valid in the Lorentzian
//! regime), so a budget is an ordered mechanism → rate map whose sum fixes
//! the total T₂* (or T₂). Concentration scalings:
//!
//! * substitutional nitrogen: 1/T₂* = A_N·[N_S⁰], A_N = 101 ms⁻¹ppm⁻¹
//! * nitrogen limit to T₂:    1/T₂  = B_N·[N_S⁰], B_N = 6.25 ms⁻¹ppm⁻¹
//! * ¹³C nuclear bath:        1/T₂* = A_C·[¹³C],  A_C = 0.100 ms⁻¹ppm⁻¹
//! * NV⁻–NV⁻ dipolar:         ς∥·A∥·[NV∥] + ς∦·A∦·[NV∦] with
//!   A∦ = √(8/3)·A_N ≈ 165 ms⁻¹ppm⁻¹ and A∥ = (3/2)·A∦.
//!
//! The double-quantum basis doubles every magnetic-dipolar rate and
//! rejects common-mode entries (temperature, axial strain); spin-bath
//! driving suppresses the N_S⁰ and off-axis NV⁻ entries. Transverse
//! strain/electric dephasing is suppressed by the axial bias field through
//! the |∂ν/∂ξ⊥| factor of the Stark/Zeeman analysis.

use serde::Serialize;

use crate::hamiltonian::stark_zeeman_analysis;
use crate::sample::{Basis, DiamondSample};

/// Dephasing-rate scaling constants, all in s⁻¹ per ppm.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScalingConstants {
    /// A_{N_S⁰}: NV⁻ ensemble dephasing per ppm of neutral substitutional
    /// nitrogen.
    pub a_n: f64,
    /// B_{N_S⁰}: Hahn-echo decoherence per ppm of N_S⁰.
    pub b_n: f64,
    /// A_{¹³C}: dephasing per ppm of ¹³C (dilute limit).
    pub a_c13: f64,
    /// A_{NV⁻∦}: dephasing from NV⁻ spins in other orientation groups,
    /// √(8/3)·A_N from the spin-1 multiplicity scaling.
    pub a_nv_perp_group: f64,
    /// A_{NV⁻∥} = (3/2)·A_{NV⁻∦}: same-group NV⁻ spins, including the
    /// resonant flip-flop terms.
    pub a_nv_same_group: f64,
    /// EPR cross-check value of A_{N_S⁰} from nitrogen-bath linewidths.
    pub a_n_epr: f64,
}

impl Default for ScalingConstants {
    fn default() -> Self {
        let a_nv_perp_group = 165e3;
        Self {
            a_n: 101e3,
            b_n: 6.25e3,
            a_c13: 0.100e3,
            a_nv_perp_group,
            a_nv_same_group: 1.5 * a_nv_perp_group,
            a_n_epr: 130e3,
        }
    }
}

/// T₂* limit from neutral substitutional nitrogen; infinite at zero
/// concentration.
pub fn t2star_nitrogen(n_s0_ppm: f64) -> f64 {
    assert!(n_s0_ppm >= 0.0);
    if n_s0_ppm == 0.0 {
        return f64::INFINITY;
    }
    1.0 / (ScalingConstants::default().a_n * n_s0_ppm)
}

/// Hahn-echo T₂ limit from substitutional nitrogen, optionally combined
/// with a nitrogen-independent T₂{other}.
pub fn t2_nitrogen(n_s0_ppm: f64, t2_other_s: Option<f64>) -> f64 {
    assert!(n_s0_ppm >= 0.0);
    let mut rate = ScalingConstants::default().b_n * n_s0_ppm;
    if let Some(other) = t2_other_s {
        assert!(other > 0.0);
        rate += 1.0 / other;
    }
    if rate == 0.0 {
        f64::INFINITY
    } else {
        1.0 / rate
    }
}

/// ¹³C limit to T₂* with the dilute-limit validity flag.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct C13Limit {
    pub t2star_s: f64,
    /// Set when [¹³C] exceeds 5% of lattice sites, outside the dilute
    /// regime where the linear scaling was established.
    pub beyond_dilute_limit: bool,
}

pub fn t2star_c13(c13_ppm: f64) -> C13Limit {
    assert!(c13_ppm >= 0.0);
    let rate = ScalingConstants::default().a_c13 * c13_ppm;
    C13Limit {
        t2star_s: if rate == 0.0 { f64::INFINITY } else { 1.0 / rate },
        beyond_dilute_limit: c13_ppm / 1e6 > 0.05,
    }
}

/// NV⁻–NV⁻ dipolar limit to T₂* from the same-group and other-group
/// concentrations with initialization factors ς ∈ [0, 1].
pub fn t2star_nvnv(
    nv_parallel_ppm: f64,
    nv_nonparallel_ppm: f64,
    varsigma_par: f64,
    varsigma_nonpar: f64,
) -> f64 {
    assert!(nv_parallel_ppm >= 0.0 && nv_nonparallel_ppm >= 0.0);
    assert!((0.0..=1.0).contains(&varsigma_par) && (0.0..=1.0).contains(&varsigma_nonpar));
    let k = ScalingConstants::default();
    let rate = varsigma_par * k.a_nv_same_group * nv_parallel_ppm
        + varsigma_nonpar * k.a_nv_perp_group * nv_nonparallel_ppm;
    if rate == 0.0 {
        f64::INFINITY
    } else {
        1.0 / rate
    }
}

/// Dephasing rate from an inhomogeneous transverse strain/electric
/// coupling of spread `xi_spread_hz`, suppressed by the axial bias through
/// |∂ν/∂ξ⊥| at operating point (ξ⊥, β_z). Lorentzian convention:
/// a frequency spread Δν maps to rate π·Δν.
pub fn strain_electric_rate(xi_spread_hz: f64, xi_perp_hz: f64, beta_z_hz: f64) -> f64 {
    assert!(xi_spread_hz >= 0.0 && xi_perp_hz >= 0.0 && beta_z_hz >= 0.0);
    if xi_spread_hz == 0.0 {
        return 0.0;
    }
    let suppression = stark_zeeman_analysis(xi_perp_hz, 0.0, beta_z_hz).dnu_dxi.abs();
    std::f64::consts::PI * xi_spread_hz * suppression
}

/// Budget mechanism identifiers, in fixed output order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mechanism {
    NitrogenS0,
    Carbon13,
    NvMinus,
    Nv0,
    StrainTransverse,
    StrainAxial,
    Gradients,
    Temperature,
    Other,
    T1Floor,
}

impl Mechanism {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mechanism::NitrogenS0 => "N_S0",
            Mechanism::Carbon13 => "13C",
            Mechanism::NvMinus => "NV-",
            Mechanism::Nv0 => "NV0",
            Mechanism::StrainTransverse => "strain_electric_perp",
            Mechanism::StrainAxial => "strain_axial",
            Mechanism::Gradients => "gradients",
            Mechanism::Temperature => "temperature",
            Mechanism::Other => "other",
            Mechanism::T1Floor => "2T1",
        }
    }
}

/// Non-material environment inputs to a budget. The gradient, temperature,
/// and axial-strain entries are direct user-supplied rates; no predictive
/// formula exists for them, they depend on apparatus engineering.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct BudgetEnvironment {
    /// Axial Zeeman coupling β_z = (g_e μ_B/h)·B_z in Hz; suppresses the
    /// transverse strain entry.
    pub beta_z_hz: f64,
    /// Magnetic-field-gradient dephasing rate (s⁻¹).
    pub gradients_rate_per_s: f64,
    /// Temperature-variation dephasing rate (s⁻¹); common-mode, removed in
    /// the DQ basis.
    pub temperature_rate_per_s: f64,
    /// Axial (M_z) strain-inhomogeneity rate (s⁻¹); common-mode.
    pub strain_axial_rate_per_s: f64,
}

/// Budget assembly options.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BudgetToggles {
    /// Resonantly drive the electronic spin bath.
    pub bath_drive: bool,
    /// Fraction of the driven entries removed by the drive; 1.0 is an
    /// ideal drive.
    pub drive_suppression: f64,
    /// Count NV⁰ as an A_N-strength spin-½ bath instead of the default
    /// zero contribution.
    pub nv0_as_nitrogen: bool,
    /// Initialization factor ς∥ for same-group NV⁻ spins.
    pub varsigma_par: f64,
    /// Initialization factor ς∦ for other-group NV⁻ spins.
    pub varsigma_nonpar: f64,
}

impl Default for BudgetToggles {
    fn default() -> Self {
        Self {
            bath_drive: false,
            drive_suppression: 1.0,
            nv0_as_nitrogen: false,
            varsigma_par: 1.0,
            varsigma_nonpar: 1.0,
        }
    }
}

/// Itemized dephasing budget: mechanism rates, their total, and the
/// dominant entry.
#[derive(Debug, Clone, Serialize)]
pub struct DephasingBudget {
    pub entries: Vec<(Mechanism, f64)>,
    pub total_rate_per_s: f64,
    pub total_t2star_s: f64,
    pub dominant: Mechanism,
    pub basis: Basis,
    pub toggles: BudgetToggles,
}

impl DephasingBudget {
    pub fn rate(&self, mechanism: Mechanism) -> f64 {
        self.entries
            .iter()
            .find(|(m, _)| *m == mechanism)
            .map(|(_, r)| *r)
            .unwrap_or(0.0)
    }
}

/// Assemble the full T₂* budget for a sample in a given environment,
/// measurement basis, and drive configuration.
///
/// DQ rules: magnetic-dipolar entries (N_S⁰, ¹³C, NV⁻, NV⁰, gradients)
/// double with the twice-faster precession; common-mode entries
/// (temperature, axial strain) drop out; the transverse strain share is
/// retained. Spin-bath driving scales the N_S⁰ and other-group NV⁻ rates
/// by (1 − drive_suppression). The 1/(2T₁) floor is always present.
pub fn total_budget(
    sample: &DiamondSample,
    env: &BudgetEnvironment,
    basis: Basis,
    toggles: &BudgetToggles,
) -> DephasingBudget {
    let k = ScalingConstants::default();
    let dq = basis == Basis::Dq;
    let dq_gain = if dq { 2.0 } else { 1.0 };
    let drive_keep = if toggles.bath_drive {
        1.0 - toggles.drive_suppression
    } else {
        1.0
    };

    // Bias along one [111] axis: a quarter of the NV⁻ population shares
    // the sensing group's resonance frequency.
    let nv_par_ppm = 0.25 * sample.nv_minus_ppm;
    let nv_nonpar_ppm = 0.75 * sample.nv_minus_ppm;
    let nv_rate = toggles.varsigma_par * k.a_nv_same_group * nv_par_ppm
        + toggles.varsigma_nonpar * k.a_nv_perp_group * nv_nonpar_ppm * drive_keep;

    let nv0_rate = if toggles.nv0_as_nitrogen {
        k.a_n * sample.nv0_ppm
    } else {
        0.0
    };

    let other_rate = if sample.t2star_other_s.is_finite() {
        1.0 / sample.t2star_other_s
    } else {
        0.0
    };
    let floor_rate = if sample.t1_s.is_finite() {
        1.0 / (2.0 * sample.t1_s)
    } else {
        0.0
    };

    let entries = vec![
        (
            Mechanism::NitrogenS0,
            k.a_n * sample.n_s0_ppm * drive_keep * dq_gain,
        ),
        (Mechanism::Carbon13, k.a_c13 * sample.c13_ppm * dq_gain),
        (Mechanism::NvMinus, nv_rate * dq_gain),
        (Mechanism::Nv0, nv0_rate * dq_gain),
        (
            Mechanism::StrainTransverse,
            strain_electric_rate(sample.xi_perp_spread_hz, sample.xi_perp_hz, env.beta_z_hz),
        ),
        (
            Mechanism::StrainAxial,
            if dq { 0.0 } else { env.strain_axial_rate_per_s },
        ),
        (Mechanism::Gradients, env.gradients_rate_per_s * dq_gain),
        (
            Mechanism::Temperature,
            if dq { 0.0 } else { env.temperature_rate_per_s },
        ),
        (Mechanism::Other, other_rate),
        (Mechanism::T1Floor, floor_rate),
    ];

    let total_rate: f64 = entries.iter().map(|(_, r)| r).sum();
    let dominant = entries
        .iter()
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .map(|(m, _)| *m)
        .unwrap();
    DephasingBudget {
        entries,
        total_rate_per_s: total_rate,
        total_t2star_s: if total_rate > 0.0 {
            1.0 / total_rate
        } else {
            f64::INFINITY
        },
        dominant,
        basis,
        toggles: *toggles,
    }
}

/// Resonance lineshape family for linewidth ↔ T₂* conversions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LineShape {
    Lorentzian,
    Gaussian,
}

/// Lorentzian FWHM Γ = 1/(πT₂*).
pub fn lorentzian_fwhm(t2star_s: f64) -> f64 {
    assert!(t2star_s > 0.0);
    1.0 / (std::f64::consts::PI * t2star_s)
}

/// Gaussian lineshape standard deviation σ = 1/(√2·π·T₂*).
pub fn gaussian_sigma(t2star_s: f64) -> f64 {
    assert!(t2star_s > 0.0);
    1.0 / (std::f64::consts::SQRT_2 * std::f64::consts::PI * t2star_s)
}

/// T₂* from an EPR peak-to-peak linewidth δ (frequency units):
/// 1/(√3·π·δ) for a Lorentzian profile, √2/(π·δ) for a Gaussian (√6×
/// longer).
pub fn t2star_from_epr_delta(delta_hz: f64, shape: LineShape) -> f64 {
    assert!(delta_hz > 0.0);
    match shape {
        LineShape::Lorentzian => 1.0 / (3.0f64.sqrt() * std::f64::consts::PI * delta_hz),
        LineShape::Gaussian => std::f64::consts::SQRT_2 / (std::f64::consts::PI * delta_hz),
    }
}
