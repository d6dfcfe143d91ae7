//! Diamond material descriptors and measurement protocol parameters.
//!
//! A [`DiamondSample`] captures everything the budget and sensitivity
//! modules need to know about a diamond: defect concentrations (ppm of
//! carbon sites), conversion/charge-state efficiencies, the transverse
//! strain scale, and residual relaxation times. Samples are loaded from a
//! JSON descriptor with top-level keys `concentrations_ppm`,
//! `efficiencies`, `strain`, and `relaxation`; missing optional fields are
//! filled from documented defaults and the applied defaults are reported
//! so they can be recorded in output metadata.
//!
//! All types are immutable after construction and validation is total:
//! every loader path enforces the invariants below.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Natural-abundance ¹³C concentration in ppm.
pub const DEFAULT_C13_PPM: f64 = 10_700.0;
/// Default NV → NV⁻ charge-state efficiency ζ.
pub const DEFAULT_ZETA: f64 = 0.7;
/// Default transverse strain/electric coupling scale ξ⊥ in Hz (low-strain
/// bulk diamond).
pub const DEFAULT_XI_PERP_HZ: f64 = 10e3;
/// Default longitudinal relaxation time T₁ in seconds (room-temperature
/// NV⁻ ensembles).
pub const DEFAULT_T1_S: f64 = 6e-3;

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("cannot read sample descriptor: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed sample descriptor: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid {field}: {message}")]
    Validation { field: &'static str, message: String },
}

fn invalid(field: &'static str, message: impl Into<String>) -> SampleError {
    SampleError::Validation {
        field,
        message: message.into(),
    }
}

/// Validated diamond material descriptor. Concentrations in ppm of carbon
/// lattice sites, times in seconds, couplings in Hz.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiamondSample {
    /// Total incorporated nitrogen [N^T].
    pub n_total_ppm: f64,
    /// Neutral substitutional nitrogen [N_S⁰] (P1 centers).
    pub n_s0_ppm: f64,
    /// Negatively charged NV concentration.
    pub nv_minus_ppm: f64,
    /// Neutral NV concentration.
    pub nv0_ppm: f64,
    /// ¹³C concentration.
    pub c13_ppm: f64,
    /// N → NV⁻ conversion efficiency E_conv = [NV⁻]/[N^T].
    pub e_conv: f64,
    /// N → NV conversion efficiency χ = [NV^T]/[N^T].
    pub chi: f64,
    /// NV → NV⁻ charge-state efficiency ζ.
    pub zeta: f64,
    /// Transverse strain/electric coupling scale ξ⊥ (Hz).
    pub xi_perp_hz: f64,
    /// Ensemble inhomogeneity (spread) of ξ⊥ (Hz).
    pub xi_perp_spread_hz: f64,
    /// Residual dephasing time from unmodeled mechanisms; infinite when
    /// absent from the descriptor.
    pub t2star_other_s: f64,
    /// Longitudinal relaxation time T₁.
    pub t1_s: f64,
}

/// A sample plus the list of descriptor fields that were filled from
/// defaults, for output metadata.
#[derive(Debug, Clone)]
pub struct LoadedSample {
    pub sample: DiamondSample,
    pub defaulted_fields: Vec<&'static str>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
struct Descriptor {
    #[serde(default)]
    concentrations_ppm: Concentrations,
    #[serde(default)]
    efficiencies: Efficiencies,
    #[serde(default)]
    strain: Strain,
    #[serde(default)]
    relaxation: Relaxation,
}

#[derive(Debug, Default, Deserialize, Serialize)]
struct Concentrations {
    n_total: Option<f64>,
    n_s0: Option<f64>,
    nv_minus: Option<f64>,
    nv0: Option<f64>,
    c13: Option<f64>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
struct Efficiencies {
    e_conv: Option<f64>,
    chi: Option<f64>,
    zeta: Option<f64>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
struct Strain {
    xi_perp_hz: Option<f64>,
    xi_perp_spread_hz: Option<f64>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
struct Relaxation {
    t2star_other_s: Option<f64>,
    t1_s: Option<f64>,
}

/// Load and validate a sample descriptor file.
pub fn load_sample(path: impl AsRef<Path>) -> Result<LoadedSample, SampleError> {
    let text = std::fs::read_to_string(path)?;
    sample_from_descriptor_str(&text)
}

/// Parse a descriptor from a JSON string (the file-free entry point).
pub fn sample_from_descriptor_str(text: &str) -> Result<LoadedSample, SampleError> {
    let desc: Descriptor = serde_json::from_str(text)?;
    complete_and_validate(desc)
}

/// Write the canonical descriptor for `sample`. Finite fields round-trip
/// bit-exactly through [`load_sample`]; an infinite `t2star_other_s` is
/// omitted and restored as infinite on load.
pub fn save_sample(sample: &DiamondSample, path: impl AsRef<Path>) -> Result<(), SampleError> {
    let desc = Descriptor {
        concentrations_ppm: Concentrations {
            n_total: Some(sample.n_total_ppm),
            n_s0: Some(sample.n_s0_ppm),
            nv_minus: Some(sample.nv_minus_ppm),
            nv0: Some(sample.nv0_ppm),
            c13: Some(sample.c13_ppm),
        },
        efficiencies: Efficiencies {
            e_conv: Some(sample.e_conv),
            chi: Some(sample.chi),
            zeta: Some(sample.zeta),
        },
        strain: Strain {
            xi_perp_hz: Some(sample.xi_perp_hz),
            xi_perp_spread_hz: Some(sample.xi_perp_spread_hz),
        },
        relaxation: Relaxation {
            t2star_other_s: sample.t2star_other_s.is_finite().then_some(sample.t2star_other_s),
            t1_s: Some(sample.t1_s),
        },
    };
    let text = serde_json::to_string_pretty(&desc).map_err(SampleError::Parse)?;
    std::fs::write(path, text)?;
    Ok(())
}

fn complete_and_validate(desc: Descriptor) -> Result<LoadedSample, SampleError> {
    let mut defaulted: Vec<&'static str> = Vec::new();
    let c = &desc.concentrations_ppm;
    let e = &desc.efficiencies;

    for (field, v) in [
        ("concentrations_ppm.n_total", c.n_total),
        ("concentrations_ppm.n_s0", c.n_s0),
        ("concentrations_ppm.nv_minus", c.nv_minus),
        ("concentrations_ppm.nv0", c.nv0),
        ("concentrations_ppm.c13", c.c13),
    ] {
        if let Some(v) = v {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid("concentrations_ppm", format!("{field} = {v} must be ≥ 0")));
            }
        }
    }

    let n_total = c.n_total.unwrap_or_else(|| {
        defaulted.push("concentrations_ppm.n_total");
        0.0
    });

    // Charge-state efficiency first: needed to split NV^T when only χ is
    // known.
    let zeta = match e.zeta {
        Some(z) => z,
        None => match (c.nv_minus, c.nv0) {
            (Some(m), Some(z0)) if m + z0 > 0.0 => m / (m + z0),
            _ => {
                defaulted.push("efficiencies.zeta");
                DEFAULT_ZETA
            }
        },
    };
    if !(0.0..=1.0).contains(&zeta) {
        return Err(invalid("efficiencies.zeta", format!("{zeta} not in [0, 1]")));
    }

    let nv_minus = match c.nv_minus {
        Some(v) => v,
        None => {
            if let Some(ec) = e.e_conv {
                ec * n_total
            } else if let Some(chi) = e.chi {
                zeta * chi * n_total
            } else {
                defaulted.push("concentrations_ppm.nv_minus");
                0.0
            }
        }
    };

    let nv0 = match c.nv0 {
        Some(v) => v,
        None => {
            if zeta > 0.0 && nv_minus > 0.0 {
                nv_minus * (1.0 - zeta) / zeta
            } else {
                defaulted.push("concentrations_ppm.nv0");
                0.0
            }
        }
    };

    let n_s0 = match c.n_s0 {
        Some(v) => v,
        None => {
            defaulted.push("concentrations_ppm.n_s0");
            (n_total - nv_minus - nv0).max(0.0)
        }
    };

    let c13 = match c.c13 {
        Some(v) => v,
        None => {
            defaulted.push("concentrations_ppm.c13");
            DEFAULT_C13_PPM
        }
    };

    let e_conv = match e.e_conv {
        Some(v) => v,
        None => {
            if n_total > 0.0 {
                nv_minus / n_total
            } else {
                0.0
            }
        }
    };
    let chi = match e.chi {
        Some(v) => v,
        None => {
            if n_total > 0.0 {
                (nv_minus + nv0) / n_total
            } else {
                0.0
            }
        }
    };

    let xi_perp = match desc.strain.xi_perp_hz {
        Some(v) => v,
        None => {
            defaulted.push("strain.xi_perp_hz");
            DEFAULT_XI_PERP_HZ
        }
    };
    let xi_spread = match desc.strain.xi_perp_spread_hz {
        Some(v) => v,
        None => {
            defaulted.push("strain.xi_perp_spread_hz");
            0.0
        }
    };
    let t2star_other = match desc.relaxation.t2star_other_s {
        Some(v) => v,
        None => {
            defaulted.push("relaxation.t2star_other_s");
            f64::INFINITY
        }
    };
    let t1 = match desc.relaxation.t1_s {
        Some(v) => v,
        None => {
            defaulted.push("relaxation.t1_s");
            DEFAULT_T1_S
        }
    };

    // Cross-field consistency only when the descriptor stated both sides.
    if let (Some(ec), Some(m)) = (e.e_conv, c.nv_minus) {
        if n_total > 0.0 {
            let implied = m / n_total;
            if (ec - implied).abs() > 1e-9 * implied.abs().max(f64::MIN_POSITIVE) {
                return Err(invalid(
                    "efficiencies.e_conv",
                    format!("e_conv = {ec} inconsistent with nv_minus/n_total = {implied}"),
                ));
            }
        }
    }
    if let (Some(z), Some(m), Some(z0)) = (e.zeta, c.nv_minus, c.nv0) {
        if m + z0 > 0.0 {
            let implied = m / (m + z0);
            if (z - implied).abs() > 1e-9 * implied.abs().max(f64::MIN_POSITIVE) {
                return Err(invalid(
                    "efficiencies.zeta",
                    format!("zeta = {z} inconsistent with nv_minus/(nv_minus+nv0) = {implied}"),
                ));
            }
        }
    }

    let sample = DiamondSample {
        n_total_ppm: n_total,
        n_s0_ppm: n_s0,
        nv_minus_ppm: nv_minus,
        nv0_ppm: nv0,
        c13_ppm: c13,
        e_conv,
        chi,
        zeta,
        xi_perp_hz: xi_perp,
        xi_perp_spread_hz: xi_spread,
        t2star_other_s: t2star_other,
        t1_s: t1,
    };
    sample.validate()?;
    Ok(LoadedSample {
        sample,
        defaulted_fields: defaulted,
    })
}

impl DiamondSample {
    /// Enforce every invariant; loaders call this on all paths.
    pub fn validate(&self) -> Result<(), SampleError> {
        for (field, v) in [
            ("n_total_ppm", self.n_total_ppm),
            ("n_s0_ppm", self.n_s0_ppm),
            ("nv_minus_ppm", self.nv_minus_ppm),
            ("nv0_ppm", self.nv0_ppm),
            ("c13_ppm", self.c13_ppm),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid("concentrations_ppm", format!("{field} = {v} must be ≥ 0")));
            }
        }
        let conc_sum =
            self.n_total_ppm + self.n_s0_ppm + self.nv_minus_ppm + self.nv0_ppm + self.c13_ppm;
        if conc_sum == 0.0 {
            return Err(invalid(
                "concentrations_ppm",
                "all concentrations are zero; the sample is degenerate",
            ));
        }
        if self.nv_minus_ppm + self.nv0_ppm > self.n_total_ppm * (1.0 + 1e-9) {
            return Err(invalid(
                "concentrations_ppm.nv_minus",
                format!(
                    "nv_minus + nv0 = {} exceeds n_total = {}",
                    self.nv_minus_ppm + self.nv0_ppm,
                    self.n_total_ppm
                ),
            ));
        }
        if self.c13_ppm > 1e6 {
            return Err(invalid(
                "concentrations_ppm.c13",
                format!("{} ppm exceeds 1e6 (every site carbon-13)", self.c13_ppm),
            ));
        }
        for (field, v) in [
            ("e_conv", self.e_conv),
            ("chi", self.chi),
            ("zeta", self.zeta),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(invalid("efficiencies", format!("{field} = {v} not in [0, 1]")));
            }
        }
        if self.n_total_ppm > 0.0 {
            let implied = self.nv_minus_ppm / self.n_total_ppm;
            if (self.e_conv - implied).abs() > 1e-9 * implied.max(f64::MIN_POSITIVE) {
                return Err(invalid(
                    "e_conv",
                    format!("{} inconsistent with [NV⁻]/[N^T] = {implied}", self.e_conv),
                ));
            }
        }
        if !(self.xi_perp_hz >= 0.0 && self.xi_perp_spread_hz >= 0.0) {
            return Err(invalid("strain", "ξ⊥ and its spread must be ≥ 0".to_string()));
        }
        if !(self.t1_s > 0.0) {
            return Err(invalid("relaxation.t1_s", format!("{} must be > 0", self.t1_s)));
        }
        if !(self.t2star_other_s > 0.0) {
            return Err(invalid(
                "relaxation.t2star_other_s",
                format!("{} must be > 0", self.t2star_other_s),
            ));
        }
        Ok(())
    }
}

/// Measurement protocol kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Protocol {
    Ramsey,
    CwOdmr,
    PulsedOdmr,
    HahnEcho,
    Cpmg,
}

impl Protocol {
    pub fn as_str(&self) -> &'static str {
        match self {
            Protocol::Ramsey => "ramsey",
            Protocol::CwOdmr => "cw-odmr",
            Protocol::PulsedOdmr => "pulsed-odmr",
            Protocol::HahnEcho => "hahn-echo",
            Protocol::Cpmg => "cpmg",
        }
    }
}

/// Measurement basis: single-quantum {|0⟩, |±1⟩} or double-quantum
/// {|−1⟩, |+1⟩}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Basis {
    Sq,
    Dq,
}

impl Basis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Basis::Sq => "SQ",
            Basis::Dq => "DQ",
        }
    }

    /// Spin quantum number difference Δm_s of the basis.
    pub fn delta_ms(&self) -> u8 {
        match self {
            Basis::Sq => 1,
            Basis::Dq => 2,
        }
    }
}

/// Measurement descriptor shared by the sensitivity formulas.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolParams {
    pub protocol: Protocol,
    /// Interrogation (free precession) time τ in seconds.
    pub tau_s: f64,
    /// Initialization time in seconds.
    pub t_i_s: f64,
    /// Readout time in seconds.
    pub t_r_s: f64,
    /// Fringe contrast C ∈ [0, 1].
    pub contrast: f64,
    /// Mean photons per NV per readout.
    pub n_avg: f64,
    /// Number of interrogated sensors N.
    pub n_sensors: f64,
    /// Δm_s of the interferometry pair (1 or 2).
    pub delta_ms: u8,
    /// Stretched-exponential exponent p of the decay envelope:
    /// 1 for ensembles in dipolar spin baths (Lorentzian line), 2 for
    /// single centers (Gaussian line). Always overridable.
    pub p_exponent: f64,
    pub basis: Basis,
    /// Pulse count for CPMG sequences.
    pub k_pulses: u32,
    /// Coherence power-law scaling s in [0, 1) for multipulse sequences.
    pub s_scaling: f64,
    /// AC field period T_B in seconds (echo/CPMG only).
    pub t_b_s: Option<f64>,
    /// Photon detection rate R in 1/s (CW-ODMR only).
    pub rate_r_hz: Option<f64>,
    /// Resonance linewidth Δν in Hz (CW-ODMR only).
    pub linewidth_hz: Option<f64>,
}

impl ProtocolParams {
    /// A Ramsey descriptor with ensemble defaults (p = 1, SQ basis).
    pub fn ramsey(tau_s: f64, t_i_s: f64, t_r_s: f64, contrast: f64, n_avg: f64, n_sensors: f64) -> Self {
        Self {
            protocol: Protocol::Ramsey,
            tau_s,
            t_i_s,
            t_r_s,
            contrast,
            n_avg,
            n_sensors,
            delta_ms: 1,
            p_exponent: 1.0,
            basis: Basis::Sq,
            k_pulses: 1,
            s_scaling: 0.0,
            t_b_s: None,
            rate_r_hz: None,
            linewidth_hz: None,
        }
    }

    pub fn validate(&self) -> Result<(), SampleError> {
        if self.delta_ms != self.basis.delta_ms() {
            return Err(invalid(
                "delta_ms",
                format!(
                    "basis {} requires delta_ms = {}, got {}",
                    self.basis.as_str(),
                    self.basis.delta_ms(),
                    self.delta_ms
                ),
            ));
        }
        for (field, v) in [("tau_s", self.tau_s), ("t_i_s", self.t_i_s), ("t_r_s", self.t_r_s)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid("times", format!("{field} = {v} must be ≥ 0")));
            }
        }
        if self.tau_s + self.t_i_s + self.t_r_s == 0.0 {
            return Err(invalid("times", "tau, t_I, t_R cannot all be zero".to_string()));
        }
        if !(0.0..=1.0).contains(&self.contrast) {
            return Err(invalid("contrast", format!("{} not in [0, 1]", self.contrast)));
        }
        if !(self.n_avg >= 0.0) {
            return Err(invalid("n_avg", format!("{} must be ≥ 0", self.n_avg)));
        }
        if !(self.n_sensors >= 1.0) {
            return Err(invalid("n_sensors", format!("{} must be ≥ 1", self.n_sensors)));
        }
        if !(self.p_exponent > 0.0) {
            return Err(invalid("p_exponent", format!("{} must be > 0", self.p_exponent)));
        }
        if self.k_pulses < 1 {
            return Err(invalid("k_pulses", "pulse count must be ≥ 1".to_string()));
        }
        if !(0.0..1.0).contains(&self.s_scaling) {
            return Err(invalid("s_scaling", format!("{} not in [0, 1)", self.s_scaling)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn survey_row_descriptor_derives_nv_minus() {
        // n_total = 27 ppm with E_conv = 6.3% gives [NV⁻] ≈ 1.7 ppm.
        let text = r#"{
            "concentrations_ppm": { "n_total": 27.0 },
            "efficiencies": { "e_conv": 0.063 }
        }"#;
        let loaded = sample_from_descriptor_str(text).unwrap();
        assert_relative_eq!(loaded.sample.nv_minus_ppm, 1.701, max_relative = 1e-12);
        assert!((loaded.sample.nv_minus_ppm - 1.7).abs() < 0.01);
        assert!(loaded.defaulted_fields.contains(&"concentrations_ppm.c13"));
        assert_eq!(loaded.sample.c13_ppm, DEFAULT_C13_PPM);
    }

    #[test]
    fn all_zero_concentrations_rejected() {
        let text = r#"{
            "concentrations_ppm": { "n_total": 0.0, "n_s0": 0.0, "nv_minus": 0.0, "nv0": 0.0, "c13": 0.0 }
        }"#;
        let err = sample_from_descriptor_str(text).unwrap_err();
        assert!(matches!(err, SampleError::Validation { .. }), "{err}");
    }

    #[test]
    fn omitted_c13_defaults_to_natural_abundance() {
        let text = r#"{ "concentrations_ppm": { "n_total": 1.0 } }"#;
        let loaded = sample_from_descriptor_str(text).unwrap();
        assert_eq!(loaded.sample.c13_ppm, 10_700.0);
        assert_eq!(loaded.sample.zeta, DEFAULT_ZETA);
        assert_eq!(loaded.sample.xi_perp_hz, DEFAULT_XI_PERP_HZ);
        assert!(loaded.sample.t2star_other_s.is_infinite());
    }

    #[test]
    fn malformed_descriptor_is_parse_error() {
        assert!(matches!(
            sample_from_descriptor_str("{ not json"),
            Err(SampleError::Parse(_))
        ));
    }

    #[test]
    fn inconsistent_e_conv_rejected() {
        let text = r#"{
            "concentrations_ppm": { "n_total": 10.0, "nv_minus": 1.0 },
            "efficiencies": { "e_conv": 0.5 }
        }"#;
        assert!(sample_from_descriptor_str(text).is_err());
    }

    #[test]
    fn nv_exceeding_total_rejected() {
        let text = r#"{
            "concentrations_ppm": { "n_total": 1.0, "nv_minus": 0.8, "nv0": 0.5 },
            "efficiencies": { "e_conv": 0.8 }
        }"#;
        assert!(sample_from_descriptor_str(text).is_err());
    }

    #[test]
    fn round_trip_bit_exact() {
        let text = r#"{
            "concentrations_ppm": { "n_total": 27.0, "n_s0": 23.5, "nv_minus": 1.701, "nv0": 0.9, "c13": 107.0 },
            "strain": { "xi_perp_hz": 12345.678, "xi_perp_spread_hz": 432.1 },
            "relaxation": { "t2star_other_s": 0.000694, "t1_s": 0.0061 }
        }"#;
        let first = sample_from_descriptor_str(text).unwrap().sample;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sample.json");
        save_sample(&first, &path).unwrap();
        let second = load_sample(&path).unwrap().sample;
        assert_eq!(first.n_total_ppm.to_bits(), second.n_total_ppm.to_bits());
        assert_eq!(first.nv_minus_ppm.to_bits(), second.nv_minus_ppm.to_bits());
        assert_eq!(first.zeta.to_bits(), second.zeta.to_bits());
        assert_eq!(first.xi_perp_hz.to_bits(), second.xi_perp_hz.to_bits());
        assert_eq!(first.t2star_other_s.to_bits(), second.t2star_other_s.to_bits());
        assert_eq!(first, second);
    }

    #[test]
    fn zeta_derived_from_charge_states() {
        let text = r#"{
            "concentrations_ppm": { "n_total": 10.0, "nv_minus": 1.5, "nv0": 0.5 }
        }"#;
        let loaded = sample_from_descriptor_str(text).unwrap();
        assert_relative_eq!(loaded.sample.zeta, 0.75);
        assert!(!loaded.defaulted_fields.contains(&"efficiencies.zeta"));
    }

    #[test]
    fn protocol_basis_consistency() {
        let mut p = ProtocolParams::ramsey(1e-6, 0.0, 0.0, 0.01, 0.01, 1.0);
        assert!(p.validate().is_ok());
        p.basis = Basis::Dq;
        assert!(p.validate().is_err());
        p.delta_ms = 2;
        assert!(p.validate().is_ok());
    }

    #[test]
    fn protocol_rejects_all_zero_times() {
        let p = ProtocolParams::ramsey(0.0, 0.0, 0.0, 0.01, 0.01, 1.0);
        assert!(p.validate().is_err());
    }
}
