//! CSV records for budgets and sensitivity reports.
//!
//! Output is RFC-4180 CSV with a mandatory header row, preceded by
//! `#`-prefixed metadata comment lines carrying the tool version, the RNG
//! seed when one applies, and every defaulted parameter. Floats are
//! written in Rust's shortest round-trip decimal form, so reading a record
//! back reproduces the in-memory value exactly.

use std::io::Write;
use std::path::Path;

use thiserror::Error;

use crate::budget::DephasingBudget;
use crate::sensitivity::SensitivityReport;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
}

/// Metadata emitted as `#` comment lines above the CSV header.
#[derive(Debug, Clone, Default)]
pub struct CsvMetadata {
    pub tool_version: String,
    pub seed: Option<u64>,
    /// Names of parameters that were filled from defaults.
    pub defaults_applied: Vec<String>,
    /// Extra key/value pairs (toggles, inputs).
    pub extra: Vec<(String, String)>,
}

impl CsvMetadata {
    pub fn new() -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            ..Self::default()
        }
    }

    fn write(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "# tool_version: {}", self.tool_version)?;
        if let Some(seed) = self.seed {
            writeln!(w, "# seed: {seed}")?;
        }
        if !self.defaults_applied.is_empty() {
            writeln!(w, "# defaults_applied: {}", self.defaults_applied.join(" "))?;
        }
        for (k, v) in &self.extra {
            writeln!(w, "# {k}: {v}")?;
        }
        Ok(())
    }
}

/// Quote a field per RFC 4180 when it contains a comma, quote, or newline.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Shortest decimal representation that round-trips the value, in
/// scientific form outside the comfortably readable magnitude range.
pub fn fmt_f64(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 || (1e-4..1e7).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Write a budget as `mechanism,rate_per_s` rows plus total/dominant
/// summary rows.
pub fn write_budget_csv(
    budget: &DephasingBudget,
    meta: &CsvMetadata,
    w: &mut impl Write,
) -> Result<(), ReportError> {
    meta.write(w)?;
    writeln!(w, "# basis: {}", budget.basis.as_str())?;
    writeln!(
        w,
        "# bath_drive: {} drive_suppression: {}",
        budget.toggles.bath_drive,
        fmt_f64(budget.toggles.drive_suppression)
    )?;
    writeln!(w, "mechanism,rate_per_s")?;
    for (mech, rate) in &budget.entries {
        writeln!(w, "{},{}", csv_field(mech.as_str()), fmt_f64(*rate))?;
    }
    writeln!(w, "total,{}", fmt_f64(budget.total_rate_per_s))?;
    writeln!(w, "total_t2star_s,{}", fmt_f64(budget.total_t2star_s))?;
    writeln!(w, "dominant,{}", csv_field(budget.dominant.as_str()))?;
    Ok(())
}

pub const SENSITIVITY_HEADER: &str = "protocol,eta_t_per_sqrt_hz,projection_limit,dephasing_factor,readout_factor,overhead_factor,tau_s,t_i_s,t_r_s,contrast,n_avg,n_sensors,delta_ms,p_exponent,basis,k_pulses,s_scaling,t_b_s,rate_r_hz,linewidth_hz,warnings";

/// One CSV row per sensitivity report: protocol, η, the four factors, and
/// every input.
pub fn write_sensitivity_csv(
    reports: &[SensitivityReport],
    meta: &CsvMetadata,
    w: &mut impl Write,
) -> Result<(), ReportError> {
    meta.write(w)?;
    writeln!(w, "{SENSITIVITY_HEADER}")?;
    for r in reports {
        let p = &r.inputs;
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            p.protocol.as_str(),
            fmt_f64(r.eta_t_per_sqrt_hz),
            fmt_f64(r.factors.projection_limit),
            fmt_f64(r.factors.dephasing_factor),
            fmt_f64(r.factors.readout_factor),
            fmt_f64(r.factors.overhead_factor),
            fmt_f64(p.tau_s),
            fmt_f64(p.t_i_s),
            fmt_f64(p.t_r_s),
            fmt_f64(p.contrast),
            fmt_f64(p.n_avg),
            fmt_f64(p.n_sensors),
            p.delta_ms,
            fmt_f64(p.p_exponent),
            p.basis.as_str(),
            p.k_pulses,
            fmt_f64(p.s_scaling),
            opt(p.t_b_s),
            opt(p.rate_r_hz),
            opt(p.linewidth_hz),
            csv_field(&r.warnings.join("; ")),
        )?;
    }
    Ok(())
}

/// Report payloads accepted by [`save_report`].
pub enum Report<'a> {
    Budget(&'a DephasingBudget),
    Sensitivity(&'a [SensitivityReport]),
}

/// Write a report to `path`, overwriting any existing file with identical
/// content for identical inputs.
pub fn save_report(report: Report<'_>, meta: &CsvMetadata, path: impl AsRef<Path>) -> Result<(), ReportError> {
    let mut buf: Vec<u8> = Vec::new();
    match report {
        Report::Budget(b) => write_budget_csv(b, meta, &mut buf)?,
        Report::Sensitivity(rs) => write_sensitivity_csv(rs, meta, &mut buf)?,
    }
    std::fs::write(path, buf)?;
    Ok(())
}
