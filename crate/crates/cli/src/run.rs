//! Subcommand dispatch and CSV emission.

use std::io::Write;

use clap::{Args, Subcommand, ValueEnum};

use nvsk_core::budget::{total_budget, BudgetEnvironment, BudgetToggles};
use nvsk_core::constants::constants;
use nvsk_core::dynamics::{
    estimate_field, simulate_ramsey_measurement, EstimatorCalibration, RamseyMeasurementConfig,
    ReadoutModel,
};
use nvsk_core::hamiltonian::{
    build_hamiltonian, transition_frequencies_exact, transition_frequencies_perturbative,
    FieldEnvironment, Nucleus,
};
use nvsk_core::materials::{
    irradiation_dose, vacancy_diffusion, DEFAULT_D0_M2S, DEFAULT_EA_EV,
    DEFAULT_NITROGENS_PER_NV, DEFAULT_RECOMBINATION_FRACTION,
    DEFAULT_VACANCY_YIELD_PER_E_PER_UM,
};
use nvsk_core::optimizer::{enhancement, nitrogen_sweep, optimal_tau, relative_eta};
use nvsk_core::report::{
    csv_field, fmt_f64, write_budget_csv, write_sensitivity_csv, CsvMetadata, SENSITIVITY_HEADER,
};
use nvsk_core::sample::{load_sample, Basis, LoadedSample, Protocol, ProtocolParams};
use nvsk_core::sensitivity::{
    eta_cw_odmr, eta_hahn_echo, eta_multipulse, eta_pulsed_odmr, eta_ramsey_exact,
    eta_ramsey_shot, k_opt, k_opt_real, SensitivityReport,
};

use crate::grid::GridSpec;
use crate::Cli;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
}

impl From<nvsk_core::sample::SampleError> for CliError {
    fn from(e: nvsk_core::sample::SampleError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(format!("i/o error: {e}"))
    }
}

impl From<nvsk_core::report::ReportError> for CliError {
    fn from(e: nvsk_core::report::ReportError) -> Self {
        CliError::Validation(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NucleusArg {
    None,
    N14,
    N15,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Exact,
    Perturbative,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BasisArg {
    Sq,
    Dq,
}

impl BasisArg {
    fn to_basis(self) -> Basis {
        match self {
            BasisArg::Sq => Basis::Sq,
            BasisArg::Dq => Basis::Dq,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ProtocolArg {
    Ramsey,
    RamseyShot,
    CwOdmr,
    PulsedOdmr,
    HahnEcho,
    Cpmg,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spin-resonance transition frequencies for a field magnitude and
    /// angle.
    Levels(LevelsArgs),
    /// Itemized dephasing budget for a sample.
    Budget(BudgetArgs),
    /// Protocol sensitivity with its factor breakdown.
    Sensitivity(SensitivityArgs),
    /// Optimal free-precession time (and enhancement curves).
    OptimizeTau(OptimizeTauArgs),
    /// Optimal CPMG pulse number and the sensitivity-vs-k scan.
    OptimizePulses(OptimizePulsesArgs),
    /// Sensitivity trade-off across total nitrogen concentration.
    SweepNitrogen(SweepNitrogenArgs),
    /// Monte Carlo Ramsey photon-readout simulation.
    Simulate(SimulateArgs),
    /// Vacancy-diffusion annealing calculator.
    Anneal(AnnealArgs),
    /// Electron-irradiation dose estimate.
    Irradiate(IrradiateArgs),
}

#[derive(Debug, Args)]
pub struct LevelsArgs {
    /// Field magnitude in mT.
    #[arg(long, default_value_t = 1.0)]
    b_mt: f64,
    /// Field angle from the NV axis in degrees.
    #[arg(long, default_value_t = 0.0)]
    theta_deg: f64,
    #[arg(long, value_enum, default_value_t = NucleusArg::None)]
    nucleus: NucleusArg,
    #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
    method: MethodArg,
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    #[arg(long, value_enum, default_value_t = BasisArg::Sq)]
    basis: BasisArg,
    /// Drive the electronic spin bath resonantly.
    #[arg(long)]
    bath_drive: bool,
    /// Fraction of the driven rates removed (1 = ideal drive).
    #[arg(long, default_value_t = 1.0)]
    drive_suppression: f64,
    /// Axial bias field in mT (sets the Stark-suppression coupling).
    #[arg(long, default_value_t = 0.0)]
    b_z_mt: f64,
    /// Magnetic-gradient dephasing rate in 1/s.
    #[arg(long, default_value_t = 0.0)]
    gradients_rate: f64,
    /// Temperature-variation dephasing rate in 1/s.
    #[arg(long, default_value_t = 0.0)]
    temp_rate: f64,
    /// Axial strain inhomogeneity rate in 1/s.
    #[arg(long, default_value_t = 0.0)]
    strain_axial_rate: f64,
    /// Count NV0 as an A_N-strength spin bath.
    #[arg(long)]
    nv0_as_nitrogen: bool,
}

#[derive(Debug, Args)]
pub struct SensitivityArgs {
    #[arg(long, value_enum)]
    protocol: ProtocolArg,
    /// Interrogation time τ in s (defaults to the optimal τ when a
    /// coherence time is given).
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    t_i: f64,
    #[arg(long, default_value_t = 0.0)]
    t_r: f64,
    #[arg(long, default_value_t = 0.01)]
    contrast: f64,
    /// Mean photons per NV per readout.
    #[arg(long, default_value_t = 0.01)]
    n_avg: f64,
    #[arg(long, default_value_t = 1.0)]
    n_sensors: f64,
    #[arg(long, value_enum, default_value_t = BasisArg::Sq)]
    basis: BasisArg,
    /// Stretched-exponential exponent p.
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// Dephasing time T₂* in s (Ramsey/pulsed ODMR).
    #[arg(long)]
    t2star: Option<f64>,
    /// Coherence time T₂ in s (echo/CPMG).
    #[arg(long)]
    t2: Option<f64>,
    /// CPMG pulse count.
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Coherence power-law scaling s.
    #[arg(long, default_value_t = 2.0 / 3.0)]
    s: f64,
    /// AC field period T_B in s.
    #[arg(long)]
    t_b: Option<f64>,
    /// Photon detection rate R in 1/s (CW-ODMR).
    #[arg(long)]
    rate: Option<f64>,
    /// Resonance linewidth Δν in Hz (CW-ODMR).
    #[arg(long)]
    linewidth: Option<f64>,
    /// Total photons per measurement 𝒩 (pulsed ODMR).
    #[arg(long)]
    n_photons: Option<f64>,
    /// AC field phase unknown (echo/CPMG √2 penalty).
    #[arg(long)]
    unlocked: bool,
    /// Sweep one parameter: name=start:stop:steps
    /// (tau|t2star|t2|contrast|n-avg|n-sensors|t-b).
    #[arg(long)]
    grid: Vec<String>,
    /// Use geometric spacing for the sweep.
    #[arg(long)]
    log: bool,
}

#[derive(Debug, Args)]
pub struct OptimizeTauArgs {
    #[arg(long)]
    t2star: f64,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// Overhead time t_O = t_I + t_R in s.
    #[arg(long, default_value_t = 0.0)]
    overhead: f64,
    /// Reference T₂* for an enhancement column.
    #[arg(long)]
    t2star_ref: Option<f64>,
    /// Sweep one parameter: name=start:stop:steps (t2star|overhead).
    #[arg(long)]
    grid: Vec<String>,
    #[arg(long)]
    log: bool,
}

#[derive(Debug, Args)]
pub struct OptimizePulsesArgs {
    /// Hahn-echo coherence time T₂ in s.
    #[arg(long)]
    t2: f64,
    /// AC field period T_B in s.
    #[arg(long)]
    t_b: f64,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 2.0 / 3.0)]
    s: f64,
    /// Emit an η(k) scan up to this pulse count.
    #[arg(long)]
    scan_max: Option<u32>,
    #[arg(long, default_value_t = 0.01)]
    contrast: f64,
    #[arg(long, default_value_t = 0.01)]
    n_avg: f64,
    #[arg(long, default_value_t = 1.0)]
    n_sensors: f64,
}

#[derive(Debug, Args)]
pub struct SweepNitrogenArgs {
    /// Concentration grid start:stop:steps in ppm.
    #[arg(long)]
    grid: String,
    #[arg(long)]
    log: bool,
    #[arg(long, default_value_t = 0.01)]
    contrast: f64,
    #[arg(long, default_value_t = 0.01)]
    n_avg: f64,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 0.0)]
    t_i: f64,
    #[arg(long, default_value_t = 0.0)]
    t_r: f64,
    #[arg(long)]
    nv0_as_nitrogen: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Mean photons per readout from m_s = 0.
    #[arg(long)]
    a: f64,
    /// Mean photons per readout from m_s = ±1.
    #[arg(long)]
    b: f64,
    /// Free precession time τ in s.
    #[arg(long)]
    tau: f64,
    /// Final-pulse phase ϑ in rad.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    vartheta: f64,
    /// Sensed field in T.
    #[arg(long, default_value_t = 0.0)]
    b_sense: f64,
    #[arg(long)]
    shots: u64,
    /// Draw per-measurement dephasing for this T₂* (s).
    #[arg(long)]
    t2star: Option<f64>,
    /// Stretch exponent for the dephasing draw (1 or 2).
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// Emit summary statistics instead of per-shot counts.
    #[arg(long)]
    summary: bool,
}

#[derive(Debug, Args)]
pub struct AnnealArgs {
    /// Annealing temperature in °C.
    #[arg(long)]
    temp_c: f64,
    /// Annealing duration in hours.
    #[arg(long)]
    hours: f64,
    /// Diffusion prefactor D₀ in m²/s.
    #[arg(long)]
    d0: Option<f64>,
    /// Activation energy in eV.
    #[arg(long)]
    ea: Option<f64>,
}

#[derive(Debug, Args)]
pub struct IrradiateArgs {
    /// Total nitrogen concentration in ppm.
    #[arg(long)]
    n_ppm: f64,
    /// Vacancies created per electron per µm.
    #[arg(long = "yield")]
    vac_yield: Option<f64>,
    /// Fraction of vacancies lost to immediate recombination.
    #[arg(long)]
    recombination: Option<f64>,
    /// Substitutional nitrogens consumed per NV⁻.
    #[arg(long)]
    nitrogens_per_nv: Option<f64>,
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let mut out: Vec<u8> = Vec::new();
    match &cli.command {
        Command::Levels(args) => levels(args, &mut out)?,
        Command::Budget(args) => budget(cli, args, &mut out)?,
        Command::Sensitivity(args) => sensitivity(args, &mut out)?,
        Command::OptimizeTau(args) => optimize_tau_cmd(args, &mut out)?,
        Command::OptimizePulses(args) => optimize_pulses(args, &mut out)?,
        Command::SweepNitrogen(args) => sweep_nitrogen(cli, args, &mut out)?,
        Command::Simulate(args) => simulate(cli, args, &mut out)?,
        Command::Anneal(args) => anneal(args, &mut out)?,
        Command::Irradiate(args) => irradiate(args, &mut out)?,
    }
    match &cli.out {
        Some(path) => std::fs::write(path, out)?,
        None => std::io::stdout().write_all(&out)?,
    }
    Ok(())
}

fn meta() -> CsvMetadata {
    CsvMetadata::new()
}

fn require_sample(cli: &Cli) -> Result<LoadedSample, CliError> {
    let path = cli
        .sample
        .as_ref()
        .ok_or_else(|| CliError::Usage("this subcommand requires --sample <path>".into()))?;
    Ok(load_sample(path)?)
}

fn levels(args: &LevelsArgs, out: &mut Vec<u8>) -> Result<(), CliError> {
    let b_t = args.b_mt * 1e-3;
    let theta = args.theta_deg.to_radians();
    let mut m = meta();
    m.extra.push(("b_mt".into(), fmt_f64(args.b_mt)));
    m.extra.push(("theta_deg".into(), fmt_f64(args.theta_deg)));
    let mut rows: Vec<(String, String, f64)> = Vec::new();

    let nucleus = match args.nucleus {
        NucleusArg::None => Nucleus::None,
        NucleusArg::N14 => Nucleus::N14,
        NucleusArg::N15 => Nucleus::N15,
    };
    let want_exact = matches!(args.method, MethodArg::Exact | MethodArg::Both);
    let want_pert = matches!(args.method, MethodArg::Perturbative | MethodArg::Both);
    if want_exact {
        let h = build_hamiltonian(&FieldEnvironment::tilted_b(b_t, theta), nucleus)
            .map_err(|e| CliError::Validation(e.to_string()))?;
        let transitions =
            transition_frequencies_exact(&h).map_err(|e| CliError::Validation(e.to_string()))?;
        for t in transitions {
            rows.push(("exact".into(), t.label, t.frequency_hz));
        }
    }
    if want_pert {
        if !matches!(nucleus, Nucleus::None) {
            return Err(CliError::Usage(
                "the perturbative series is electronic-only; use --nucleus none".into(),
            ));
        }
        let (nu_p, nu_m) = transition_frequencies_perturbative(b_t, theta)
            .map_err(|e| CliError::Validation(e.to_string()))?;
        rows.push(("perturbative".into(), "nu-".into(), nu_m));
        rows.push(("perturbative".into(), "nu+".into(), nu_p));
    }

    write_meta(&m, out)?;
    writeln!(out, "method,label,frequency_hz")?;
    for (method, label, f) in rows {
        writeln!(out, "{method},{},{}", csv_field(&label), fmt_f64(f))?;
    }
    Ok(())
}

fn budget(cli: &Cli, args: &BudgetArgs, out: &mut Vec<u8>) -> Result<(), CliError> {
    let loaded = require_sample(cli)?;
    let env = BudgetEnvironment {
        beta_z_hz: constants().gamma_e_over_2pi() * args.b_z_mt * 1e-3,
        gradients_rate_per_s: args.gradients_rate,
        temperature_rate_per_s: args.temp_rate,
        strain_axial_rate_per_s: args.strain_axial_rate,
    };
    let toggles = BudgetToggles {
        bath_drive: args.bath_drive,
        drive_suppression: args.drive_suppression,
        nv0_as_nitrogen: args.nv0_as_nitrogen,
        ..BudgetToggles::default()
    };
    let b = total_budget(&loaded.sample, &env, args.basis.to_basis(), &toggles);
    let mut m = meta();
    m.defaults_applied = loaded
        .defaulted_fields
        .iter()
        .map(|s| s.to_string())
        .collect();
    m.extra
        .push(("nv0_as_nitrogen".into(), args.nv0_as_nitrogen.to_string()));
    m.extra.push(("beta_z_hz".into(), fmt_f64(env.beta_z_hz)));
    write_budget_csv(&b, &m, out)?;
    Ok(())
}

fn build_protocol(args: &SensitivityArgs) -> Result<(ProtocolParams, f64), CliError> {
    let basis = args.basis.to_basis();
    let coherence = match args.protocol {
        ProtocolArg::Ramsey | ProtocolArg::RamseyShot | ProtocolArg::PulsedOdmr => args
            .t2star
            .ok_or_else(|| CliError::Usage("this protocol requires --t2star".into()))?,
        ProtocolArg::HahnEcho | ProtocolArg::Cpmg => args
            .t2
            .ok_or_else(|| CliError::Usage("this protocol requires --t2".into()))?,
        ProtocolArg::CwOdmr => 0.0,
    };
    let tau = args
        .tau
        .unwrap_or_else(|| optimal_tau(coherence.max(1e-12), args.p, args.t_i + args.t_r));
    let protocol = match args.protocol {
        ProtocolArg::Ramsey | ProtocolArg::RamseyShot => Protocol::Ramsey,
        ProtocolArg::CwOdmr => Protocol::CwOdmr,
        ProtocolArg::PulsedOdmr => Protocol::PulsedOdmr,
        ProtocolArg::HahnEcho => Protocol::HahnEcho,
        ProtocolArg::Cpmg => Protocol::Cpmg,
    };
    let params = ProtocolParams {
        protocol,
        tau_s: tau,
        t_i_s: args.t_i,
        t_r_s: args.t_r,
        contrast: args.contrast,
        n_avg: args.n_avg,
        n_sensors: args.n_sensors,
        delta_ms: basis.delta_ms(),
        p_exponent: args.p,
        basis,
        k_pulses: args.k,
        s_scaling: args.s,
        t_b_s: args.t_b,
        rate_r_hz: args.rate,
        linewidth_hz: args.linewidth,
    };
    Ok((params, coherence))
}

fn eval_sensitivity(args: &SensitivityArgs) -> Result<SensitivityReport, CliError> {
    let (params, coherence) = build_protocol(args)?;
    let report = match args.protocol {
        ProtocolArg::Ramsey => eta_ramsey_exact(&params, coherence)?,
        ProtocolArg::RamseyShot => eta_ramsey_shot(&params, coherence)?,
        ProtocolArg::HahnEcho => eta_hahn_echo(&params, coherence, !args.unlocked)?,
        ProtocolArg::Cpmg => eta_multipulse(&params, coherence, args.k, args.s)?,
        ProtocolArg::CwOdmr | ProtocolArg::PulsedOdmr => unreachable!("handled separately"),
    };
    Ok(report)
}

fn sensitivity(args: &SensitivityArgs, out: &mut Vec<u8>) -> Result<(), CliError> {
    if args.grid.len() > 1 {
        return Err(CliError::Usage(
            "exactly one --grid parameter may be swept".into(),
        ));
    }

    // CW and pulsed ODMR have no four-factor breakdown; emit their single
    // row with empty factor columns.
    if matches!(args.protocol, ProtocolArg::CwOdmr | ProtocolArg::PulsedOdmr) {
        if !args.grid.is_empty() {
            return Err(CliError::Usage(
                "--grid sweeps are supported for the pulsed interferometry protocols".into(),
            ));
        }
        let mut m = meta();
        let (name, eta, extra) = match args.protocol {
            ProtocolArg::CwOdmr => {
                let linewidth = args
                    .linewidth
                    .ok_or_else(|| CliError::Usage("cw-odmr requires --linewidth".into()))?;
                let rate = args
                    .rate
                    .ok_or_else(|| CliError::Usage("cw-odmr requires --rate".into()))?;
                let r = eta_cw_odmr(linewidth, args.contrast, rate);
                (
                    "cw-odmr",
                    r.eta_t_per_sqrt_hz,
                    Some(("optimal_detuning_hz".to_string(), fmt_f64(r.optimal_detuning_hz))),
                )
            }
            ProtocolArg::PulsedOdmr => {
                let t2star = args
                    .t2star
                    .ok_or_else(|| CliError::Usage("pulsed-odmr requires --t2star".into()))?;
                let n_photons = args
                    .n_photons
                    .ok_or_else(|| CliError::Usage("pulsed-odmr requires --n-photons".into()))?;
                let eta = eta_pulsed_odmr(t2star, args.contrast, n_photons, args.t_i, args.t_r);
                ("pulsed-odmr", eta, None)
            }
            _ => unreachable!(),
        };
        if let Some(kv) = extra {
            m.extra.push(kv);
        }
        write_meta(&m, out)?;
        writeln!(out, "{SENSITIVITY_HEADER}")?;
        writeln!(
            out,
            "{name},{},,,,,,,,{},{},{},,,,,,{},{},{},",
            fmt_f64(eta),
            fmt_f64(args.contrast),
            fmt_f64(args.n_avg),
            fmt_f64(args.n_sensors),
            args.t_b.map(fmt_f64).unwrap_or_default(),
            args.rate.map(fmt_f64).unwrap_or_default(),
            args.linewidth.map(fmt_f64).unwrap_or_default(),
        )?;
        return Ok(());
    }

    let reports = match args.grid.first() {
        None => vec![eval_sensitivity(args)?],
        Some(spec_text) => {
            let spec = GridSpec::parse(spec_text).map_err(CliError::Usage)?;
            let name = spec
                .param
                .clone()
                .ok_or_else(|| CliError::Usage("grid must name a parameter".into()))?;
            let points = spec.points(args.log).map_err(CliError::Usage)?;
            let mut reports = Vec::with_capacity(points.len());
            for v in points {
                let mut varied = clone_args(args);
                apply_sweep_param(&mut varied, &name, v)?;
                reports.push(eval_sensitivity(&varied)?);
            }
            reports
        }
    };
    let mut m = meta();
    if args.tau.is_none() {
        m.defaults_applied.push("tau=optimal".into());
    }
    write_sensitivity_csv(&reports, &m, out)?;
    Ok(())
}

fn clone_args(args: &SensitivityArgs) -> SensitivityArgs {
    SensitivityArgs {
        protocol: args.protocol,
        tau: args.tau,
        t_i: args.t_i,
        t_r: args.t_r,
        contrast: args.contrast,
        n_avg: args.n_avg,
        n_sensors: args.n_sensors,
        basis: args.basis,
        p: args.p,
        t2star: args.t2star,
        t2: args.t2,
        k: args.k,
        s: args.s,
        t_b: args.t_b,
        rate: args.rate,
        linewidth: args.linewidth,
        n_photons: args.n_photons,
        unlocked: args.unlocked,
        grid: Vec::new(),
        log: args.log,
    }
}

fn apply_sweep_param(args: &mut SensitivityArgs, name: &str, value: f64) -> Result<(), CliError> {
    match name {
        "tau" => args.tau = Some(value),
        "t2star" => args.t2star = Some(value),
        "t2" => args.t2 = Some(value),
        "contrast" => args.contrast = value,
        "n-avg" => args.n_avg = value,
        "n-sensors" => args.n_sensors = value,
        "t-b" => args.t_b = Some(value),
        other => {
            return Err(CliError::Usage(format!(
                "unknown sweep parameter `{other}` (tau|t2star|t2|contrast|n-avg|n-sensors|t-b)"
            )))
        }
    }
    Ok(())
}

fn optimize_tau_cmd(args: &OptimizeTauArgs, out: &mut Vec<u8>) -> Result<(), CliError> {
    if args.grid.len() > 1 {
        return Err(CliError::Usage(
            "exactly one --grid parameter may be swept".into(),
        ));
    }
    if !(args.t2star > 0.0) || !(args.p > 0.0) || args.overhead < 0.0 {
        return Err(CliError::Validation(
            "optimize-tau requires t2star > 0, p > 0, overhead >= 0".into(),
        ));
    }
    let mut rows: Vec<(f64, f64)> = Vec::new(); // (t2star, overhead)
    match args.grid.first() {
        None => rows.push((args.t2star, args.overhead)),
        Some(text) => {
            let spec = GridSpec::parse(text).map_err(CliError::Usage)?;
            let points = spec.points(args.log).map_err(CliError::Usage)?;
            match spec.param.as_deref() {
                Some("t2star") => rows.extend(points.iter().map(|&v| (v, args.overhead))),
                Some("overhead") => rows.extend(points.iter().map(|&v| (args.t2star, v))),
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown sweep parameter `{}` (t2star|overhead)",
                        other.unwrap_or("")
                    )))
                }
            }
        }
    }
    let m = meta();
    write_meta(&m, out)?;
    let enh_col = if args.t2star_ref.is_some() {
        ",enhancement"
    } else {
        ""
    };
    writeln!(out, "t2star_s,p,overhead_s,tau_opt_s,relative_eta{enh_col}")?;
    for (t2, t_o) in rows {
        if !(t2 > 0.0) {
            return Err(CliError::Validation(format!("swept t2star {t2} must be > 0")));
        }
        let tau = optimal_tau(t2, args.p, t_o);
        let fig = relative_eta(tau, t2, args.p, t_o);
        match args.t2star_ref {
            Some(t_ref) => {
                let e = enhancement(t2, t_ref, t_o, args.p);
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    fmt_f64(t2),
                    fmt_f64(args.p),
                    fmt_f64(t_o),
                    fmt_f64(tau),
                    fmt_f64(fig),
                    fmt_f64(e)
                )?;
            }
            None => {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    fmt_f64(t2),
                    fmt_f64(args.p),
                    fmt_f64(t_o),
                    fmt_f64(tau),
                    fmt_f64(fig)
                )?;
            }
        }
    }
    Ok(())
}

fn optimize_pulses(args: &OptimizePulsesArgs, out: &mut Vec<u8>) -> Result<(), CliError> {
    if !(args.t2 > 0.0 && args.t_b > 0.0 && args.p > 0.0 && (0.0..1.0).contains(&args.s)) {
        return Err(CliError::Validation(
            "optimize-pulses requires t2 > 0, t_b > 0, p > 0, s in [0, 1)".into(),
        ));
    }
    let k_real = k_opt_real(args.t2, args.t_b, args.p, args.s);
    let k_best = k_opt(args.t2, args.t_b, args.p, args.s);
    let mut m = meta();
    m.extra.push(("k_opt_real".into(), fmt_f64(k_real)));
    m.extra.push(("k_opt".into(), k_best.to_string()));
    write_meta(&m, out)?;

    let mut params = ProtocolParams::ramsey(
        args.t_b / 2.0,
        0.0,
        0.0,
        args.contrast,
        args.n_avg,
        args.n_sensors,
    );
    params.protocol = Protocol::Cpmg;
    params.t_b_s = Some(args.t_b);
    params.p_exponent = args.p;

    match args.scan_max {
        None => {
            writeln!(out, "t2_s,t_b_s,p,s,k_opt_real,k_opt,eta_t_per_sqrt_hz")?;
            let eta = eta_multipulse(&params, args.t2, k_best, args.s)?.eta_t_per_sqrt_hz;
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                fmt_f64(args.t2),
                fmt_f64(args.t_b),
                fmt_f64(args.p),
                fmt_f64(args.s),
                fmt_f64(k_real),
                k_best,
                fmt_f64(eta)
            )?;
        }
        Some(k_max) => {
            if k_max < 1 {
                return Err(CliError::Usage("--scan-max must be at least 1".into()));
            }
            writeln!(out, "k,eta_t_per_sqrt_hz")?;
            for k in 1..=k_max {
                let eta = eta_multipulse(&params, args.t2, k, args.s)?.eta_t_per_sqrt_hz;
                writeln!(out, "{k},{}", fmt_f64(eta))?;
            }
        }
    }
    Ok(())
}

fn sweep_nitrogen(cli: &Cli, args: &SweepNitrogenArgs, out: &mut Vec<u8>) -> Result<(), CliError> {
    let loaded = require_sample(cli)?;
    let spec = GridSpec::parse(&args.grid).map_err(CliError::Usage)?;
    if let Some(name) = &spec.param {
        if name != "n-ppm" {
            return Err(CliError::Usage(format!(
                "sweep-nitrogen sweeps the nitrogen concentration; unexpected parameter `{name}`"
            )));
        }
    }
    let points = spec.points(args.log).map_err(CliError::Usage)?;
    let mut protocol = ProtocolParams::ramsey(1e-6, args.t_i, args.t_r, args.contrast, args.n_avg, 1.0);
    protocol.p_exponent = args.p;
    let sweep = nitrogen_sweep(&loaded.sample, &points, &protocol, args.nv0_as_nitrogen)?;

    let mut m = meta();
    m.defaults_applied = loaded
        .defaulted_fields
        .iter()
        .map(|s| s.to_string())
        .collect();
    m.extra
        .push(("kappa_per_s_ppm".into(), fmt_f64(sweep.kappa_per_s_ppm)));
    m.extra.push(("knee_ppm".into(), fmt_f64(sweep.knee_ppm)));
    write_meta(&m, out)?;
    writeln!(
        out,
        "n_total_ppm,t2star_s,tau_s,photons_per_measurement,eta_t_per_sqrt_hz"
    )?;
    for row in &sweep.rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(row.n_total_ppm),
            fmt_f64(row.t2star_s),
            fmt_f64(row.tau_s),
            fmt_f64(row.photons_per_measurement),
            fmt_f64(row.eta_t_per_sqrt_hz)
        )?;
    }
    Ok(())
}

fn thread_count(shots: u64) -> usize {
    let available = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let cap = std::env::var("NVSK_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(available);
    cap.min(available).min(shots.max(1) as usize)
}

fn simulate(cli: &Cli, args: &SimulateArgs, out: &mut Vec<u8>) -> Result<(), CliError> {
    if args.shots < 1 {
        return Err(CliError::Usage("--shots must be at least 1".into()));
    }
    let model =
        ReadoutModel::new(args.a, args.b).map_err(|e| CliError::Validation(e.to_string()))?;
    if let Some(t2) = args.t2star {
        if !(t2 > 0.0) {
            return Err(CliError::Validation("--t2star must be > 0".into()));
        }
        if args.p != 1.0 && args.p != 2.0 {
            return Err(CliError::Usage(
                "dephasing draws support --p 1 (Lorentzian) or --p 2 (Gaussian)".into(),
            ));
        }
    }
    let cfg = RamseyMeasurementConfig {
        b_sense_t: args.b_sense,
        tau_s: args.tau,
        vartheta: args.vartheta,
        model,
        dephasing: args.t2star.map(|t2| (t2, args.p)),
    };

    // Counter-based substreams make the counts independent of the
    // partitioning; threads only split the index range.
    let threads = thread_count(args.shots);
    let mut counts = vec![0u64; args.shots as usize];
    let chunk = args.shots.div_ceil(threads as u64).max(1) as usize;
    std::thread::scope(|scope| {
        for (t, slice) in counts.chunks_mut(chunk).enumerate() {
            let cfg = &cfg;
            let seed = cli.seed;
            let base = (t * chunk) as u64;
            scope.spawn(move || {
                for (i, c) in slice.iter_mut().enumerate() {
                    *c = simulate_ramsey_measurement(cfg, seed, base + i as u64);
                }
            });
        }
    });

    let mut m = meta();
    m.seed = Some(cli.seed);
    m.extra.push(("a".into(), fmt_f64(args.a)));
    m.extra.push(("b".into(), fmt_f64(args.b)));
    m.extra.push(("tau_s".into(), fmt_f64(args.tau)));
    m.extra.push(("vartheta".into(), fmt_f64(args.vartheta)));
    m.extra.push(("b_sense_t".into(), fmt_f64(args.b_sense)));
    if let Some(t2) = args.t2star {
        m.extra.push(("t2star_s".into(), fmt_f64(t2)));
        m.extra.push(("p".into(), fmt_f64(args.p)));
    }
    write_meta(&m, out)?;

    if args.summary {
        let n = counts.len() as f64;
        let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / n;
        let var = counts
            .iter()
            .map(|&c| (c as f64 - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0).max(1.0);
        let cal = EstimatorCalibration {
            a: args.a,
            b: args.b,
            tau_s: args.tau,
            vartheta: args.vartheta,
        };
        let raw = estimate_field(&counts, &cal).map_err(|e| CliError::Validation(e.to_string()))?;
        // The fringe slope shrinks by the FID envelope; de-bias when the
        // dephasing model is active.
        let correction = match args.t2star {
            Some(t2) => ((args.tau / t2).powf(args.p)).exp(),
            None => 1.0,
        };
        let estimate = raw * correction;
        let sigma_r = nvsk_core::noise::sigma_r(args.a, args.b)
            .map_err(|e| CliError::Validation(e.to_string()))?;
        let std_error =
            correction * sigma_r / (constants().gamma_e() * args.tau * n.sqrt());
        writeln!(out, "shots,mean_count,var_count,b_estimate_t,std_error_t")?;
        writeln!(
            out,
            "{},{},{},{},{}",
            counts.len(),
            fmt_f64(mean),
            fmt_f64(var),
            fmt_f64(estimate),
            fmt_f64(std_error)
        )?;
    } else {
        writeln!(out, "shot,count")?;
        for (i, c) in counts.iter().enumerate() {
            writeln!(out, "{i},{c}")?;
        }
    }
    Ok(())
}

fn anneal(args: &AnnealArgs, out: &mut Vec<u8>) -> Result<(), CliError> {
    let temp_k = args.temp_c + 273.15;
    if !(temp_k > 0.0) || args.hours < 0.0 {
        return Err(CliError::Validation(
            "anneal requires temperature above 0 K and a non-negative duration".into(),
        ));
    }
    let d0 = args.d0.unwrap_or(DEFAULT_D0_M2S);
    let ea = args.ea.unwrap_or(DEFAULT_EA_EV);
    let duration = args.hours * 3600.0;
    let r = vacancy_diffusion(temp_k, duration, d0, ea);
    let mut m = meta();
    if args.d0.is_none() {
        m.defaults_applied.push(format!("d0_m2s={}", fmt_f64(DEFAULT_D0_M2S)));
    }
    if args.ea.is_none() {
        m.defaults_applied.push(format!("ea_ev={}", fmt_f64(DEFAULT_EA_EV)));
    }
    write_meta(&m, out)?;
    writeln!(
        out,
        "temp_k,duration_s,d_m2s,r_rms_m,d_min_m2s,d_max_m2s,r_rms_min_m,r_rms_max_m"
    )?;
    writeln!(
        out,
        "{},{},{},{},{},{},{},{}",
        fmt_f64(temp_k),
        fmt_f64(duration),
        fmt_f64(r.d_m2s),
        fmt_f64(r.r_rms_m),
        fmt_f64(r.d_band_m2s.0),
        fmt_f64(r.d_band_m2s.1),
        fmt_f64(r.r_rms_band_m.0),
        fmt_f64(r.r_rms_band_m.1)
    )?;
    Ok(())
}

fn irradiate(args: &IrradiateArgs, out: &mut Vec<u8>) -> Result<(), CliError> {
    if !(args.n_ppm > 0.0) {
        return Err(CliError::Validation("--n-ppm must be > 0".into()));
    }
    let vac_yield = args.vac_yield.unwrap_or(DEFAULT_VACANCY_YIELD_PER_E_PER_UM);
    let recombination = args.recombination.unwrap_or(DEFAULT_RECOMBINATION_FRACTION);
    let nitrogens = args.nitrogens_per_nv.unwrap_or(DEFAULT_NITROGENS_PER_NV);
    if !(0.0..1.0).contains(&recombination) {
        return Err(CliError::Validation(
            "--recombination must be in [0, 1)".into(),
        ));
    }
    let dose = irradiation_dose(args.n_ppm, vac_yield, recombination, nitrogens);
    let mut m = meta();
    if args.vac_yield.is_none() {
        m.defaults_applied
            .push(format!("yield={}", fmt_f64(DEFAULT_VACANCY_YIELD_PER_E_PER_UM)));
    }
    if args.recombination.is_none() {
        m.defaults_applied
            .push(format!("recombination={}", fmt_f64(DEFAULT_RECOMBINATION_FRACTION)));
    }
    if args.nitrogens_per_nv.is_none() {
        m.defaults_applied
            .push(format!("nitrogens_per_nv={}", fmt_f64(DEFAULT_NITROGENS_PER_NV)));
    }
    write_meta(&m, out)?;
    writeln!(out, "n_total_ppm,dose_e_per_cm2")?;
    writeln!(out, "{},{}", fmt_f64(args.n_ppm), fmt_f64(dose))?;
    Ok(())
}

fn write_meta(m: &CsvMetadata, out: &mut Vec<u8>) -> Result<(), CliError> {
    writeln!(out, "# tool_version: {}", m.tool_version)?;
    if let Some(seed) = m.seed {
        writeln!(out, "# seed: {seed}")?;
    }
    if !m.defaults_applied.is_empty() {
        writeln!(out, "# defaults_applied: {}", m.defaults_applied.join(" "))?;
    }
    for (k, v) in &m.extra {
        writeln!(out, "# {k}: {v}")?;
    }
    Ok(())
}
