//! Command-line front end: sweeps, profiles and validation reports.

mod validate;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::diffusion_limit::{diffusive_profile, diffusive_shock_set};
use crate::error::Error;
use crate::kinetics::{critical_ratio, kinetic_function, shock_set, threshold_curve, KineticSample};
use crate::model::{entropy_dissipation, equilibria, FluxModel};
use crate::output::{io_error, num};
use crate::phaseplane::{dispersive_trajectory, profile_from_curve, saddle_connection, Profile, TrajectoryCurve};

pub use validate::{validation_checks, Check};

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Exit status for a failed operation or validation check.
pub const EXIT_FAILURE: i32 = 1;
/// Exit status for an unusable command line, model or grid.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "kinetic", version, about = "Kinetic functions and traveling waves for scalar conservation laws")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Model document (JSON); the unit cubic when omitted.
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Tolerance on critical ratios, relative to `min(1, u0 − u2)`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Kinetic function over a grid of left states and ratios.
    KineticTable {
        #[arg(long, allow_hyphen_values = true)]
        u0: String,
        #[arg(long)]
        alpha: String,
    },
    /// Threshold ratio over a grid of left states, with the slope at zero.
    ThresholdCurve {
        #[arg(long, allow_hyphen_values = true)]
        u0: String,
    },
    /// Phase-plane curve and profile of one traveling wave.
    Trajectory {
        #[arg(long, allow_hyphen_values = true)]
        u0: f64,
        /// Right state.
        #[arg(long, allow_hyphen_values = true)]
        u2: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        /// Zero-diffusion wave from `u0` to `φ0(u0)`.
        #[arg(long, conflicts_with_all = ["diffusive", "u2", "lambda", "alpha"])]
        dispersive: bool,
        /// Zero-dispersion wave from `u0` to `u2`.
        #[arg(long, requires = "u2", conflicts_with_all = ["lambda", "alpha"])]
        diffusive: bool,
        /// File for the `(u, v)` curve.
        #[arg(long)]
        curve_out: Option<PathBuf>,
        /// Number of evenly spaced profile rows instead of the raw samples.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Admissible right states for each left state.
    ShockSet {
        #[arg(long, allow_hyphen_values = true)]
        u0: String,
        #[arg(long, required_unless_present = "diffusive")]
        alpha: Option<f64>,
        /// Limit of vanishing dispersion instead.
        #[arg(long, conflicts_with = "alpha")]
        diffusive: bool,
    },
    /// Entropy dissipation of nonclassical shocks or of given jumps.
    Entropy {
        #[arg(long, allow_hyphen_values = true)]
        u0: String,
        #[arg(long, required_unless_present = "u2")]
        alpha: Option<String>,
        #[arg(long, allow_hyphen_values = true, conflicts_with = "alpha")]
        u2: Option<f64>,
    },
    /// Oracle and invariant checks on the model, as a JSON report.
    Validate,
}

/// Failure of a command, reported as JSON on standard error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    #[serde(skip)]
    pub status: i32,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            status: EXIT_USAGE,
            kind: "usage",
            message: message.into(),
        }
    }

    fn check_failed(message: impl Into<String>) -> Self {
        Self {
            status: EXIT_FAILURE,
            kind: "check-failed",
            message: message.into(),
        }
    }

    /// Errors raised while checking the configuration are usage errors.
    fn config(e: Error) -> Self {
        Self {
            status: EXIT_USAGE,
            ..Self::from(e)
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain strings serialize")
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self {
            status: EXIT_FAILURE,
            kind: error_kind(&e),
            message: e.to_string(),
        }
    }
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Domain { .. } => "domain",
        Error::InvalidModel(_) => "invalid-model",
        Error::InvalidArgument(_) => "invalid-argument",
        Error::NoBracket { .. } => "no-bracket",
        Error::RootNotConverged { .. } => "root-not-converged",
        Error::Quadrature { .. } => "quadrature",
        Error::SpeedOutOfRange { .. } => "speed-out-of-range",
        Error::NotEquilibrium { .. } => "not-equilibrium",
        Error::Integration { .. } => "integration",
        Error::PrematureAxisCrossing { .. } => "premature-axis-crossing",
        Error::OutsideBand { .. } => "outside-band",
        Error::BracketExpansion { .. } => "bracket-expansion",
        Error::NonMonotoneExtrapolation { .. } => "non-monotone-extrapolation",
        Error::FluxClass(_) => "flux-class",
        Error::NoConnection { .. } => "no-connection",
        Error::NegativePotential { .. } => "negative-potential",
        Error::ProfileBlowUp { .. } => "profile-blow-up",
    }
}

type CliResult<T = ()> = std::result::Result<T, CliError>;

/// Parses a grid given as `start:stop:count`, a comma-separated list or a
/// single number.
pub fn parse_range(text: &str) -> std::result::Result<Vec<f64>, String> {
    let number = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| format!("`{s}` is not a finite number"))
    };
    let parts: Vec<&str> = text.split(':').collect();
    let values = match parts.as_slice() {
        [start, stop, count] => {
            let (a, b) = (number(start)?, number(stop)?);
            let n: usize = count.trim().parse().map_err(|_| format!("`{count}` is not a count"))?;
            match n {
                0 => Vec::new(),
                1 => vec![a],
                _ => (0..n)
                    .map(|i| if i == n - 1 { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
                    .collect(),
            }
        }
        [list] if list.trim().is_empty() => Vec::new(),
        [list] => list.split(',').map(number).collect::<std::result::Result<_, _>>()?,
        _ => return Err(format!("`{text}` is neither start:stop:count nor a list")),
    };
    if values.is_empty() {
        return Err(format!("grid `{text}` is empty"));
    }
    Ok(values)
}

/// Validated model, grids and output target of one invocation.
#[derive(Clone)]
pub struct RunConfig {
    pub model: FluxModel,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_common(common: &Common) -> CliResult<Self> {
        let mut model = match &common.model {
            Some(path) => FluxModel::from_json_path(path).map_err(CliError::config)?,
            None => FluxModel::cubic(),
        };
        if let Some(tol) = common.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(CliError::usage(format!("--tol must be positive, got {tol}")));
            }
            let settings = crate::model::Settings {
                alpha_tol: tol,
                ..*model.settings()
            };
            model = model.with_settings(settings);
        }
        Ok(Self {
            model,
            out: common.out.clone(),
        })
    }

    fn grid(&self, flag: &str, text: &str) -> CliResult<Vec<f64>> {
        parse_range(text).map_err(|e| CliError::usage(format!("--{flag}: {e}")))
    }

    fn states(&self, flag: &str, text: &str) -> CliResult<Vec<f64>> {
        let values = self.grid(flag, text)?;
        for &u in &values {
            self.state(u)?;
        }
        Ok(values)
    }

    fn state(&self, u: f64) -> CliResult {
        self.model.check_state(u).map_err(CliError::config)
    }

    fn ratios(&self, text: &str) -> CliResult<Vec<f64>> {
        let values = self.grid("alpha", text)?;
        values.iter().try_for_each(|&a| ratio(a))?;
        Ok(values)
    }

    fn write(&self, body: impl FnOnce(&mut dyn Write) -> crate::Result<()>) -> CliResult {
        write_to(self.out.as_deref(), body)
    }
}

fn ratio(alpha: f64) -> CliResult {
    if alpha >= 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(CliError::usage(format!("--alpha must be finite and non-negative, got {alpha}")))
    }
}

fn write_to(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> crate::Result<()>) -> CliResult {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::from(io_error(format!("{}: {e}", p.display()))))?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush().map_err(|e| CliError::from(io_error(e)))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w)?;
            w.flush().map_err(|e| CliError::from(io_error(e)))
        }
    }
}

fn csv_writer(out: &mut dyn Write) -> csv::Writer<&mut dyn Write> {
    csv::WriterBuilder::new().flexible(true).from_writer(out)
}

fn json_line(out: &mut dyn Write, value: &impl Serialize) -> crate::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(io_error)?;
    writeln!(out).map_err(io_error)
}

/// Runs a parsed command and returns the exit status.
pub fn execute(cli: &Cli) -> CliResult<i32> {
    let config = RunConfig::from_common(&cli.common)?;
    match &cli.command {
        Command::KineticTable { u0, alpha } => {
            let states = config.states("u0", u0)?;
            let alphas = config.ratios(alpha)?;
            cmd_kinetic_table(&config, &states, &alphas)?;
        }
        Command::ThresholdCurve { u0 } => {
            let states = config.states("u0", u0)?;
            cmd_threshold_curve(&config, &states)?;
        }
        Command::Trajectory {
            u0,
            u2,
            lambda,
            alpha,
            dispersive,
            diffusive,
            curve_out,
            grid,
        } => {
            config.state(*u0)?;
            if let Some(u2) = u2 {
                config.state(*u2)?;
            }
            if let Some(a) = alpha {
                ratio(*a)?;
            }
            if grid.is_some_and(|n| n < 2) {
                return Err(CliError::usage("--grid needs at least two rows"));
            }
            let request = if *dispersive {
                WaveRequest::Dispersive
            } else if *diffusive {
                if curve_out.is_some() {
                    return Err(CliError::usage("--curve-out is not available for diffusive waves"));
                }
                WaveRequest::Diffusive { u_plus: u2.expect("required by clap") }
            } else {
                match (u2, lambda, alpha) {
                    (Some(u2), None, a) => WaveRequest::States { u2: *u2, alpha: *a },
                    (None, Some(lam), Some(a)) => WaveRequest::Speed { lam: *lam, alpha: *a },
                    (None, None, Some(a)) => WaveRequest::Ratio { alpha: *a },
                    _ => {
                        return Err(CliError::usage(
                            "trajectory needs --u2, --lambda with --alpha, --alpha, --dispersive or --diffusive",
                        ))
                    }
                }
            };
            cmd_trajectory(&config, *u0, request, curve_out.as_deref(), *grid)?;
        }
        Command::ShockSet { u0, alpha, diffusive } => {
            let states = config.states("u0", u0)?;
            if let Some(a) = alpha {
                ratio(*a)?;
            }
            let alpha = if *diffusive { None } else { *alpha };
            cmd_shock_set(&config, &states, alpha)?;
        }
        Command::Entropy { u0, alpha, u2 } => {
            let states = config.states("u0", u0)?;
            match (alpha, u2) {
                (Some(a), _) => {
                    let alphas = config.ratios(a)?;
                    cmd_entropy_nonclassical(&config, &states, &alphas)?;
                }
                (None, Some(u2)) => {
                    config.state(*u2)?;
                    cmd_entropy_jump(&config, &states, *u2)?;
                }
                (None, None) => return Err(CliError::usage("entropy needs --alpha or --u2")),
            }
        }
        Command::Validate => return cmd_validate(&config),
    }
    Ok(EXIT_OK)
}

/// Parses `args`, runs the command and reports errors on standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return EXIT_OK;
            }
            let message = e.render().to_string();
            eprintln!("{}", CliError::usage(message.trim_end()).to_json());
            return EXIT_USAGE;
        }
    };
    match execute(&cli) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.status
        }
    }
}

pub fn cmd_kinetic_table(config: &RunConfig, states: &[f64], alphas: &[f64]) -> CliResult {
    let points: Vec<(f64, f64)> = states
        .iter()
        .flat_map(|&u| alphas.iter().map(move |&a| (u, a)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(u, a)| kinetic_function(&config.model, u, a))
        .collect::<crate::Result<Vec<KineticSample>>>()?;
    config.write(|out| {
        let mut w = csv_writer(out);
        w.write_record(["u0", "alpha", "phi_flat", "phi_sharp", "lambda", "regime"])
            .map_err(io_error)?;
        for s in &rows {
            let nums = [s.u0, s.alpha, s.phi_flat, s.phi_sharp, s.lam].map(num);
            w.write_record(nums.iter().map(String::as_str).chain([s.regime.as_str()]))
                .map_err(io_error)?;
        }
        w.flush().map_err(io_error)
    })
}

pub fn cmd_threshold_curve(config: &RunConfig, states: &[f64]) -> CliResult {
    let curve = threshold_curve(&config.model, states)?;
    config.write(|out| {
        let mut w = csv_writer(out);
        w.write_record(["u0", "alpha_natural"]).map_err(io_error)?;
        for &(u, a) in &curve.samples {
            w.write_record([num(u), num(a)]).map_err(io_error)?;
        }
        w.write_record(["kappa".to_string(), num(curve.kappa)]).map_err(io_error)?;
        if let Some(s) = curve.fitted_slope {
            w.write_record(["fitted_slope".to_string(), num(s)]).map_err(io_error)?;
        }
        w.flush().map_err(io_error)
    })
}

/// Which wave `trajectory` traces from the left state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WaveRequest {
    /// Nonclassical wave to `u2`, at its critical ratio unless `alpha` is given.
    States { u2: f64, alpha: Option<f64> },
    /// Nonclassical wave at speed `lam`, which must be the connecting speed for `alpha`.
    Speed { lam: f64, alpha: f64 },
    /// Nonclassical wave to the kinetic value at `alpha`.
    Ratio { alpha: f64 },
    Dispersive,
    Diffusive { u_plus: f64 },
}

fn connecting_curve(model: &FluxModel, u0: f64, request: WaveRequest) -> crate::Result<TrajectoryCurve> {
    let with_ratio = |u2: f64, alpha: Option<f64>| {
        let critical = critical_ratio(model, u0, u2)?;
        if let Some(a) = alpha {
            if (a - critical).abs() > 1e-6 * critical.max(1.0) {
                return Err(Error::NoConnection {
                    u_minus: u0,
                    u_plus: u2,
                    reason: format!("the ratio {a} differs from the critical ratio {critical}"),
                });
            }
        }
        saddle_connection(model, u0, u2, alpha.unwrap_or(critical))
    };
    match request {
        WaveRequest::States { u2, alpha } => with_ratio(u2, alpha),
        WaveRequest::Speed { lam, alpha } => with_ratio(equilibria(model, u0, lam)?.u2, Some(alpha)),
        WaveRequest::Ratio { alpha } => {
            let s = kinetic_function(model, u0, alpha)?;
            if s.regime != crate::kinetics::Regime::Nonclassical {
                return Err(Error::NoConnection {
                    u_minus: u0,
                    u_plus: s.phi_flat,
                    reason: format!("the ratio {alpha} is at or above the threshold, so the shock is classical"),
                });
            }
            saddle_connection(model, u0, s.phi_flat, alpha)
        }
        WaveRequest::Dispersive => dispersive_trajectory(model, u0),
        WaveRequest::Diffusive { .. } => unreachable!("diffusive waves have no dispersive curve"),
    }
}

fn resample(samples: &[(f64, f64)], eval: impl Fn(f64) -> Option<f64>, n: usize) -> Vec<(f64, f64)> {
    let (a, b) = (samples[0].0, samples[samples.len() - 1].0);
    (0..n)
        .map(|i| {
            let y = if i == n - 1 { b } else { a + (b - a) * i as f64 / (n - 1) as f64 };
            (y, eval(y).unwrap_or(samples[samples.len() - 1].1))
        })
        .collect()
}

pub fn cmd_trajectory(
    config: &RunConfig,
    u0: f64,
    request: WaveRequest,
    curve_out: Option<&Path>,
    grid: Option<usize>,
) -> CliResult {
    let model = &config.model;
    let profile = if let WaveRequest::Diffusive { u_plus } = request {
        diffusive_profile(model, u0, u_plus)?.samples
    } else {
        let curve = connecting_curve(model, u0, request)?;
        if let Some(path) = curve_out {
            write_to(Some(path), |out| curve.write_csv(out))?;
        }
        profile_from_curve(model, &curve)?.samples
    };
    let samples = match grid {
        Some(n) => {
            let p = Profile { samples: profile };
            resample(&p.samples, |y| p.eval(y), n)
        }
        None => profile,
    };
    config.write(|out| Profile { samples }.write_csv(out))
}

#[derive(Serialize)]
struct ShockSetRow<T> {
    u_minus: f64,
    alpha: Option<f64>,
    set: T,
}

pub fn cmd_shock_set(config: &RunConfig, states: &[f64], alpha: Option<f64>) -> CliResult {
    let model = &config.model;
    match alpha {
        Some(a) => {
            let rows = states
                .par_iter()
                .map(|&u| {
                    Ok(ShockSetRow {
                        u_minus: u,
                        alpha: Some(a),
                        set: shock_set(model, u, a)?,
                    })
                })
                .collect::<crate::Result<Vec<_>>>()?;
            config.write(|out| json_line(out, &rows))
        }
        None => {
            let rows = states
                .par_iter()
                .map(|&u| {
                    Ok(ShockSetRow {
                        u_minus: u,
                        alpha: None,
                        set: diffusive_shock_set(model, u)?.pieces,
                    })
                })
                .collect::<crate::Result<Vec<_>>>()?;
            config.write(|out| json_line(out, &rows))
        }
    }
}

pub fn cmd_entropy_nonclassical(config: &RunConfig, states: &[f64], alphas: &[f64]) -> CliResult {
    let model = &config.model;
    let points: Vec<(f64, f64)> = states
        .iter()
        .flat_map(|&u| alphas.iter().map(move |&a| (u, a)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(u, a)| {
            let phi = kinetic_function(model, u, a)?.phi_flat;
            Ok([u, a, phi, entropy_dissipation(model, u, phi)?])
        })
        .collect::<crate::Result<Vec<_>>>()?;
    config.write(|out| crate::output::write_table(out, &["u_minus", "alpha", "u_plus", "dissipation"], rows))
}

pub fn cmd_entropy_jump(config: &RunConfig, states: &[f64], u_plus: f64) -> CliResult {
    let rows = states
        .iter()
        .map(|&u| Ok([u, u_plus, entropy_dissipation(&config.model, u, u_plus)?]))
        .collect::<crate::Result<Vec<_>>>()?;
    config.write(|out| crate::output::write_table(out, &["u_minus", "u_plus", "dissipation"], rows))
}

#[derive(Serialize)]
struct Report<'a> {
    passed: bool,
    checks: &'a [Check],
}

pub fn cmd_validate(config: &RunConfig) -> CliResult<i32> {
    let checks = validation_checks(&config.model)?;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    config.write(|out| {
        json_line(
            out,
            &Report {
                passed: failed.is_empty(),
                checks: &checks,
            },
        )
    })?;
    if failed.is_empty() {
        Ok(EXIT_OK)
    } else {
        Err(CliError::check_failed(format!("{} checks failed: {}", failed.len(), failed.join(", "))))
    }
}
