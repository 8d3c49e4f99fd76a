//! `kicked-top` command-line frontend.
//!
//! Every subcommand that produces data writes one headered CSV file under
//! `--out` plus a `<file>.manifest.json` with the resolved parameters and a
//! SHA-256 digest of the file. Parameters resolve as flag > config file >
//! built-in default.

pub mod config;
pub mod output;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use thiserror::Error;

use crate::classical::{lyapunov_exponent, phase_portrait};
use crate::floquet::{evolve_record, FloquetOperator, KickOrder};
use crate::observables::{self, fit_growth_exponent, TimeAverage, TimeSeries};
use crate::scan::{lyapunov_sweep, Execution, GridSpec, Observable, PowerNormalization, Scanner};
use crate::spin::{CoherentParams, SpinSystem};
use crate::{Error, DEFAULT_KICKS, DEFAULT_KICK_STRENGTH};

use config::Config;
use output::{write_with_manifest, Cell, RunManifest, Table};

/// Environment variable holding the default worker-thread count.
pub const THREADS_ENV: &str = "KICKED_TOP_THREADS";

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

const DEFAULT_PARTICLES: usize = 160;
const DEFAULT_GRID: &str = "15x15";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numerical(Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },
}

impl CliError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_owned(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io { .. } | CliError::Format { .. } => EXIT_IO,
        }
    }
}

fn flag_for(param: &str) -> &str {
    match param {
        "N" => "n",
        "kick_strength" => "v",
        "theta_range" | "phi_range" => "grid",
        "steps" | "transient" => "steps",
        other => other,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { name, reason } => {
                CliError::Usage(format!("invalid value for --{}: {reason}", flag_for(name)))
            }
            e => CliError::Numerical(e),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "kicked-top", version, about = "Kicked two-site Bose-Hubbard / kicked top simulations")]
pub struct Cli {
    /// Directory that receives data files and manifests.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// key=value file supplying defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for grid scans; 1 runs serially.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-kick F, η and spin expectations for one coherent state.
    Evolve(EvolveArgs),
    /// Log-log power-law fit of a column of a table.
    Fit(FitArgs),
    /// Classical phase portrait from seeded initial conditions.
    Portrait(PortraitArgs),
    /// Time-averaged F̄ or η̄/D over a (θ, φ) grid.
    Scan(ScanArgs),
    /// Fluctuation power versus κ.
    Power(PowerArgs),
    /// Classical Lyapunov exponent versus κ.
    Lyapunov(LyapunovArgs),
}

#[derive(Debug, Args)]
pub struct QuantumArgs {
    /// Particle number N.
    #[arg(long)]
    pub n: Option<usize>,
    /// Kick strength V.
    #[arg(long)]
    pub v: Option<f64>,
    /// Number of kicks.
    #[arg(long)]
    pub kicks: Option<usize>,
    /// Factor ordering: rotate-then-twist or twist-then-rotate.
    #[arg(long)]
    pub order: Option<String>,
    /// Include kick 0 in long-time averages.
    #[arg(long)]
    pub include_initial: bool,
}

#[derive(Debug, Args)]
pub struct KappaRange {
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa_max: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub q: QuantumArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Output file name inside --out.
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Table written by `evolve`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "F")]
    pub column: String,
    /// First and last kick of the window.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    pub window: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct PortraitArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub trajectories: Option<usize>,
    #[arg(long)]
    pub kicks: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub q: QuantumArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    /// Grid as THETAxPHI cell counts, e.g. 15x15.
    #[arg(long)]
    pub grid: Option<String>,
    /// fbar or pr.
    #[arg(long)]
    pub observable: Option<String>,
    /// Fix θ and scan φ only (the grid's θ count must be 1).
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    #[command(flatten)]
    pub q: QuantumArgs,
    #[command(flatten)]
    pub range: KappaRange,
    #[arg(long)]
    pub grid: Option<String>,
    /// coordinate-area, haar-mean or integral.
    #[arg(long)]
    pub normalization: Option<String>,
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Args)]
pub struct LyapunovArgs {
    #[command(flatten)]
    pub range: KappaRange,
    #[arg(long)]
    pub grid: Option<String>,
    /// Map iterations per trajectory.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Leading iterations excluded from the average.
    #[arg(long)]
    pub transient: Option<usize>,
    /// Single trajectory instead of a grid average (needs --phi too).
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    #[arg(long)]
    pub name: Option<String>,
}

pub fn parse_grid(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("invalid value for --grid: `{s}` (expected RxC, e.g. 15x15)"));
    let (r, c) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
    let r: usize = r.trim().parse().map_err(|_| bad())?;
    let c: usize = c.trim().parse().map_err(|_| bad())?;
    if r == 0 || c == 0 {
        return Err(CliError::Usage(format!("invalid value for --grid: `{s}` has no cells")));
    }
    Ok((r, c))
}

pub fn parse_order(s: &str) -> Result<KickOrder, CliError> {
    match s {
        "rotate-then-twist" => Ok(KickOrder::RotateThenTwist),
        "twist-then-rotate" => Ok(KickOrder::TwistThenRotate),
        _ => Err(CliError::Usage(format!("invalid value for --order: `{s}` (rotate-then-twist | twist-then-rotate)"))),
    }
}

pub fn parse_normalization(s: &str) -> Result<PowerNormalization, CliError> {
    match s {
        "coordinate-area" => Ok(PowerNormalization::CoordinateArea),
        "haar-mean" => Ok(PowerNormalization::HaarMean),
        "integral" => Ok(PowerNormalization::Integral),
        _ => Err(CliError::Usage(format!(
            "invalid value for --normalization: `{s}` (coordinate-area | haar-mean | integral)"
        ))),
    }
}

/// `kappa_min, kappa_min + step, ...` up to `kappa_max` inclusive.
pub fn kappa_values(min: f64, max: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(CliError::Usage(format!("invalid value for --step: {step} must be positive")));
    }
    if !(min.is_finite() && max.is_finite()) || min > max {
        return Err(CliError::Usage(format!("invalid value for --kappa-max: empty κ range [{min}, {max}]")));
    }
    if min < 0.0 {
        return Err(CliError::Usage(format!("invalid value for --kappa-min: {min} is negative")));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| min + i as f64 * step).collect())
}

struct Context {
    config: Config,
    out: PathBuf,
    execution: Execution,
    arguments: Vec<String>,
    started: Instant,
}

impl Context {
    fn manifest(&self, command: &str, parameters: BTreeMap<String, serde_json::Value>) -> RunManifest {
        RunManifest {
            command: command.to_owned(),
            arguments: self.arguments.clone(),
            parameters,
            version: env!("CARGO_PKG_VERSION").to_owned(),
            wall_time_seconds: self.started.elapsed().as_secs_f64(),
            output: output::OutputDigest { file: String::new(), sha256: String::new(), rows: 0 },
            summary: BTreeMap::new(),
        }
    }

    fn path(&self, name: &Option<String>, key: &str, default: &str) -> Result<PathBuf, CliError> {
        let name = self.config.or(name.clone(), &format!("{key}-name"), default.to_owned())?;
        Ok(self.out.join(name))
    }

    fn quantum(&self, q: &QuantumArgs) -> Result<QuantumSettings, CliError> {
        let order = match self.config.pick(q.order.clone(), "order")? {
            Some(s) => parse_order(&s)?,
            None => KickOrder::default(),
        };
        let include = q.include_initial || self.config.or(None, "include-initial", false)?;
        Ok(QuantumSettings {
            particles: self.config.or(q.n, "n", DEFAULT_PARTICLES)?,
            kick_strength: self.config.or(q.v, "v", DEFAULT_KICK_STRENGTH)?,
            kicks: self.config.or(q.kicks, "kicks", DEFAULT_KICKS)?,
            order,
            average: if include { TimeAverage::IncludeInitial } else { TimeAverage::ExcludeInitial },
        })
    }

    fn kappas(&self, r: &KappaRange) -> Result<Vec<f64>, CliError> {
        let min = self.config.pick(r.kappa_min, "kappa-min")?;
        let max = self.config.pick(r.kappa_max, "kappa-max")?;
        if let (Some(min), Some(max)) = (min, max) {
            let step = self.config.or(r.step, "step", 0.25)?;
            return kappa_values(min, max, step);
        }
        if min.is_some() || max.is_some() {
            return Err(CliError::Usage("--kappa-min and --kappa-max must be given together".into()));
        }
        let kappa = self.config.required(r.kappa, "kappa")?;
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(CliError::Usage(format!("invalid value for --kappa: {kappa} is negative")));
        }
        Ok(vec![kappa])
    }

    fn grid(&self, flag: &Option<String>) -> Result<(usize, usize), CliError> {
        parse_grid(&self.config.or(flag.clone(), "grid", DEFAULT_GRID.to_owned())?)
    }
}

struct QuantumSettings {
    particles: usize,
    kick_strength: f64,
    kicks: usize,
    order: KickOrder,
    average: TimeAverage,
}

impl QuantumSettings {
    fn record(&self, p: &mut BTreeMap<String, serde_json::Value>) {
        p.insert("n".into(), json!(self.particles));
        p.insert("v".into(), json!(self.kick_strength));
        p.insert("kicks".into(), json!(self.kicks));
        p.insert("order".into(), json!(self.order));
        p.insert("average".into(), json!(self.average));
    }

    fn scanner(&self, execution: Execution) -> Result<Scanner, CliError> {
        let mut s = Scanner::new(self.particles)?.with_execution(execution);
        s.kick_strength = self.kick_strength;
        s.order = self.order;
        s.average = self.average;
        Ok(s)
    }
}

fn cmd_evolve(ctx: &Context, a: &EvolveArgs) -> Result<(), CliError> {
    let q = ctx.quantum(&a.q)?;
    let kappa = ctx.config.required(a.kappa, "kappa")?;
    let theta = ctx.config.required(a.theta, "theta")?;
    let phi = ctx.config.required(a.phi, "phi")?;
    let initial = CoherentParams::new(theta, phi)?;
    let sys = SpinSystem::new(q.particles)?;
    let spectrum = crate::floquet::RotationSpectrum::new(&sys)?;
    let op = FloquetOperator::with_spectrum(&sys, &spectrum, kappa, q.kick_strength, q.order)?;
    let record = evolve_record(&op, &sys, initial, q.kicks)?;

    let rows: Vec<Vec<Cell>> = record
        .samples
        .iter()
        .map(|s| {
            vec![
                Cell::Int(s.kick as u64),
                Cell::Real(s.fluctuation),
                Cell::Real(s.participation),
                Cell::Real(s.x),
                Cell::Real(s.y),
                Cell::Real(s.z),
            ]
        })
        .collect();
    let mut params = BTreeMap::new();
    q.record(&mut params);
    params.insert("kappa".into(), json!(kappa));
    params.insert("theta".into(), json!(theta));
    params.insert("phi".into(), json!(phi));
    let mut manifest = ctx.manifest("evolve", params);
    let fbar = observables::long_time_average(&record.fluctuation_series(), q.kicks, q.average)?;
    let eta = observables::long_time_average(&record.participation_series(), q.kicks, q.average)?;
    manifest.summary.insert("fbar".into(), fbar);
    manifest.summary.insert("eta_bar_over_dim".into(), eta / sys.dim() as f64);
    let path = ctx.path(&a.name, "evolve", "evolve.csv")?;
    write_with_manifest(&path, &["n", "F", "eta", "jx", "jy", "jz"], &rows, manifest)?;
    println!("{}: fbar={}", path.display(), output::format_real(fbar));
    Ok(())
}

fn cmd_fit(ctx: &Context, a: &FitArgs) -> Result<(), CliError> {
    let (lo, hi) = match &a.window {
        Some(w) => (w[0], w[1]),
        None => match ctx.config.raw("window") {
            Some(s) => {
                let parts: Vec<usize> = s
                    .split_whitespace()
                    .map(|p| p.parse().map_err(|_| CliError::Usage(format!("invalid value for --window: `{s}`"))))
                    .collect::<Result<_, _>>()?;
                match parts[..] {
                    [lo, hi] => (lo, hi),
                    _ => return Err(CliError::Usage(format!("invalid value for --window: `{s}`"))),
                }
            }
            None => (10, 100),
        },
    };
    let table = Table::read(&a.input)?;
    let values = table
        .column(&a.column)
        .ok_or_else(|| CliError::Usage(format!("invalid value for --column: no column `{}`", a.column)))?;
    let start = table.column("n").and_then(|n| n.first().copied()).unwrap_or(0.0) as usize;
    let ts = TimeSeries::new(a.column.clone(), start, values)?;
    let fit = fit_growth_exponent(&ts, lo, hi).map_err(|e| match e {
        Error::InvalidParameter { reason, .. } => CliError::Usage(format!("invalid value for --window: {reason}")),
        Error::SeriesTooShort { .. } => CliError::Usage(format!("invalid value for --window: {e}")),
        e => CliError::Numerical(e),
    })?;
    println!(
        "exponent={} r_squared={} prefactor={} window={lo}..{hi}",
        output::format_real(fit.exponent),
        output::format_real(fit.r_squared),
        output::format_real(fit.prefactor)
    );
    Ok(())
}

fn cmd_portrait(ctx: &Context, a: &PortraitArgs) -> Result<(), CliError> {
    let kappa = ctx.config.required(a.kappa, "kappa")?;
    let trajectories = ctx.config.or(a.trajectories, "trajectories", 157)?;
    let kicks = ctx.config.or(a.kicks, "kicks", 300)?;
    let seed = ctx.config.or(a.seed, "seed", 1)?;
    let points = phase_portrait(kappa, trajectories, kicks, seed)?;
    let rows: Vec<Vec<Cell>> = points
        .iter()
        .map(|p| vec![Cell::Int(p.trajectory as u64), Cell::Int(p.kick as u64), Cell::Real(p.theta), Cell::Real(p.phi)])
        .collect();
    let mut params = BTreeMap::new();
    params.insert("kappa".into(), json!(kappa));
    params.insert("trajectories".into(), json!(trajectories));
    params.insert("kicks".into(), json!(kicks));
    params.insert("seed".into(), json!(seed));
    let path = ctx.path(&a.name, "portrait", "portrait.csv")?;
    write_with_manifest(&path, &["trajectory_id", "kick", "theta", "phi"], &rows, ctx.manifest("portrait", params))?;
    println!("{}: {} points", path.display(), rows.len());
    Ok(())
}

fn cmd_scan(ctx: &Context, a: &ScanArgs) -> Result<(), CliError> {
    let q = ctx.quantum(&a.q)?;
    let kappa = ctx.config.required(a.kappa, "kappa")?;
    let (n_theta, n_phi) = ctx.grid(&a.grid)?;
    let observable = match ctx.config.or(a.observable.clone(), "observable", "fbar".to_owned())?.as_str() {
        "fbar" => Observable::FluctuationMean,
        "pr" => Observable::ParticipationMean,
        other => return Err(CliError::Usage(format!("invalid value for --observable: `{other}` (fbar | pr)"))),
    };
    let grid = match a.theta {
        Some(theta) => {
            if n_theta != 1 {
                return Err(CliError::Usage("invalid value for --grid: a --theta slice needs 1xC".into()));
            }
            GridSpec::phi_slice(theta, n_phi)?
        }
        None => GridSpec::new(n_theta, n_phi)?,
    };
    let scanner = q.scanner(ctx.execution)?;
    let (fbar, pr) = scanner.fields(kappa, &grid, q.kicks)?;
    let field = if observable == Observable::FluctuationMean { fbar } else { pr };
    let rows: Vec<Vec<Cell>> =
        field.rows().into_iter().map(|(t, p, v)| vec![Cell::Real(t), Cell::Real(p), Cell::Real(v)]).collect();
    let mut params = BTreeMap::new();
    q.record(&mut params);
    params.insert("kappa".into(), json!(kappa));
    params.insert("grid".into(), json!(grid));
    params.insert("observable".into(), json!(observable));
    let mut manifest = ctx.manifest("scan", params);
    for norm in [PowerNormalization::CoordinateArea, PowerNormalization::HaarMean] {
        manifest
            .summary
            .insert(format!("average_{}", json!(norm).as_str().unwrap_or("")), field.phase_space_average(norm));
    }
    let path = ctx.path(&a.name, "scan", &format!("scan_{}.csv", observable.label()))?;
    write_with_manifest(&path, &["theta", "phi", "value"], &rows, manifest)?;
    println!("{}: {} cells", path.display(), rows.len());
    Ok(())
}

fn cmd_power(ctx: &Context, a: &PowerArgs) -> Result<(), CliError> {
    let q = ctx.quantum(&a.q)?;
    let kappas = ctx.kappas(&a.range)?;
    let (n_theta, n_phi) = ctx.grid(&a.grid)?;
    let grid = GridSpec::new(n_theta, n_phi)?;
    let norm = match ctx.config.pick(a.normalization.clone(), "normalization")? {
        Some(s) => parse_normalization(&s)?,
        None => PowerNormalization::default(),
    };
    let scanner = q.scanner(ctx.execution)?;
    let mut rows = Vec::with_capacity(kappas.len());
    for &kappa in &kappas {
        let p = scanner.fluctuation_power(kappa, &grid, q.kicks, norm)?;
        log::info!("kappa={kappa} power={p}");
        rows.push(vec![Cell::Real(kappa), Cell::Real(p)]);
    }
    let mut params = BTreeMap::new();
    q.record(&mut params);
    params.insert("kappa".into(), json!(kappas));
    params.insert("grid".into(), json!(grid));
    params.insert("normalization".into(), json!(norm));
    let path = ctx.path(&a.name, "power", "power.csv")?;
    write_with_manifest(&path, &["kappa", "value"], &rows, ctx.manifest("power", params))?;
    println!("{}: {} kappa values", path.display(), rows.len());
    Ok(())
}

fn cmd_lyapunov(ctx: &Context, a: &LyapunovArgs) -> Result<(), CliError> {
    let kappas = ctx.kappas(&a.range)?;
    let steps = ctx.config.or(a.steps, "steps", 10_000)?;
    let transient = ctx.config.or(a.transient, "transient", 100)?;
    let theta = ctx.config.pick(a.theta, "theta")?;
    let phi = ctx.config.pick(a.phi, "phi")?;
    let mut params = BTreeMap::new();
    params.insert("kappa".into(), json!(kappas));
    params.insert("steps".into(), json!(steps));
    params.insert("transient".into(), json!(transient));
    let values: Vec<(f64, f64)> = match (theta, phi) {
        (Some(t), Some(p)) => {
            let start = CoherentParams::new(t, p)?;
            params.insert("theta".into(), json!(t));
            params.insert("phi".into(), json!(p));
            kappas
                .iter()
                .map(|&k| Ok((k, lyapunov_exponent(start, k, steps, transient)?)))
                .collect::<Result<_, Error>>()?
        }
        (None, None) => {
            let (n_theta, n_phi) = ctx.grid(&a.grid)?;
            let grid = GridSpec::new(n_theta, n_phi)?;
            params.insert("grid".into(), json!(grid));
            lyapunov_sweep(&kappas, &grid, steps, transient, ctx.execution)?
        }
        _ => return Err(CliError::Usage("--theta and --phi must be given together".into())),
    };
    let rows: Vec<Vec<Cell>> = values.iter().map(|&(k, l)| vec![Cell::Real(k), Cell::Real(l)]).collect();
    let path = ctx.path(&a.name, "lyapunov", "lyapunov.csv")?;
    write_with_manifest(&path, &["kappa", "value"], &rows, ctx.manifest("lyapunov", params))?;
    println!("{}: {} kappa values", path.display(), rows.len());
    Ok(())
}

/// Runs a parsed command line.
pub fn run(cli: Cli, arguments: Vec<String>) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let env_threads = match std::env::var(THREADS_ENV) {
        Ok(s) => Some(s.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("invalid {THREADS_ENV}: `{s}`")))?),
        Err(_) => None,
    };
    let threads = config.pick(cli.threads, "threads")?.or(env_threads).unwrap_or(1);
    if threads == 0 {
        return Err(CliError::Usage("invalid value for --threads: must be at least 1".into()));
    }
    let out = config.or(cli.out.clone(), "out", PathBuf::from("out"))?;
    let ctx = Context {
        config,
        out,
        execution: if threads > 1 { Execution::Parallel } else { Execution::Serial },
        arguments,
        started: Instant::now(),
    };
    let go = || match &cli.command {
        Command::Evolve(a) => cmd_evolve(&ctx, a),
        Command::Fit(a) => cmd_fit(&ctx, a),
        Command::Portrait(a) => cmd_portrait(&ctx, a),
        Command::Scan(a) => cmd_scan(&ctx, a),
        Command::Power(a) => cmd_power(&ctx, a),
        Command::Lyapunov(a) => cmd_lyapunov(&ctx, a),
    };
    if threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Usage(format!("invalid value for --threads: {e}")))?;
        pool.install(go)
    } else {
        go()
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let arguments = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match run(cli, arguments) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
