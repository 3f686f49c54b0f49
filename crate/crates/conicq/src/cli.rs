//! Command-line front end.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::adams::{self, AdamsError};
use crate::geometry::{classify, default_tolerance_pi2, ClassificationInput, ConicDivisor, GeometryError};
use crate::ode::{DEFAULT_METHOD, DEFAULT_TOL};
use crate::polyexp::{self, json::parse_jets, ExpansionError};
use crate::shooting::{find_q0, reconstruct, solve_for_beta, FootballSolution, ShootingConfig, ShootingError};

pub const SCHEMA: u32 = 1;
/// Relative CSV paths are resolved against this directory when it is set.
pub const OUT_DIR_ENV: &str = "CONICQ_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "conicq", version, about = "Constant Q-curvature conic 4-spheres: classification, football orbits, expansions and Adams checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a conic divisor as subcritical, critical or supercritical.
    #[command(allow_negative_numbers = true)]
    Classify(ClassifyArgs),
    /// Solve for a football orbit at one slope p or one cone index beta.
    #[command(allow_negative_numbers = true)]
    FootballSolve(SolveArgs),
    /// Solve football orbits over a grid of slopes, one JSON line per point.
    #[command(allow_negative_numbers = true)]
    FootballSweep(SweepArgs),
    /// Generate the exact expansion at a cone point.
    #[command(allow_negative_numbers = true)]
    Expand(ExpandArgs),
    /// Evaluate the exponential functional along a test family, as CSV.
    #[command(allow_negative_numbers = true)]
    AdamsCheck(AdamsArgs),
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Total Q-curvature of the background metric, in units of π².
    #[arg(long = "kg0-pi2")]
    pub kg0_pi2: f64,
    /// Comma-separated cone indices, each in (-1, 0).
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub betas: Vec<f64>,
    /// Even dimension of the sphere.
    #[arg(long, default_value_t = 4)]
    pub dimension: u32,
    /// Half-width of the critical band in units of π² (default 1e-12·γ_n).
    #[arg(long = "tol-pi2")]
    pub tol_pi2: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ShootArgs {
    /// Width at which the bisection on q stops.
    #[arg(long = "q-tol", default_value_t = 1e-12)]
    pub q_tol: f64,
    /// Integration horizon in the cylinder coordinate.
    #[arg(long = "t-max", default_value_t = 30.0)]
    pub t_max: f64,
    /// Relative and absolute tolerance of the integrator.
    #[arg(long = "ode-tol", default_value_t = DEFAULT_TOL)]
    pub ode_tol: f64,
    /// Embedded Runge-Kutta pair: dopri5, cash-karp or fehlberg.
    #[arg(long, default_value = DEFAULT_METHOD)]
    pub method: String,
}

impl ShootArgs {
    fn config(&self, p: f64) -> ShootingConfig {
        ShootingConfig { q_tol: self.q_tol, ode_tol: self.ode_tol, t_max: self.t_max, method: self.method.clone(), ..ShootingConfig::new(p) }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Initial slope x2(0), negative.
    #[arg(long, group = "target")]
    pub p: Option<f64>,
    /// Cone index to hit; the slope is found by root finding.
    #[arg(long, group = "target")]
    pub beta: Option<f64>,
    #[command(flatten)]
    pub shoot: ShootArgs,
    /// Write the orbit on [0, t_end] as CSV to this path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Resample the CSV on a uniform grid with this spacing instead of the integrator steps.
    #[arg(long = "csv-dt")]
    pub csv_dt: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Slopes as a comma list (-0.25,-0.5) or a range start:stop:count.
    #[arg(long = "p-grid")]
    pub p_grid: String,
    #[command(flatten)]
    pub shoot: ShootArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    /// Cone index as an exact rational in (-1, 0), e.g. -1/2 or -0.25.
    #[arg(long)]
    pub beta: String,
    /// JSON file of jet polynomials, or `zero`.
    #[arg(long, default_value = "zero")]
    pub jets: String,
    /// Homogeneity below which the residual must vanish (default 4(beta+1)).
    #[arg(long)]
    pub order: Option<String>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct AdamsArgs {
    /// Cone index in (-1, 0).
    #[arg(long)]
    pub beta: f64,
    /// Number of family members, d = 1..=depth with radius 2^-d.
    #[arg(long = "family-depth", default_value_t = 12)]
    pub family_depth: u32,
    /// Exponent as a multiple of the sharp constant 32π²(1+beta).
    #[arg(long = "b-factor", default_value_t = 0.9)]
    pub b_factor: f64,
    /// Test family: truncated-log, bump or poly-cap.
    #[arg(long, default_value = adams::DEFAULT_FAMILY)]
    pub family: String,
}

#[derive(Debug)]
pub enum CliError {
    Domain(String),
    Internal(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            Self::Domain(_) => EXIT_DOMAIN,
            Self::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Domain(m) | Self::Internal(m) => f.write_str(m),
        }
    }
}

impl From<ShootingError> for CliError {
    fn from(e: ShootingError) -> Self {
        if e.is_domain() {
            Self::Domain(e.to_string())
        } else {
            Self::Internal(e.to_string())
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        Self::Domain(e.to_string())
    }
}

impl From<ExpansionError> for CliError {
    fn from(e: ExpansionError) -> Self {
        if e.is_domain() {
            Self::Domain(e.to_string())
        } else {
            Self::Internal(e.to_string())
        }
    }
}

impl From<AdamsError> for CliError {
    fn from(e: AdamsError) -> Self {
        if e.is_domain() {
            Self::Domain(e.to_string())
        } else {
            Self::Internal(e.to_string())
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Self::Internal(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Internal(e.to_string())
    }
}

/// Parses arguments (including the program name) and runs, returning the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

pub fn execute(cmd: &Command, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Classify(a) => cmd_classify(a, out),
        Command::FootballSolve(a) => cmd_solve(a, out),
        Command::FootballSweep(a) => cmd_sweep(a, out),
        Command::Expand(a) => cmd_expand(a, out),
        Command::AdamsCheck(a) => cmd_adams(a, out),
    }
}

fn emit(out: &mut dyn Write, body: Value) -> Result<(), CliError> {
    let mut obj = serde_json::Map::new();
    obj.insert("schema".into(), json!(SCHEMA));
    match body {
        Value::Object(m) => obj.extend(m),
        other => {
            obj.insert("result".into(), other);
        }
    }
    writeln!(out, "{}", Value::Object(obj))?;
    Ok(())
}

/// Resolves relative output paths against the output directory from the environment.
pub fn output_path(p: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if p.is_relative() && !dir.is_empty() => Path::new(&dir).join(p),
        _ => p.to_path_buf(),
    }
}

fn create(p: &Path) -> Result<BufWriter<File>, CliError> {
    let path = output_path(p);
    if let Some(parent) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    let f = File::create(&path).map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))?;
    Ok(BufWriter::new(f))
}

fn cmd_classify(a: &ClassifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let divisor = ConicDivisor::from_betas(&a.betas)?;
    let input = ClassificationInput::new(a.kg0_pi2, divisor, a.dimension)?;
    let tol = match a.tol_pi2 {
        Some(t) if t >= 0.0 => t,
        Some(t) => return Err(CliError::Domain(format!("tolerance must be non-negative, got {t}"))),
        None => default_tolerance_pi2(a.dimension)?,
    };
    let c = classify(&input, tol)?;
    emit(out, serde_json::to_value(c)?)
}

fn solution_json(sol: &FootballSolution) -> Value {
    let m = reconstruct(sol);
    json!({
        "p": sol.p,
        "q0": sol.q0,
        "q0_err": sol.q0_err,
        "alpha": sol.alpha,
        "beta": sol.beta,
        "c": sol.c,
        "t_end": sol.t_end,
        "alpha_residual": sol.alpha_residual,
        "integral_x4": m.integral_x4,
        "total_curvature_pi2": m.total_curvature_pi2,
        "gbc_expected_pi2": m.gbc_expected_pi2,
        "gbc_residual_pi2": m.gbc_residual_pi2,
        "gbc_relative": m.gbc_relative,
        "iters": sol.bisection_iters,
        "polish_iters": sol.polish_iters,
        "noise_limited": sol.noise_limited,
        "max_drift": sol.trajectory.max_drift,
    })
}

fn cmd_solve(a: &SolveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let sol = match (a.p, a.beta) {
        (Some(p), None) => find_q0(&a.shoot.config(p))?,
        (None, Some(b)) => solve_for_beta(b, &a.shoot.config(-1.0))?,
        _ => return Err(CliError::Domain("give exactly one of --p or --beta".into())),
    };
    if let Some(path) = &a.csv {
        if let Some(dt) = a.csv_dt.filter(|d| !(*d > 0.0)) {
            return Err(CliError::Domain(format!("--csv-dt must be positive, got {dt}")));
        }
        let mut w = create(path)?;
        sol.trajectory.write_csv(&mut w, a.csv_dt)?;
        w.flush()?;
    }
    emit(out, solution_json(&sol))
}

/// Parses `a,b,c` or `start:stop:count`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Domain(format!("bad grid {s:?}"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.as_slice() {
        [one] => one.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        [a, b, n] => {
            let (a, b) = (num(a)?, num(b)?);
            let n: usize = n.trim().parse().map_err(|_| bad())?;
            match n {
                0 => return Err(bad()),
                1 => vec![a],
                _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
            }
        }
        _ => return Err(bad()),
    };
    if grid.is_empty() || grid.iter().any(|x| !x.is_finite()) {
        return Err(bad());
    }
    Ok(grid)
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let grid = parse_grid(&a.p_grid)?;
    let results: Vec<Result<Value, CliError>> = grid
        .par_iter()
        .map(|&p| find_q0(&a.shoot.config(p)).map(|s| solution_json(&s)).map_err(CliError::from))
        .collect();
    let mut worst: Option<CliError> = None;
    for (p, r) in grid.iter().zip(results) {
        match r {
            Ok(v) => emit(out, v)?,
            Err(e) => {
                emit(out, json!({"p": p, "error": e.to_string()}))?;
                if worst.as_ref().is_none_or(|w| e.code() == EXIT_INTERNAL && w.code() != EXIT_INTERNAL) {
                    worst = Some(e);
                }
            }
        }
    }
    match worst {
        None => Ok(()),
        Some(e) => Err(e),
    }
}

fn cmd_expand(a: &ExpandArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let Format::Json = a.format;
    let beta = polyexp::parse_rational(&a.beta)?;
    let jets = if a.jets == "zero" {
        Vec::new()
    } else {
        let text = std::fs::read_to_string(&a.jets).map_err(|e| CliError::Domain(format!("{}: {e}", a.jets)))?;
        parse_jets(&text)?
    };
    let order = match &a.order {
        Some(o) => polyexp::parse_rational(o)?,
        None => polyexp::max_order(&beta),
    };
    let e = polyexp::formal_expansion(&beta, &jets, &order)?;
    #[derive(Serialize)]
    struct Out<'a> {
        #[serde(flatten)]
        expansion: &'a polyexp::Expansion,
        terms_count: usize,
    }
    emit(out, serde_json::to_value(Out { expansion: &e, terms_count: e.terms.len() })?)
}

fn cmd_adams(a: &AdamsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let fam = adams::family(&a.family)?;
    if !(a.b_factor >= 0.0) {
        return Err(CliError::Domain(format!("--b-factor must be non-negative, got {}", a.b_factor)));
    }
    let b = a.b_factor * adams::sharp_threshold(a.beta)?;
    let pts = adams::sharpness_probe_with(&*fam, a.beta, b, a.family_depth)?;
    writeln!(out, "depth,rho,value")?;
    for p in pts {
        writeln!(out, "{},{:e},{:e}", p.depth, p.rho, p.value)?;
    }
    Ok(())
}
