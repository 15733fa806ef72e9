//! Command-line front end.
//!
//! Data goes to the output sink, diagnostics to the error sink as a single
//! line. Exit codes: 0 success, 1 usage error, 2 solver failure, 3 failed
//! certification (`verify` only).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::dynamics::{self, OpinionDistribution};
use crate::equilibrium::{aggregate_equilibrium, symmetric_equilibrium, symmetric_payoffs};
use crate::error::GameError;
use crate::game::{EffortProfile, ExposureLevel, OpinionConfig};
use crate::limited::{self, linear_grid, polarization, LimitedEquilibrium};
use crate::verification::{certify_equilibrium, CERTIFY_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_UNCERTIFIED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "indoctrination", version, about = "Indoctrination contest solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Root-finding tolerance (and L1 convergence tolerance for `process`).
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol: f64,

    #[arg(long = "max-iter", global = true, default_value_t = 1_000_000)]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full-monitoring equilibrium: aggregates, symmetric efforts, payoffs.
    Equilibrium(GameArgs),
    /// Three-opinion limited-exposure equilibrium at one exposure level.
    Limited(LimitedArgs),
    /// Limited-exposure equilibria over a grid of exposure levels.
    Sweep(SweepArgs),
    /// Run the generational process to its stationary shares.
    Process(ProcessArgs),
    /// Certify a profile by brute-force best responses.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct GameArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub opinions: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct LimitedArgs {
    #[arg(long)]
    pub delta: f64,
    /// Group sizes on (0, 1, 2); totals are split evenly inside groups.
    #[arg(long, value_delimiter = ',', default_value = "1,1,1")]
    pub sizes: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// `start:stop:steps`, inclusive of both ends.
    #[arg(long, default_value = "0.01:1:100")]
    pub grid: String,
}

#[derive(Debug, Args)]
pub struct ProcessArgs {
    #[arg(long)]
    pub delta: f64,
    #[arg(long, value_delimiter = ',')]
    pub pi0: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// JSON produced by `equilibrium` or `limited`.
    #[arg(long, conflicts_with_all = ["opinions", "sizes", "efforts", "delta"])]
    pub input: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub opinions: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Per-player efforts in group-major order.
    #[arg(long, value_delimiter = ',')]
    pub efforts: Option<Vec<f64>>,
    /// Certify in the limited-exposure game at this level.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long = "cert-tol", default_value_t = CERTIFY_TOL)]
    pub cert_tol: f64,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Solver(String),
    Io(String),
}

impl From<GameError> for Failure {
    fn from(e: GameError) -> Self {
        match e {
            GameError::SolverFailure { .. }
            | GameError::NotConverged { .. }
            | GameError::NotUnimodal { .. } => Failure::Solver(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Outcome = std::result::Result<i32, Failure>;

#[derive(Debug, Serialize)]
struct EquilibriumOut {
    opinions: Vec<f64>,
    sizes: Vec<usize>,
    aggregates: Vec<f64>,
    efforts: Vec<f64>,
    payoffs: Vec<f64>,
    polarization: f64,
}

#[derive(Debug, Serialize)]
struct LimitedOut {
    delta: f64,
    w: f64,
    e1: f64,
    e2: f64,
    e3: f64,
    r_star: f64,
    polarization: f64,
    opinions: Vec<f64>,
    sizes: Vec<usize>,
    efforts: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct ProcessOut {
    delta: f64,
    w: f64,
    r_star: f64,
    pi: [f64; 3],
    iterations: usize,
    pi_closed_form: [f64; 3],
    closed_form_l1: f64,
}

#[derive(Debug, Serialize)]
struct VerifyOut {
    certified: bool,
    max_gain: f64,
    tol: f64,
    reports: Vec<crate::verification::DeviationReport>,
}

/// What `verify --input` reads back.
#[derive(Debug, Deserialize)]
struct ProfileIn {
    opinions: Vec<f64>,
    sizes: Vec<usize>,
    efforts: Vec<f64>,
    #[serde(default)]
    delta: Option<f64>,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let msg = e.render().to_string();
                    let line = msg.lines().next().unwrap_or("usage error");
                    let _ = writeln!(err, "{line}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Solver(m)) => {
            let _ = writeln!(err, "solver failure: {m}");
            EXIT_SOLVER
        }
        Err(Failure::Io(m)) => {
            let _ = writeln!(err, "io error: {m}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Outcome {
    if !(cli.tol > 0.0) {
        return Err(Failure::Usage(format!("--tol must be positive, got {}", cli.tol)));
    }
    match &cli.command {
        Command::Equilibrium(a) => equilibrium(a, cli.format, out),
        Command::Limited(a) => limited_cmd(a, cli, out),
        Command::Sweep(a) => sweep_cmd(a, cli, out),
        Command::Process(a) => process_cmd(a, cli, out),
        Command::Verify(a) => verify_cmd(a, cli.format, out),
    }
}

fn equilibrium(a: &GameArgs, format: Format, out: &mut dyn Write) -> Outcome {
    let config = OpinionConfig::new(a.opinions.clone(), a.sizes.clone())?;
    let aggregates = aggregate_equilibrium(&config);
    let profile = symmetric_equilibrium(&config);
    let payoffs = symmetric_payoffs(&config);
    let pol = polarization(&aggregates, &config)?.value();
    match format {
        Format::Json => emit_json(
            out,
            &EquilibriumOut {
                opinions: config.opinions().to_vec(),
                sizes: config.sizes().to_vec(),
                aggregates: aggregates.values().to_vec(),
                efforts: profile.efforts().to_vec(),
                payoffs,
                polarization: pol,
            },
        )?,
        Format::Csv => {
            writeln!(out, "opinion,size,aggregate,effort,payoff")?;
            for (i, &payoff) in payoffs.iter().enumerate() {
                let n = config.sizes()[i];
                let row = [
                    config.opinions()[i],
                    n as f64,
                    aggregates.values()[i],
                    aggregates.values()[i] / n as f64,
                    payoff,
                ];
                write_csv_row(out, &row)?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn limited_cmd(a: &LimitedArgs, cli: &Cli, out: &mut dyn Write) -> Outcome {
    let delta = ExposureLevel::new(a.delta)?;
    let sizes: [usize; 3] = a.sizes.as_slice().try_into().map_err(|_| {
        Failure::Usage(format!("--sizes needs three entries, got {}", a.sizes.len()))
    })?;
    let eq = limited::solve_equilibrium(delta, cli.tol)?;
    let (config, profile) = eq.profile(sizes)?;
    let pol = polarization(&eq.aggregates(), &config)?.value();
    match cli.format {
        Format::Json => emit_json(
            out,
            &LimitedOut {
                delta: a.delta,
                w: eq.w,
                e1: eq.e1,
                e2: eq.e2,
                e3: eq.e3,
                r_star: eq.r_star,
                polarization: pol,
                opinions: config.opinions().to_vec(),
                sizes: config.sizes().to_vec(),
                efforts: profile.efforts().to_vec(),
            },
        )?,
        Format::Csv => {
            writeln!(out, "delta,w,e1,e2,e3,r_star,polarization")?;
            write_csv_row(out, &[a.delta, eq.w, eq.e1, eq.e2, eq.e3, eq.r_star, pol])?;
        }
    }
    Ok(EXIT_OK)
}

fn parse_grid(spec: &str) -> std::result::Result<Vec<ExposureLevel>, Failure> {
    let bad = || Failure::Usage(format!("--grid expects start:stop:steps, got {spec:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let steps: usize = parts[2].trim().parse().map_err(|_| bad())?;
    Ok(linear_grid(start, stop, steps)?)
}

fn sweep_cmd(a: &SweepArgs, cli: &Cli, out: &mut dyn Write) -> Outcome {
    let grid = parse_grid(&a.grid)?;
    let rows = limited::sweep(&grid, cli.tol)?;
    match cli.format {
        Format::Json => emit_json(out, &rows)?,
        Format::Csv => {
            writeln!(out, "delta,w,e1,e2,polarization")?;
            for r in &rows {
                write_csv_row(out, &[r.delta, r.w, r.e1, r.e2, r.polarization])?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn process_cmd(a: &ProcessArgs, cli: &Cli, out: &mut dyn Write) -> Outcome {
    let delta = ExposureLevel::new(a.delta)?;
    let pi0 = match &a.pi0 {
        None => OpinionDistribution::uniform(),
        Some(v) => {
            let arr: [f64; 3] = v.as_slice().try_into().map_err(|_| {
                Failure::Usage(format!("--pi0 needs three entries, got {}", v.len()))
            })?;
            OpinionDistribution::new(arr)?
        }
    };
    let (pi, iterations) = dynamics::iterate_to_stationary(&pi0, delta, cli.tol, cli.max_iter)?;
    let closed = dynamics::stationary_closed_form(delta)?;
    let eq: LimitedEquilibrium = limited::solve_equilibrium(delta, limited::DEFAULT_TOL)?;
    let l1 = pi.l1_distance(&closed);
    match cli.format {
        Format::Json => emit_json(
            out,
            &ProcessOut {
                delta: a.delta,
                w: eq.w,
                r_star: eq.r_star,
                pi: pi.probs(),
                iterations,
                pi_closed_form: closed.probs(),
                closed_form_l1: l1,
            },
        )?,
        Format::Csv => {
            writeln!(out, "delta,r_star,pi1,pi2,pi3,iterations,closed_form_l1")?;
            let p = pi.probs();
            write_csv_row(
                out,
                &[a.delta, eq.r_star, p[0], p[1], p[2], iterations as f64, l1],
            )?;
        }
    }
    Ok(EXIT_OK)
}

fn verify_cmd(a: &VerifyArgs, format: Format, out: &mut dyn Write) -> Outcome {
    let input = match &a.input {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str::<ProfileIn>(&text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
        }
        None => {
            let need = |what: &str| Failure::Usage(format!("--{what} is required without --input"));
            ProfileIn {
                opinions: a.opinions.clone().ok_or_else(|| need("opinions"))?,
                sizes: a.sizes.clone().ok_or_else(|| need("sizes"))?,
                efforts: a.efforts.clone().ok_or_else(|| need("efforts"))?,
                delta: a.delta,
            }
        }
    };
    let config = OpinionConfig::new(input.opinions, input.sizes)?;
    let profile = EffortProfile::grouped(&config, input.efforts)?;
    let delta = input.delta.map(ExposureLevel::new).transpose()?;
    let cert = certify_equilibrium(&profile, &config, delta, a.cert_tol)?;
    let certified = cert.is_certified();
    match format {
        Format::Json => emit_json(
            out,
            &VerifyOut {
                certified,
                max_gain: cert.max_gain(),
                tol: cert.tol,
                reports: cert.reports,
            },
        )?,
        Format::Csv => {
            writeln!(out, "player,current_effort,best_effort,payoff_gain,boundary")?;
            for r in &cert.reports {
                let boundary = matches!(r.method, crate::verification::SearchMethod::Boundary);
                write_csv_row(
                    out,
                    &[
                        r.player as f64,
                        r.current_effort,
                        r.best_effort,
                        r.payoff_gain,
                        if boundary { 1.0 } else { 0.0 },
                    ],
                )?;
            }
        }
    }
    Ok(if certified { EXIT_OK } else { EXIT_UNCERTIFIED })
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> std::result::Result<(), Failure> {
    let text = serde_json::to_string(value).map_err(|e| Failure::Io(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn write_csv_row(out: &mut dyn Write, fields: &[f64]) -> std::io::Result<()> {
    let line: Vec<String> = fields.iter().map(|&x| format_g(x, 12)).collect();
    writeln!(out, "{}", line.join(","))
}

/// C-style `%.{precision}g`.
pub fn format_g(x: f64, precision: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let p = precision.max(1);
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
