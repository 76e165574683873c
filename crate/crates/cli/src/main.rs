//! Command-line front end: machine-readable spectrum, map,
//! verification, and crossing reports.
//!
//! Exit codes: 0 success/pass, 1 verification fail, 2 bad input,
//! 3 numerical non-convergence.

mod commands;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pdmspec::discretize::GridSpec;
use serde_json::json;
use std::io::Write;

#[derive(Debug)]
pub enum CliError {
    BadInput(String),
    NoConvergence(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::BadInput(msg) => write!(f, "bad input: {msg}"),
            CliError::NoConvergence(msg) => write!(f, "no convergence: {msg}"),
        }
    }
}

macro_rules! bad_input_from {
    ($($ty:ty),*) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> CliError {
                CliError::BadInput(e.to_string())
            }
        }
    )*};
}

bad_input_from!(
    pdmspec::expr::ParseError,
    pdmspec::maps::MapError,
    pdmspec::potentials::PotentialError,
    pdmspec::discretize::DiscretizeError,
    pdmspec::analytic::AnalyticError,
    pdmspec::verify::VerifyError
);

impl From<pdmspec::eig::EigError> for CliError {
    fn from(e: pdmspec::eig::EigError) -> CliError {
        CliError::NoConvergence(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "pdmspec", version, about = "PDM pseudo-Hermitian spectrum toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output file (stdout when omitted)
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Spectrum of a built-in reference model with analytic comparison
    Model {
        /// Model name: scarf2, periodic, or morse
        name: String,
        /// Scarf II strength V2 (V1 = V2^2)
        #[arg(long, default_value_t = 2.5)]
        v2: f64,
        /// Morse strength
        #[arg(long, default_value_t = 2.0)]
        eta: f64,
        /// Grid as a:b:N; pi is accepted as a bound
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Match tolerance for the verdict
        #[arg(long, default_value_t = 5e-2)]
        tol: f64,
    },
    /// Build a PDM target from a map and compare spectra with its reference
    Map {
        /// Generating map f (q = ln f)
        #[arg(long)]
        f: Option<String>,
        /// Generating map g (q = arctan g)
        #[arg(long)]
        g: Option<String>,
        /// Mass profile m(x) directly
        #[arg(long)]
        mass: Option<String>,
        /// Reference model: scarf2 or periodic
        #[arg(long)]
        reference: String,
        /// Scarf II strength V2
        #[arg(long, default_value_t = 2.5)]
        v2: f64,
        /// Reference q-interval as a:b
        #[arg(long, allow_hyphen_values = true)]
        qrange: Option<String>,
        /// Interior points on the reference grid
        #[arg(long, default_value_t = 600)]
        n: usize,
        /// Pairwise eigenvalue tolerance
        #[arg(long, default_value_t = 5e-3)]
        tol: f64,
    },
    /// Run structural verification checks on a PDM target
    Verify {
        /// Model name: scarf2 or periodic
        name: String,
        /// Scarf II strength V2
        #[arg(long, default_value_t = 2.5)]
        v2: f64,
        /// Comma-separated subset of intertwine,hermiticity,reality,pseudonorm
        #[arg(long, default_value = "intertwine,hermiticity,reality,pseudonorm")]
        checks: String,
        /// Coarsest ladder grid (runs N, 2N, 4N)
        #[arg(long, default_value_t = 200)]
        ladder: usize,
    },
    /// Level crossings across a list of Scarf II V2 values
    Crossings {
        /// Comma-separated V2 list
        #[arg(long)]
        v2: String,
    },
}

/// Bound literal: a float, or pi with optional sign.
fn parse_bound(text: &str) -> Result<f64, CliError> {
    let t = text.trim();
    match t {
        "pi" | "+pi" => return Ok(std::f64::consts::PI),
        "-pi" => return Ok(-std::f64::consts::PI),
        _ => {}
    }
    t.parse::<f64>()
        .map_err(|_| CliError::BadInput(format!("bad bound '{text}'")))
}

fn parse_grid(text: &str) -> Result<GridSpec, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::BadInput(format!("grid '{text}' is not a:b:N")));
    }
    let a = parse_bound(parts[0])?;
    let b = parse_bound(parts[1])?;
    let n = parts[2]
        .trim()
        .parse::<usize>()
        .map_err(|_| CliError::BadInput(format!("bad point count '{}'", parts[2])))?;
    Ok(GridSpec::new(a, b, n)?)
}

fn parse_range(text: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 2 {
        return Err(CliError::BadInput(format!("range '{text}' is not a:b")));
    }
    Ok((parse_bound(parts[0])?, parse_bound(parts[1])?))
}

fn parse_list(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::BadInput(format!("bad list entry '{t}'")))
        })
        .collect()
}

fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var("PDMSPEC_THREADS") {
        Ok(text) => {
            let n = text
                .parse::<usize>()
                .ok()
                .filter(|n| *n >= 1)
                .ok_or_else(|| {
                    CliError::BadInput(format!("PDMSPEC_THREADS must be a positive integer, got '{text}'"))
                })?;
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

fn run(cli: &Cli) -> Result<output::Payload, CliError> {
    // single-process pipeline: any positive cap is honored as-is
    let threads = thread_cap()?;
    match &cli.command {
        Command::Model {
            name,
            v2,
            eta,
            grid,
            tol,
        } => {
            let gs = grid.as_deref().map(parse_grid).transpose()?;
            let config = json!({
                "subcommand": "model",
                "model": name,
                "v2": v2,
                "eta": eta,
                "grid": gs.as_ref().map(|g| json!({"a": g.a(), "b": g.b(), "n": g.n()})),
                "tol": tol,
                "threads": threads,
            });
            commands::cmd_model(name, *v2, *eta, gs, *tol, config)
        }
        Command::Map {
            f,
            g,
            mass,
            reference,
            v2,
            qrange,
            n,
            tol,
        } => {
            let qr = qrange.as_deref().map(parse_range).transpose()?;
            let config = json!({
                "subcommand": "map",
                "reference": reference,
                "v2": v2,
                "f": f,
                "g": g,
                "mass": mass,
                "qrange": qr.map(|(a, b)| json!({"a": a, "b": b})),
                "n": n,
                "tol": tol,
                "threads": threads,
            });
            commands::cmd_map(
                reference,
                *v2,
                f.as_deref(),
                g.as_deref(),
                mass.as_deref(),
                qr,
                *n,
                *tol,
                config,
            )
        }
        Command::Verify {
            name,
            v2,
            checks,
            ladder,
        } => {
            let list: Vec<String> = checks
                .split(',')
                .map(|t| t.trim().to_owned())
                .filter(|t| !t.is_empty())
                .collect();
            if list.is_empty() {
                return Err(CliError::BadInput("no checks requested".into()));
            }
            let config = json!({
                "subcommand": "verify",
                "model": name,
                "v2": v2,
                "checks": list,
                "ladder": ladder,
                "threads": threads,
            });
            commands::cmd_verify(name, *v2, &list, *ladder, config)
        }
        Command::Crossings { v2 } => {
            let grid = parse_list(v2)?;
            let config = json!({
                "subcommand": "crossings",
                "v2": grid,
                "threads": threads,
            });
            commands::cmd_crossings(&grid, config)
        }
    }
}

fn emit(payload: &output::Payload, out: &OutputArgs) -> std::io::Result<()> {
    let text = match out.format {
        Format::Json => payload.to_json(),
        Format::Csv => payload.to_csv(),
    };
    match &out.out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(payload) => {
            if let Err(e) = emit(&payload, &cli.out) {
                eprintln!("error: {e}");
                std::process::exit(2);
            }
            std::process::exit(if payload.passed() { 0 } else { 1 });
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                CliError::BadInput(_) => 2,
                CliError::NoConvergence(_) => 3,
            };
            std::process::exit(code);
        }
    }
}
