//! `minsurf`: reproduces the ruled-surface area table, runs single solves,
//! reports area estimates, samples the Schwarz surface and converts grids.
//!
//! Exit status: 0 on success, 2 for bad input or arguments, 3 when the
//! numerics fail (including a solve that does not converge).

mod commands;
mod params;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use minsurf::schwarz::DEFAULT_CLEARANCE;

#[derive(Debug, Parser)]
#[command(name = "minsurf", version, about = "Minimal surfaces spanning skew quadrilaterals")]
#[command(args_override_self = true, subcommand_required = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the seven ruled2 boundaries and compare with the closed-form
    /// areas of both ruled seeds.
    #[command(allow_negative_numbers = true)]
    Table1 {
        #[arg(long, default_value_t = 40)]
        n: usize,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Solve one boundary; writes the grid and a convergence report.
    #[command(allow_negative_numbers = true)]
    Solve {
        #[command(flatten)]
        quad: QuadArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Area estimates for a grid file, or for the bilinear seed.
    #[command(allow_negative_numbers = true)]
    Areas {
        /// CSV grid to measure; without it the seed of --config/--r/--d/--n is used.
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        quad: QuadArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sample the Schwarz surface of the regular skew quadrilateral.
    #[command(allow_negative_numbers = true)]
    Schwarz {
        #[arg(long, value_enum, default_value_t = PieceArg::Both)]
        piece: PieceArg,
        /// Nodes per direction (n×n polar grid per piece).
        #[arg(long, default_value_t = 32)]
        n: usize,
        /// Minimum clearance between integration paths and branch points.
        #[arg(long, default_value_t = DEFAULT_CLEARANCE)]
        margin: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Convert a CSV grid into an OBJ triangle mesh (or rewrite it as CSV).
    #[command(allow_negative_numbers = true)]
    Export {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Table1 { .. } => "table1",
            Command::Solve { .. } => "solve",
            Command::Areas { .. } => "areas",
            Command::Schwarz { .. } => "schwarz",
            Command::Export { .. } => "export",
        }
    }

    fn params(&self) -> Option<&PathBuf> {
        let out = match self {
            Command::Table1 { output, .. }
            | Command::Solve { output, .. }
            | Command::Areas { output, .. }
            | Command::Schwarz { output, .. }
            | Command::Export { output, .. } => output,
        };
        out.params.as_ref()
    }
}

#[derive(Debug, Args)]
struct QuadArgs {
    #[arg(long, value_enum, default_value_t = ConfigArg::Ruled2)]
    config: ConfigArg,
    /// Width parameter r of the corner set.
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    /// Height parameter d of the corner set.
    #[arg(long, default_value_t = 1.0)]
    d: f64,
    /// Grid order N (N+1 nodes per side).
    #[arg(long, default_value_t = 40)]
    n: usize,
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// Damping factor applied to every Newton correction.
    #[arg(long, default_value_t = 0.5)]
    reduction: f64,
    /// Iteration cap; hitting it counts as a numerical failure.
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
    /// Residual tolerance on max|F| [default: 1e-8·(1 + seed max|F|)].
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Write the data here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Data format [default: csv for solve, obj for schwarz/export, report otherwise].
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// key = value file with defaults for any of these flags.
    #[arg(long)]
    params: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConfigArg {
    Ruled1,
    Ruled2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PieceArg {
    FrontRight,
    FrontLeft,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Obj,
    Report,
}

#[derive(Debug)]
pub enum CliError {
    Lib(minsurf::Error),
    Io { path: PathBuf, source: std::io::Error },
    Usage(String),
    /// The computation ran but did not reach a trustworthy result.
    NotConverged(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Usage(msg) => f.write_str(msg),
            CliError::NotConverged(msg) => write!(f, "not converged: {msg}"),
        }
    }
}

impl From<minsurf::Error> for CliError {
    fn from(e: minsurf::Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_numerical() => 3,
            CliError::NotConverged(_) => 3,
            _ => 2,
        }
    }
}

/// Parses the command line, folding in the parameter file when one is named.
fn parse_args(args: Vec<OsString>) -> Result<Cli, clap::Error> {
    let cli = Cli::try_parse_from(&args)?;
    let Some(path) = cli.command.params().cloned() else {
        return Ok(cli);
    };
    let name = cli.command.name();
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => {
            return Err(Cli::command().error(
                clap::error::ErrorKind::Io,
                format!("{}: {e}", path.display()),
            ))
        }
    };
    let allowed: Vec<String> = Cli::command()
        .find_subcommand(name)
        .map(|c| {
            c.get_arguments()
                .filter_map(|a| a.get_long().map(String::from))
                .filter(|l| l != "params")
                .collect()
        })
        .unwrap_or_default();
    let pairs = params::parse(&text, &allowed).map_err(|e| {
        Cli::command().error(
            clap::error::ErrorKind::ValueValidation,
            format!("{}: {e}", path.display()),
        )
    })?;
    Cli::try_parse_from(params::splice(&args, name, &pairs))
}

fn main() -> ExitCode {
    let cli = match parse_args(std::env::args_os().collect()) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("minsurf: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
