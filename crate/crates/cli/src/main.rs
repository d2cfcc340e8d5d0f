//! `mesub`: subband structure, magnetic depopulation, and ballistic
//! deflection of a quasi-2D electron gas under an in-plane magnetic field.
//!
//! Every command reads one TOML device configuration and is fully
//! deterministic: fixed inputs produce byte-identical outputs. Exit codes
//! are fixed for scripting: 0 success, 2 configuration error, 3 numeric
//! failure, 4 I/O failure, 5 no solution in the search bracket.

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod config;

/// CLI-level error: wraps the core error kinds and adds config and I/O
/// failures, each mapped to its fixed exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(mesub_core::Error),
    Io(String),
}

impl From<mesub_core::Error> for CliError {
    fn from(e: mesub_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(mesub_core::Error::Domain(_)) => 2,
            CliError::Core(mesub_core::Error::UnsupportedConfinement(_)) => 2,
            CliError::Core(mesub_core::Error::Numeric(_)) => 3,
            CliError::Core(mesub_core::Error::NoSolution { .. }) => 5,
            CliError::Io(_) => 4,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "mesub",
    version,
    about = "Magnetoelectric subbands, depopulation fields, and momentum-jump deflection \
             in a quasi-2D electron gas"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report subband energies, shifts, densities, and Fermi level at one field
    Subbands {
        /// Device configuration (TOML)
        config: PathBuf,
        /// In-plane magnetic field (T)
        #[arg(long = "B", value_name = "TESLA", default_value_t = 0.0)]
        b: f64,
        /// Also write the dispersion E_n(k_x) as CSV to this path
        #[arg(long, value_name = "PATH")]
        dispersion_out: Option<PathBuf>,
    },
    /// List the fields at which subbands empty, with a closed-form cross-check
    Depopulate {
        /// Device configuration (TOML)
        config: PathBuf,
    },
    /// Sweep the field range and write one record per sample point
    Sweep {
        /// Device configuration (TOML)
        config: PathBuf,
        /// Field range as START,END in tesla
        #[arg(long = "B-range", value_name = "START,END")]
        b_range: String,
        /// Number of uniform samples across the range
        #[arg(long, default_value_t = 81)]
        steps: usize,
        /// Output file path
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
        /// Output format
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
    },
    /// Solve for the drive field or confinement length hitting a target
    Design {
        /// Device configuration (TOML)
        config: PathBuf,
        #[command(flatten)]
        target: DesignTarget,
    },
    /// Tabulate E_n(k_x) as CSV, analytically or with the grid eigensolver
    Dispersion {
        /// Device configuration (TOML)
        config: PathBuf,
        /// In-plane magnetic field (T)
        #[arg(long = "B", value_name = "TESLA", default_value_t = 0.0)]
        b: f64,
        /// Symmetric sample range as MIN,MAX in 1/m (MIN must equal -MAX)
        #[arg(long, value_name = "MIN,MAX", default_value = "-2e8,2e8", allow_hyphen_values = true)]
        kx_range: String,
        /// Number of k_x samples (odd, so k = 0 is included)
        #[arg(long, default_value_t = 41)]
        kx_samples: usize,
        /// Number of bands to tabulate
        #[arg(long, default_value_t = 3)]
        bands: usize,
        /// Which solver to use
        #[arg(long, value_enum, default_value_t = Solver::Auto)]
        solver: Solver,
        /// Run both solvers and report their maximum relative deviation
        #[arg(long)]
        compare: bool,
        /// Write the CSV here instead of stdout
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct DesignTarget {
    /// Deflection angle the post-jump beam should reach (deg)
    #[arg(long = "target-theta-deg", value_name = "DEG")]
    theta_deg: Option<f64>,
    /// Depopulation field the device should reach (T)
    #[arg(long = "target-B1-T", value_name = "TESLA")]
    b1_t: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Solver {
    /// Analytic for parabolic wells, numeric for triangular
    Auto,
    Analytic,
    Numeric,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Subbands { config, b, dispersion_out } => {
            commands::subbands(&config::load(&config)?, b, dispersion_out.as_deref())
        }
        Command::Depopulate { config } => commands::depopulate(&config::load(&config)?),
        Command::Sweep { config, b_range, steps, out, format } => {
            commands::sweep(&config::load(&config)?, &b_range, steps, &out, format)
        }
        Command::Design { config, target } => {
            commands::design(&config::load(&config)?, target.theta_deg, target.b1_t)
        }
        Command::Dispersion { config, b, kx_range, kx_samples, bands, solver, compare, out } => {
            commands::dispersion(
                &config::load(&config)?,
                b,
                &kx_range,
                kx_samples,
                bands,
                solver,
                compare,
                out.as_deref(),
            )
        }
    }
}

/// Restore the default SIGPIPE disposition. Rust ignores the signal, which
/// turns a closed reader (`mesub ... | head`) into a `println!` panic; a
/// tool whose output feeds pipelines should just stop like any filter.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() -> ExitCode {
    reset_sigpipe();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
