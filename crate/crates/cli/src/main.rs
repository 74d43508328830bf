use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod schema;

pub const DEFAULT_SOUND_SPEED: f64 = 343.0;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Numerical(diffcoh::error::Error),
    #[error("{0}")]
    SuiteFailed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Numerical(e) if e.is_degenerate() => 2,
            CliError::Numerical(_) => 1,
            CliError::SuiteFailed(_) => 3,
        }
    }
}

impl From<diffcoh::error::Error> for CliError {
    fn from(e: diffcoh::error::Error) -> Self {
        CliError::Numerical(e)
    }
}

#[derive(Debug, Parser)]
#[command(name = "diffcoh", version, about = "Diffuse-field coherence of directional sensors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Coherence of a sensor pair over a frequency sweep (CSV).
    Pair {
        #[arg(long)]
        spec: PathBuf,
        /// `start:step:stop` or a comma-separated list, in Hz.
        #[arg(long)]
        freqs: String,
        /// Sound speed in m/s; overrides the file.
        #[arg(long = "c")]
        sound_speed: Option<f64>,
        /// Angles in the file are in degrees.
        #[arg(long)]
        degrees: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coherence matrices of a measured array (JSON).
    Array {
        #[arg(long)]
        meas: PathBuf,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long = "c")]
        sound_speed: Option<f64>,
        #[arg(long)]
        degrees: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spherical spectrum of a differential pattern (JSON).
    Diffpattern {
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        weights: Vec<f64>,
        /// Look direction `theta,phi`.
        #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
        orient: Option<Vec<f64>>,
        #[arg(long)]
        degrees: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a self-check suite.
    Validate {
        #[arg(long, value_parser = ["closed-forms", "oracle-random", "montecarlo"])]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Pair { spec, freqs, sound_speed, degrees, out } => {
            let csv = commands::pair(&spec, &freqs, sound_speed, degrees)?;
            emit(&csv, out.as_ref())
        }
        Command::Array { meas, order, sound_speed, degrees, out } => {
            let json = commands::array(&meas, order, sound_speed, degrees)?;
            emit(&json, out.as_ref())
        }
        Command::Diffpattern { weights, orient, degrees, out } => {
            let json = commands::diffpattern(weights, orient, degrees)?;
            emit(&json, out.as_ref())
        }
        Command::Validate { suite, seed } => {
            let report = commands::validate(&suite, seed)?;
            emit(&format!("{report}\n"), None)?;
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::SuiteFailed(format!("suite {suite} failed")))
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
