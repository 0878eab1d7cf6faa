//! `discordbench`: regenerate the state, HOM-dip, delay-scan, tomography
//! and multi-photon-error datasets as CSV or JSON.
//!
//! Exit status: 0 on success, 1 on I/O errors, 2 on usage errors and
//! rejected parameters, 3 on numeric failures (including MLE
//! non-convergence, in which case the report is still written).

mod commands;
mod format;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use discordbench_core::Error as CoreError;

#[derive(Debug, Parser)]
#[command(name = "discordbench", version, about = "Quantum discord from classical second-order interference")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Mean photon number per pulse.
    #[arg(long, default_value_t = 0.1)]
    pub mu: f64,
    /// Center wavelength in nm.
    #[arg(long, default_value_t = 785.0)]
    pub lambda0: f64,
    /// Filter bandwidth (FWHM) in nm.
    #[arg(long = "fwhm-lambda", default_value_t = 3.0)]
    pub fwhm_lambda: f64,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Destination file, or `-` for standard output.
    #[arg(long, short, default_value = "-")]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    Coherent,
    Incoherent,
    Delayed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TomographyKind {
    Coherent,
    Incoherent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Side {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Post-selected two-qubit state with purity, concurrence, discord and reduced states.
    State {
        #[arg(value_enum)]
        kind: StateKind,
        /// Relative phase of the pulses in radians (coherent only).
        #[arg(long, allow_hyphen_values = true)]
        phi: Option<f64>,
        /// Path-length difference in µm (delayed only).
        #[arg(long)]
        delta: Option<f64>,
        #[command(flatten)]
        source: SourceArgs,
        /// Subsystem measured in the discord optimization.
        #[arg(long, value_enum, default_value_t = Side::B)]
        measure: Side,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Classical HOM dip: normalized coincidences versus delay (CSV).
    Homdip {
        #[command(flatten)]
        source: SourceArgs,
        /// First delay in µm.
        #[arg(long, default_value_t = -400.0, allow_hyphen_values = true)]
        min: f64,
        /// Last delay in µm.
        #[arg(long, default_value_t = 400.0, allow_hyphen_values = true)]
        max: f64,
        #[arg(long, default_value_t = 161)]
        points: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Purity and discord of the incoherent state versus delay (CSV).
    DelayScan {
        #[command(flatten)]
        source: SourceArgs,
        /// First delay in µm.
        #[arg(long, default_value_t = 0.0)]
        min: f64,
        /// Last delay in µm.
        #[arg(long, default_value_t = 500.0)]
        max: f64,
        #[arg(long, default_value_t = 51)]
        points: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Simulated tomography with MLE reconstruction and bootstrap errors.
    Tomography {
        #[arg(value_enum)]
        kind: TomographyKind,
        /// Relative phase in radians (coherent only).
        #[arg(long, allow_hyphen_values = true)]
        phi: Option<f64>,
        /// Expected counts for a unit-probability projector.
        #[arg(long = "mean-total", default_value_t = 1e4)]
        mean_total: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Bootstrap resamples (at least 2).
        #[arg(long, default_value_t = 50)]
        resamples: usize,
        #[arg(long = "max-iter", default_value_t = 5000)]
        max_iter: usize,
        /// Relative log-likelihood change that stops the optimizer.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Read `setting,count` records instead of simulating them.
        #[arg(long)]
        records: Option<PathBuf>,
        /// `json` for the full report, `csv` for the `setting,count` records.
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Share of multi-photon coincidences versus mean photon number (CSV).
    ErrorCurve {
        #[arg(long = "mu-min", default_value_t = 0.001)]
        mu_min: f64,
        #[arg(long = "mu-max", default_value_t = 1.0)]
        mu_max: f64,
        #[arg(long, default_value_t = 1000)]
        points: usize,
        /// Truncation of the photon-number sums.
        #[arg(long = "n-cut", default_value_t = 100)]
        n_cut: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numeric(String),
    Io(anyhow::Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "invalid arguments: {m}"),
            Failure::Numeric(m) => write!(f, "numeric failure: {m}"),
            Failure::Io(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter(_)
            | CoreError::DimensionMismatch(_)
            | CoreError::BadShape { .. }
            | CoreError::NotInformationallyComplete(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::State {
            kind,
            phi,
            delta,
            source,
            measure,
            format,
            out,
        } => commands::state(kind, phi, delta, &source, measure, format, &out),
        Command::Homdip {
            source,
            min,
            max,
            points,
            out,
        } => commands::homdip(&source, min, max, points, &out),
        Command::DelayScan {
            source,
            min,
            max,
            points,
            out,
        } => commands::delay_scan(&source, min, max, points, &out),
        Command::Tomography {
            kind,
            phi,
            mean_total,
            seed,
            resamples,
            max_iter,
            tol,
            records,
            format,
            out,
        } => commands::tomography(
            &commands::TomographyRequest {
                kind,
                phi,
                mean_total,
                seed,
                resamples,
                max_iter,
                tol,
                records,
                format,
            },
            &out,
        ),
        Command::ErrorCurve {
            mu_min,
            mu_max,
            points,
            n_cut,
            out,
        } => commands::error_curve(mu_min, mu_max, points, n_cut, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("discordbench: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
