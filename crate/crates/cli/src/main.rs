//! `gonosomal`: fixed points, trajectories, limit classification, property
//! checks and convergence scans for gonosomal evolution operators.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gonosomal::sampling::DEFAULT_SEED;
use gonosomal::Mode;

#[derive(Parser, Debug)]
#[command(name = "gonosomal", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Tensor file, or `builtin` for the hemophilia tensor.
    #[arg(long, default_value = "builtin", global = true)]
    tensor: String,
    /// Operator mode.
    #[arg(long, default_value_t = Mode::Raw, global = true)]
    mode: Mode,
    /// Seed for every random draw.
    #[arg(long, default_value_t = DEFAULT_SEED, global = true)]
    seed: u64,
    /// Output file (stdout if absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Multistart Newton search for fixed points, with spectra.
    FixedPoints {
        /// Number of Newton seeds.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Residual a root must reach.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Iterates from a state and writes the trajectory as CSV.
    Trajectory {
        /// Start state, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        state: String,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        /// Step size that counts as converged.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Magnitude that counts as divergence.
        #[arg(long, default_value_t = 1e12)]
        div_threshold: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Classifies the limit of a hemophilia trajectory analytically.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        state: String,
        /// Steps probed for a nonzero `y·v` product.
        #[arg(long, default_value_t = 100)]
        probe_budget: usize,
        /// Also iterate and report the observed limit.
        #[arg(long)]
        empirical: bool,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Runs the property battery for the tensor.
    Verify {
        /// Samples per property.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Scans the simplex for trajectories of the normalized hemophilia
    /// operator that miss (1/2, 0, 1/2, 0).
    Scan {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Convergence radius around the fixed point.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 500)]
        budget: usize,
        /// Scan this single start instead of random samples.
        #[arg(long)]
        state: Option<String>,
        /// Where to write the histogram table (appended to the report if absent).
        #[arg(long)]
        table: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    /// A checked property or validation failed; the report was still written.
    Property,
    /// Bad input or I/O.
    Input(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::FixedPoints {
            samples,
            tol,
            common,
        } => commands::fixed_points(&common, samples, tol),
        Command::Trajectory {
            state,
            budget,
            tol,
            div_threshold,
            common,
        } => commands::trajectory(&common, &state, budget, tol, div_threshold),
        Command::Classify {
            state,
            probe_budget,
            empirical,
            budget,
            tol,
            common,
        } => commands::classify(
            &common,
            &state,
            probe_budget,
            empirical.then_some((budget, tol)),
        ),
        Command::Verify { samples, common } => commands::verify(&common, samples),
        Command::Scan {
            samples,
            tol,
            budget,
            state,
            table,
            common,
        } => commands::scan(
            &common,
            samples,
            tol,
            budget,
            state.as_deref(),
            table.as_deref(),
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Property) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
