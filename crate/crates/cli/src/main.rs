use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod common;
mod example;
mod rockafellar;
mod split;
mod verify;

#[derive(Parser)]
#[command(name = "cmono", version, about = "Check c-cyclic monotonicity and build c-splitting potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the projection condition and, optionally, brute-force monotonicity.
    Verify(verify::VerifyArgs),
    /// Assemble splitting potentials from the projections and certify them.
    Split(split::SplitArgs),
    /// Re-certify a tuple written by `split`.
    Certify(split::CertifyArgs),
    /// Tabulate the Rockafellar antiderivative of a two-marginal pair list.
    Rockafellar(rockafellar::RockafellarArgs),
    /// Reproduce one of the built-in examples.
    Example(example::ExampleArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Flags shared by every subcommand.
#[derive(Args, Clone, Debug)]
pub struct Common {
    /// `c1`, `c2`, `c3` or the path of a cost JSON file.
    #[arg(long, default_value = "c1")]
    pub cost: String,
    /// Slack for inequality checks.
    #[arg(long, default_value_t = cmono_core::TOLERANCE)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (or directory for `split`); stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(a) => verify::run(a),
        Command::Split(a) => split::run(a),
        Command::Certify(a) => split::run_certify(a),
        Command::Rockafellar(a) => rockafellar::run(a),
        Command::Example(a) => example::run(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
