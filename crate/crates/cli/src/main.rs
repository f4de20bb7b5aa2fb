use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gns_cli::spec::{parse_spec, TaskKind};
use gns_cli::tasks::{self, Settings};

/// Explore GNS representations, modular data and gauge entropy of
/// finite-dimensional C*-algebras.
#[derive(Parser)]
#[command(name = "gns", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print GNS dimension, modular spectrum, commutant dimension and S(rho_1).
    Report(Args),
    /// Sample gauge elements and write orbit.csv.
    Orbit(Args),
    /// Maximize S(rho_g); write extremize_trace.csv and gstar.json.
    Extremize(Args),
    /// Run the invariant battery; exits nonzero if any check fails.
    Verify(Args),
}

#[derive(clap::Args)]
struct Args {
    /// Problem spec (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of sampled gauge elements.
    #[arg(long)]
    samples: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Report(a) => (TaskKind::Report, a),
        Command::Orbit(a) => (TaskKind::Orbit, a),
        Command::Extremize(a) => (TaskKind::Extremize, a),
        Command::Verify(a) => (TaskKind::Verify, a),
    };
    let spec = match parse_spec(&args.spec) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let settings = Settings {
        out: args.out,
        seed: args.seed,
        samples: args.samples,
    };
    match tasks::run(kind, &spec, &settings, &mut io::stdout().lock()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: verification failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
