use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mixbem_cli::{init_threads, run, Command};

/// Mixed Dirichlet-Neumann boundary element solver.
///
/// Everything about a run lives in the JSON config; flags only choose
/// paths and verbosity. Exit codes: 0 pass, 1 numerical threshold failure,
/// 2 input or config error. Set MIXBEM_THREADS to fix the thread count.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// Print progress and timings to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Sub {
    /// Solve the configured problem and evaluate at the probes.
    Solve(Args),
    /// Jump relations, manufactured closure, and radiation checks.
    Verify(Args),
    /// Mollified measure sequence against the atomic reference.
    MeasureStudy(Args),
    /// Write the boundary operators and mass matrices as flat binaries.
    OperatorDump(Args),
}

#[derive(clap::Args)]
struct Args {
    /// Run config (JSON).
    config: PathBuf,
    /// Overrides `output_dir` from the config.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("{}", e.to_json());
        return ExitCode::from(e.exit_code() as u8);
    }
    let (cmd, args) = match cli.command {
        Sub::Solve(a) => (Command::Solve, a),
        Sub::Verify(a) => (Command::Verify, a),
        Sub::MeasureStudy(a) => (Command::MeasureStudy, a),
        Sub::OperatorDump(a) => (Command::OperatorDump, a),
    };
    let code = run(cmd, &args.config, args.out.as_deref(), cli.verbose);
    ExitCode::from(code as u8)
}
