use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;
use tfd_core::cli::{execute, exit_code, RunKind};

#[derive(Parser)]
#[command(name = "tfd", version, about = "Thermo field dynamics scenarios on truncated Fock spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed of the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the superoperator algebra and thermal-vacuum conditions.
    VerifyAlgebra(RunArgs),
    /// Evolve a state under the unperturbed super-Hamiltonian.
    Evolve(RunArgs),
    /// Compare closed-form and directly propagated two-point functions.
    Propagators(RunArgs),
    /// Relax occupations with the transport equation.
    Transport(RunArgs),
    /// Compare renormalization conditions at equilibrium.
    RenormCompare(RunArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::VerifyAlgebra(a) => (RunKind::VerifyAlgebra, a),
        Command::Evolve(a) => (RunKind::Evolve, a),
        Command::Propagators(a) => (RunKind::Propagators, a),
        Command::Transport(a) => (RunKind::Transport, a),
        Command::RenormCompare(a) => (RunKind::RenormCompare, a),
    };
    let start = Instant::now();
    let code = match execute(kind, &args.config, &args.out, args.seed, |v| std::env::var(v).ok()) {
        Ok(ex) => {
            for c in ex.output.checks.iter().filter(|c| !c.passed()) {
                eprintln!("check failed: {} residual {:e} threshold {:e}", c.name, c.residual, c.threshold);
            }
            eprintln!(
                "{kind}: {} checks, {} failed, config {}",
                ex.output.checks.len(),
                ex.output.checks.iter().filter(|c| !c.passed()).count(),
                ex.config_hash
            );
            ex.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    ExitCode::from(code as u8)
}
