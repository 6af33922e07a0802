use std::path::PathBuf;
use std::process::ExitCode;

use bandit_bounds_cli::{run, Command, Options};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bandit-bounds", version, about = "Stochastic bandit simulations checked against analytic regret bounds")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Monte Carlo runs of every configured policy; writes stats_<i>.csv and run.json.
    Simulate(Args),
    /// Simulates the policy matching the `verify` bound and checks it.
    Verify(Args),
    /// Evaluates the requested bound curves on the checkpoint grid.
    Curves(Args),
    /// Log-log growth exponent of mean regret.
    Exponent(Args),
}

#[derive(clap::Args)]
struct Args {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Simulate(a) => (Command::Simulate, a),
        Cmd::Verify(a) => (Command::Verify, a),
        Cmd::Curves(a) => (Command::Curves, a),
        Cmd::Exponent(a) => (Command::Exponent, a),
    };
    let opts = Options {
        command,
        config: args.config,
        out: args.out,
        threads: args.threads,
        seed: args.seed,
    };
    match run(&opts) {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
