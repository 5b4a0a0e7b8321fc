use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use reldyn_cli::{exit, Analysis, RunOptions};

#[derive(Parser)]
#[command(name = "reldyn", version, about = "Dynamics of relations, semiflows and hybrid systems on grids")]
struct Cli {
    /// Spec file (TOML).
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Directory for the report and auxiliary files.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Single eps replacing the spec's ladder.
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Run the analyses listed in the spec.
    Analyze,
    /// Chain recurrence over the eps ladder.
    Chain,
    /// Morse graph and attractor-repeller pairs.
    Morse,
    /// Complete Lyapunov function.
    Lyapunov,
    /// Isolation checks and index pair of the spec's region.
    Index,
    /// Anomalous perturbation of the spec's region.
    Perturb,
    /// Hybrid system checks.
    Hybrid,
    /// Path enumeration.
    Paths,
}

impl Command {
    fn analyses(self) -> Option<Vec<Analysis>> {
        use Analysis::*;
        match self {
            Command::Analyze => None,
            Command::Chain => Some(vec![Chain]),
            Command::Morse => Some(vec![Morse]),
            Command::Lyapunov => Some(vec![Lyapunov]),
            Command::Index => Some(vec![Conley]),
            Command::Perturb => Some(vec![Perturb]),
            Command::Hybrid => Some(vec![Hybrid]),
            Command::Paths => Some(vec![Paths]),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(spec) = cli.spec else {
        eprintln!("error: --spec is required");
        return ExitCode::from(exit::INPUT as u8);
    };
    let opts = RunOptions { analyses: cli.command.analyses(), eps: cli.eps, seed: cli.seed };
    match reldyn_cli::execute(&spec, &cli.out_dir, &opts) {
        Ok((out, code)) => {
            for f in &out.report.failures {
                eprintln!("verification failure in {}: {}", f.analysis, f.message);
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit::INPUT as u8)
        }
    }
}
