use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use driftwave::scenario::{parse_config, run, ScenarioConfig};

const DEFAULT_OUT: &str = "driftwave-out";

/// Operator identity checks and drift-wave simulations driven by scenario files.
#[derive(Parser)]
#[command(name = "driftwave", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verify_operators or verify_calculus scenario.
    Verify(RunArgs),
    /// Run a simulate_manifold or simulate_cartesian scenario.
    Simulate(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the scenario file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; defaults to `output` from the scenario, then `driftwave-out`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, verify) = match &cli.command {
        Command::Verify(a) => (a, true),
        Command::Simulate(a) => (a, false),
    };
    let mut cfg: ScenarioConfig = match parse_config(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if cfg.mode.is_verify() != verify {
        let want = if cfg.mode.is_verify() { "verify" } else { "simulate" };
        eprintln!("error: mode {} must be run with `driftwave {want}`", cfg.mode.as_str());
        return ExitCode::from(2);
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let out = args.out.clone().or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    match run(&cfg, &out) {
        Ok(outcome) => {
            // a closed stdout (e.g. piped into `head`) must not turn into a panic
            let mut stdout = std::io::stdout().lock();
            let _ = write!(stdout, "{}", outcome.report.to_text());
            for a in &outcome.artifacts {
                let _ = writeln!(stdout, "wrote {}", a.display());
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
