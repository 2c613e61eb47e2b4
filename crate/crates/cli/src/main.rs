use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stqm::config::{Scenario, ScenarioConfig};
use stqm::error::CliError;
use stqm::scenario::{run_arrival, run_bayes_demo, run_stationary};
use stqm::verify::{render_table, run_all, Options};
use stqm_core::spectral::SqrtBranch;

#[derive(Parser)]
#[command(name = "stqm", version, about = "Space-time quantum arrival and detection calculations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Scenario file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path, overriding the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Arrival-time density ρ(t|x) of a free Gaussian packet.
    Arrival(RunArgs),
    /// Lorentzian energy profile under Poisson detection.
    Stationary(RunArgs),
    /// Joint detection density, conditionals and seeded Monte Carlo events.
    BayesDemo(RunArgs),
    /// Runs the acceptance checks and prints a table.
    Verify {
        /// Use the conjugate branch of √(-iw).
        #[arg(long, hide = true)]
        perturb_branch: bool,
    },
}

fn load(args: &RunArgs, scenario: Scenario) -> Result<ScenarioConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            ScenarioConfig::parse(&text, scenario)?
        }
        None => ScenarioConfig::defaults(scenario),
    };
    if cfg.scenario != scenario {
        return Err(CliError::Config(format!(
            "config describes scenario '{}', not '{}'",
            cfg.scenario.name(),
            scenario.name()
        )));
    }
    if let Some(out) = &args.out {
        cfg.output = out.to_string_lossy().into_owned();
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Arrival(a) => print!("{}", run_arrival(&load(&a, Scenario::Arrival)?)?),
        Command::Stationary(a) => print!("{}", run_stationary(&load(&a, Scenario::Stationary)?)?),
        Command::BayesDemo(a) => print!("{}", run_bayes_demo(&load(&a, Scenario::BayesDemo)?)?),
        Command::Verify { perturb_branch } => {
            let sqrt_branch = if perturb_branch { SqrtBranch::Conjugate } else { SqrtBranch::Principal };
            let results = run_all(&Options { sqrt_branch });
            print!("{}", render_table(&results));
            return Ok(results.iter().all(|r| r.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("stqm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
