use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pco_cli::{execute, load_config, Command, ExperimentSpec, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_OK};

#[derive(Parser)]
#[command(name = "pco", version, about = "Pulse-coupled oscillator experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Simulate one configuration and write its range series.
    Run,
    /// Convergence fractions over a swept parameter.
    Sweep,
    /// Monte Carlo estimate of the convergence fraction.
    Basin,
    /// Compare the engine with the closed-form maps.
    OracleCheck,
    /// Basin comparison on the binary tree with a triangle.
    Figure2,
    /// Sync-error series on a random geometric graph.
    Figure3,
    /// Write the configured graph as an edge list.
    GenGraph,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Command {
        match c {
            Cmd::Run => Command::Run,
            Cmd::Sweep => Command::Sweep,
            Cmd::Basin => Command::Basin,
            Cmd::OracleCheck => Command::OracleCheck,
            Cmd::Figure2 => Command::Figure2,
            Cmd::Figure3 => Command::Figure3,
            Cmd::GenGraph => Command::GenGraph,
        }
    }
}

/// Flags win over the config file.
#[derive(Args)]
struct Flags {
    /// Experiment config (TOML).
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(short, long, global = true)]
    out: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Propagation delay.
    #[arg(long, global = true)]
    tau: Option<f64>,
    /// Simulated time per run.
    #[arg(long, global = true)]
    horizon: Option<f64>,
    /// Range below which a run counts as synchronised.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Trials for basin, sweep and figure2; cases for oracle-check.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Worker threads, 0 for one per core. Outputs do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Delay error given to the maps only, as a negative control.
    #[arg(long, global = true)]
    corrupt_tau: Option<f64>,
}

impl Flags {
    fn apply(&self, spec: &mut ExperimentSpec) {
        if let Some(o) = &self.out {
            spec.output_dir = o.clone();
        }
        if let Some(s) = self.seed {
            spec.seed = s;
        }
        if let Some(t) = self.tau {
            spec.tau = t;
        }
        if let Some(h) = self.horizon {
            spec.horizon = h;
        }
        if let Some(t) = self.tolerance {
            spec.tolerance = t;
        }
        if let Some(t) = self.trials {
            spec.basin.trials = t;
            spec.figure2.trials = t;
            spec.oracle.cases = t;
            if let Some(sw) = spec.sweep.as_mut() {
                sw.trials = t;
            }
        }
        if let Some(t) = self.threads {
            spec.threads = t;
        }
        if let Some(c) = self.corrupt_tau {
            spec.oracle.corrupt_tau = c;
        }
    }
}

fn run(cli: Cli) -> Result<i32, (i32, String)> {
    let config = (cli.flags.config.as_ref()).ok_or((EXIT_CONFIG, "missing --config <FILE>".to_string()))?;
    let fail = |code: i32| move |e: &dyn std::fmt::Display| (code, e.to_string());
    let mut spec = load_config(config).map_err(|e| fail(EXIT_CONFIG)(&e))?;
    cli.flags.apply(&mut spec);
    let text = std::fs::read_to_string(config).unwrap_or_default();
    spec.validate(&text).map_err(|e| fail(EXIT_CONFIG)(&e))?;
    if spec.threads > 0 {
        // only fails when a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(spec.threads).build_global();
    }

    let command: Command = cli.command.into();
    let outcome = execute(command, &spec).map_err(|e| (e.exit_code(), e.to_string()))?;
    outcome
        .artifacts
        .write(&spec.output_dir, command, &spec)
        .map_err(|e| (e.exit_code(), e.to_string()))?;
    println!("{}", outcome.summary);
    Ok(if outcome.passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code as u8)
        }
    }
}
