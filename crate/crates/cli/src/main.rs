use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use seirs_delay::sweep::SweepAxis;
use seirs_delay::Execution;
use seirs_delay_cli::{artifact, run_analyze, run_simulate, run_sweep, run_validate, RunOptions};

#[derive(Parser)]
#[command(name = "seirs-delay", version, about = "Delayed SEIRS malaria model: analysis, simulation and sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reproduction numbers, extinction regime, endemic equilibrium, permanence bounds.
    Analyze(Common),
    /// Integrate the delay system and check the trajectory against the analysis.
    Simulate(Common),
    /// Check the incidence function against the axioms.
    Validate(Common),
    /// Analyse a one-parameter family of scenarios.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Axis as key:lo:hi:n.
        #[arg(long = "sweep", value_name = "KEY:LO:HI:N")]
        axis: String,
        /// Run the points on the calling thread.
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario file with `key = value` lines.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override one key; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    /// Keep every n-th step in trajectory.csv.
    #[arg(long)]
    stride: Option<usize>,
}

impl From<Common> for RunOptions {
    fn from(c: Common) -> Self {
        RunOptions {
            config: c.config,
            overrides: c.overrides,
            out: c.out,
            dt: c.dt,
            t_end: c.t_end,
            stride: c.stride,
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze(common) => {
            let opts = RunOptions::from(common);
            let report = run_analyze(&opts)?;
            print!("{}", report.to_text());
            println!("wrote {}", artifact(&opts.out, "report.kv"));
        }
        Command::Simulate(common) => {
            let opts = RunOptions::from(common);
            let run = run_simulate(&opts)?;
            let last = run.trajectory.last();
            println!("t = {}: S = {}, E = {}, I = {}, R = {}", run.trajectory.t_end(), last.s, last.e, last.i, last.r);
            print!("{}", run.checks);
            if run.checks.get("outcome").is_none() {
                println!("no analytic expectation for the outcome: regime {} without permanence bounds", run.analysis.regime);
            }
            if !run.trajectory.events.is_empty() {
                println!("{} events, see {}", run.trajectory.events.len(), artifact(&opts.out, "events.log"));
            }
            println!("wrote {}", artifact(&opts.out, "trajectory.csv"));
        }
        Command::Validate(common) => {
            let opts = RunOptions::from(common);
            print!("{}", run_validate(&opts)?);
        }
        Command::Sweep { common, axis, sequential } => {
            let opts = RunOptions::from(common);
            let axis = SweepAxis::parse(&axis)?;
            let exec = if sequential { Execution::Sequential } else { Execution::Parallel };
            let rows = run_sweep(&opts, &axis, exec)?;
            let failed = rows.iter().filter(|r| r.result.is_err()).count();
            println!("{} points, {failed} failed; wrote {}", rows.len(), artifact(&opts.out, "sweep.csv"));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
