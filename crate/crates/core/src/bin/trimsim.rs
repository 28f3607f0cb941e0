use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use trimsim::harness::{self, Scenario, SweepAxis};

#[derive(Parser)]
#[command(name = "trimsim", version, about = "Switch packet-trimming simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario and write its output files.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a scenario along one axis: n_senders, response_duration or variant.
    Sweep {
        #[arg(long)]
        axis: SweepAxis,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare the counters of two run directories.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("trimsim: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> trimsim::Result<()> {
    match cli.cmd {
        Cmd::Run { config, out } => {
            let mut scenario = Scenario::load(&config)?;
            scenario.record_queues = true;
            let store = harness::run_scenario(&scenario)?;
            for p in harness::write_run(&store, &out)? {
                println!("{}", p.display());
            }
        }
        Cmd::Sweep { axis, config, out } => {
            let base = Scenario::load(&config)?;
            let points = harness::sweep(axis, &base)?;
            println!("{}", harness::write_sweep(axis, &points, &out)?.display());
        }
        Cmd::Compare { a, b } => print!("{}", harness::compare(&a, &b)?),
    }
    Ok(())
}
