mod commands;
mod config;
mod report;

use std::process::ExitCode;

use abdisp_core::Error;
use clap::Parser;

use config::{Cli, RunConfig};

/// Exit status for a violated spectral assumption.
const ASSUMPTION_VIOLATED: u8 = 2;

fn run(cli: &Cli) -> anyhow::Result<()> {
    let cfg = RunConfig::from_command(&cli.command)?;
    if let Some(j) = cfg.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global()?;
    }
    let summary = commands::run(&cfg)?;
    print!("{}", summary.text());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("abdisp: {e:#}");
            let violated = e.chain().any(|c| matches!(c.downcast_ref::<Error>(), Some(Error::Resonance { .. })));
            ExitCode::from(if violated { ASSUMPTION_VIOLATED } else { 1 })
        }
    }
}
