mod config;
mod run;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use config::{Args, Plan};

/// Caps rayon's worker count from `BASINFORGE_THREADS`.
fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("BASINFORGE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .with_context(|| format!("BASINFORGE_THREADS: bad value `{v}`"))?;
    anyhow::ensure!(n >= 1, "BASINFORGE_THREADS must be at least 1");
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = init_threads()
        .and_then(|()| Plan::resolve(args))
        .and_then(|plan| run::execute(&plan));
    match outcome {
        Ok(0) => ExitCode::SUCCESS,
        Ok(failed) => {
            eprintln!("error: {failed} run(s) failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
