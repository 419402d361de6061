mod config;
mod run;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use config::{Cli, RunConfig, UsageError};

const USAGE_EXIT: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE_EXIT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(USAGE_EXIT)
        }
    }
}

fn execute(cli: Cli) -> Result<u8, UsageError> {
    let cfg = RunConfig::resolve(cli)?;
    let outcome = match cfg.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| UsageError::new(format!("--jobs: {e}")))?
            .install(|| run::run(&cfg))?,
        None => run::run(&cfg)?,
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, &outcome.body)
            .map_err(|e| UsageError::new(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(outcome.body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| UsageError::new(format!("stdout: {e}")))?;
        }
    }
    eprintln!("{}", outcome.summary);
    Ok(outcome.status.exit_code() as u8)
}
