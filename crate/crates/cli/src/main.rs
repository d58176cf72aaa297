mod args;
mod commands;
mod config;
mod error;
mod lists;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::config::{read_config_file, resolve, GlobalOverrides};
use crate::error::{CliError, EXIT_USAGE};

fn manifest_path(cli: &Cli) -> Option<PathBuf> {
    cli.manifest.clone().or_else(|| {
        cli.output.as_ref().map(|o| {
            let mut s = o.clone().into_os_string();
            s.push(".manifest.json");
            PathBuf::from(s)
        })
    })
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let file = cli.config.as_deref().map(read_config_file).transpose()?;
    let globals = GlobalOverrides { format: cli.format, seed: cli.seed };
    let manifest_path = manifest_path(&cli);
    let config = resolve(cli.command, file.as_ref(), globals)?;

    let outcome = match cli.workers {
        Some(0) => return Err(CliError::Usage("--workers must be at least 1".into())),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {w} workers: {e}")))?
            .install(|| commands::run(&config))?,
        None => commands::run(&config)?,
    };

    let data = outcome.table.render(config.format());
    match &cli.output {
        Some(path) => std::fs::write(path, &data)?,
        None => std::io::stdout().lock().write_all(&data)?,
    }
    let manifest = config.manifest();
    match manifest_path {
        Some(path) => std::fs::write(path, manifest)?,
        None => std::io::stderr().lock().write_all(manifest.as_bytes())?,
    }
    if outcome.failures > 0 {
        return Err(CliError::ValidationFailed(outcome.failures));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("confnet: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
