mod args;
mod commands;
mod error;
mod manifest;
mod output;
mod svg;

use std::process::ExitCode;

use clap::Parser;
use rqeom::parallel::{with_thread_cap, Parallelism};

use args::{Cli, Command};
use error::CliError;
use manifest::RunManifest;

fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var("RQEOM_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("RQEOM_THREADS must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(None),
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    let par = Parallelism::default();
    let manifest = match command {
        Command::Count(a) => {
            print!("{}", commands::count(&a));
            return Ok(());
        }
        Command::Replay(a) => return replay(&a.file, par),
        Command::Bands(a) => commands::bands_manifest(&a)?,
        Command::EtaSweep(a) => commands::eta_sweep_manifest(&a)?,
        Command::Trials(a) => commands::trials_manifest(&a)?,
    };
    commands::write_artifacts(&commands::execute(&manifest, par)?)
}

/// Re-executes the embedded manifest; the artifact at the file's own path
/// (or the first one) must match byte for byte.
fn replay(file: &std::path::Path, par: Parallelism) -> Result<(), CliError> {
    let content = std::fs::read_to_string(file).map_err(|e| CliError::Config(format!("reading {}: {e}", file.display())))?;
    let manifest = RunManifest::extract(&content).map_err(CliError::Config)?;
    let artifacts = commands::execute(&manifest, par)?;
    let name = file.display().to_string();
    let fresh = artifacts
        .iter()
        .find(|a| a.path.as_deref() == Some(&name))
        .or_else(|| artifacts.iter().find(|a| content.starts_with(a.content.lines().next().unwrap_or_default())))
        .ok_or_else(|| CliError::Config("replay produced no matching output".into()))?;
    if fresh.content == content {
        println!("replay of {name}: identical ({} bytes)", content.len());
        Ok(())
    } else {
        Err(CliError::Config(format!("replay of {name}: output differs")))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = thread_cap().and_then(|cap| with_thread_cap(cap, || dispatch(cli.command)));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
