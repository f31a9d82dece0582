#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod manifest;

use std::fs;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, ReplayArgs};
use commands::{CliError, Outcome};
use manifest::{manifest_path, redirect, sha256_file, RunManifest};

fn dispatch(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Generate(a) => commands::generate(a),
        Command::Solve(a) => commands::solve(a),
        Command::Analyze(a) => commands::analyze_cmd(a),
        Command::Render(a) => commands::render(a),
        Command::Mc(a) => commands::mc(a),
        Command::Replay(a) => replay(a),
    }
}

fn run_recorded(cmd: &Command) -> Result<(), CliError> {
    let outcome = dispatch(cmd)?;
    if let Some(path) = manifest_path(cmd) {
        let m = RunManifest::new(cmd, &outcome)?;
        fs::write(&path, lilypond::io::to_json(&m))
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn replay(a: &ReplayArgs) -> Result<Outcome, CliError> {
    let text =
        fs::read_to_string(&a.manifest).map_err(|e| CliError::Validation(format!("{}: {e}", a.manifest.display())))?;
    let recorded: RunManifest =
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("malformed manifest: {e}")))?;
    for input in &recorded.inputs {
        if sha256_file(&input.path)? != input.sha256 {
            return Err(CliError::Validation(format!(
                "input {} changed since the manifest was written",
                input.path.display()
            )));
        }
    }
    let mut cmd = recorded.invocation.clone();
    if let Some(dir) = &a.out_dir {
        fs::create_dir_all(dir).map_err(|e| CliError::Validation(format!("{}: {e}", dir.display())))?;
        redirect(&mut cmd, dir);
    }
    let outcome = dispatch(&cmd)?;
    if outcome.outputs.len() != recorded.outputs.len() {
        return Err(CliError::Internal(format!(
            "replay wrote {} files, manifest lists {}",
            outcome.outputs.len(),
            recorded.outputs.len()
        )));
    }
    for (path, want) in outcome.outputs.iter().zip(&recorded.outputs) {
        if sha256_file(path)? != want.sha256 {
            return Err(CliError::Internal(format!(
                "{} differs from recorded {}",
                path.display(),
                want.path.display()
            )));
        }
    }
    eprintln!("replay: {} output file(s) identical", outcome.outputs.len());
    Ok(outcome)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run_recorded(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
