//! Run manifests: the invocation, its seeds and the hashes of every file it
//! read or wrote, enough to replay the run and check the outputs.

use std::fs;
use std::path::{Path, PathBuf};

use lilypond::stats::config_hash;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::args::Command;
use crate::commands::{CliError, Outcome};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact_version: String,
    pub invocation: Command,
    pub seeds: Vec<u64>,
    pub config_hash: String,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

fn digests(paths: &[PathBuf]) -> Result<Vec<FileDigest>, CliError> {
    paths
        .iter()
        .map(|p| {
            Ok(FileDigest {
                path: p.clone(),
                sha256: sha256_file(p)?,
            })
        })
        .collect()
}

impl RunManifest {
    pub fn new(invocation: &Command, outcome: &Outcome) -> Result<Self, CliError> {
        Ok(RunManifest {
            artifact_version: env!("CARGO_PKG_VERSION").to_owned(),
            invocation: invocation.clone(),
            seeds: outcome.seeds.clone(),
            config_hash: config_hash(invocation),
            inputs: digests(&outcome.inputs)?,
            outputs: digests(&outcome.outputs)?,
        })
    }
}

/// `<out>.manifest.json` for single-file commands, `<out-dir>/manifest.json` for `mc`.
/// `None` when the output went to standard output.
pub fn manifest_path(invocation: &Command) -> Option<PathBuf> {
    let with_suffix = |p: &Path| {
        let mut s = p.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    };
    match invocation {
        Command::Generate(a) => a.out.as_deref().map(with_suffix),
        Command::Solve(a) => a.out.as_deref().map(with_suffix),
        Command::Analyze(a) => a.out.as_deref().map(with_suffix),
        Command::Render(a) => a.out.as_deref().map(with_suffix),
        Command::Mc(a) => Some(a.out_dir.join("manifest.json")),
        Command::Replay(_) => None,
    }
}

/// Points every output of `invocation` into `dir`, keeping file names.
pub fn redirect(invocation: &mut Command, dir: &Path) {
    let move_into = |p: &mut Option<PathBuf>| {
        if let Some(path) = p {
            *path = dir.join(path.file_name().expect("output paths name a file"));
        }
    };
    match invocation {
        Command::Generate(a) => move_into(&mut a.out),
        Command::Solve(a) => move_into(&mut a.out),
        Command::Analyze(a) => move_into(&mut a.out),
        Command::Render(a) => move_into(&mut a.out),
        Command::Mc(a) => a.out_dir = dir.to_path_buf(),
        Command::Replay(_) => {}
    }
}
