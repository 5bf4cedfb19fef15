use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::settings::Resolved;
use crate::CliError;

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// Provenance record written into every output directory. It carries no
/// timestamps or absolute output paths, so identical runs produce
/// identical manifests.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub config: Resolved,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub summary: serde_json::Value,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn digest_file(path: &Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

/// Collects a run's inputs and outputs, then writes the manifest.
pub struct Run {
    command: String,
    config: Resolved,
    out_dir: PathBuf,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
}

impl Run {
    pub fn start(command: &str, config: &Resolved, out_dir: &Path) -> Result<Run, CliError> {
        std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
        Ok(Run {
            command: command.to_string(),
            config: config.clone(),
            out_dir: out_dir.to_path_buf(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        })
    }

    pub fn input(&mut self, path: &Path) -> Result<(), CliError> {
        self.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: digest_file(path)?,
        });
        Ok(())
    }

    /// Write `bytes` to `name` inside the output directory.
    pub fn output(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.out_dir.join(name);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.outputs.push(FileDigest {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    pub fn finish(self, summary: serde_json::Value) -> Result<PathBuf, CliError> {
        let manifest = RunManifest {
            tool: "clutterbench",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command,
            seed: self.config.generator.seed,
            config: self.config,
            inputs: self.inputs,
            outputs: self.outputs,
            summary,
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        let path = self.out_dir.join(MANIFEST_NAME);
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}
