//! Provenance record written next to every command's outputs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

use super::config::PipelineConfig;

pub const MANIFEST_NAME: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// Holds no timestamps or absolute output paths, so identical runs write identical manifests.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub config_sha256: String,
    pub inputs: Vec<FileDigest>,
    /// Paths relative to the output directory.
    pub outputs: Vec<FileDigest>,
}

/// Output directory plus the digests gathered while a command runs.
#[derive(Debug)]
pub struct Run {
    pub config: PipelineConfig,
    pub out_dir: PathBuf,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
}

impl Run {
    pub fn new(config: PipelineConfig, out_dir: &Path) -> Result<Self> {
        config.validate()?;
        std::fs::create_dir_all(out_dir)?;
        Ok(Run { config, out_dir: out_dir.to_path_buf(), inputs: Vec::new(), outputs: Vec::new() })
    }

    /// Reads an input file and records its digest.
    pub fn input(&mut self, path: &Path) -> Result<Vec<u8>> {
        let bytes = std::fs::read(path)
            .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
        self.inputs.push(FileDigest { path: path.display().to_string(), sha256: sha256_hex(&bytes) });
        Ok(bytes)
    }

    pub fn input_text(&mut self, path: &Path) -> Result<String> {
        let bytes = self.input(path)?;
        String::from_utf8(bytes).map_err(|e| {
            crate::Error::Io(std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{}: {e}", path.display())))
        })
    }

    /// Writes `bytes` to `name` under the output directory.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.out_dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, bytes)?;
        self.outputs.push(FileDigest { path: name.to_string(), sha256: sha256_hex(bytes) });
        Ok(path)
    }

    /// Writes the manifest and returns it.
    pub fn finish(self, command: &str) -> Result<RunManifest> {
        let manifest = RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: self.config.seed,
            config_sha256: sha256_hex(self.config.to_json()?.as_bytes()),
            inputs: self.inputs,
            outputs: self.outputs,
        };
        std::fs::write(self.out_dir.join(MANIFEST_NAME), serde_json::to_string_pretty(&manifest)? + "\n")?;
        Ok(manifest)
    }
}
