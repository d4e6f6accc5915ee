use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use defect_charges::ParamValues;

#[derive(Debug, Serialize)]
pub struct OutputFile {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub config_digest: String,
    pub params: ParamValues,
    pub tool_version: &'static str,
    pub started: String,
    pub finished: String,
    pub outputs: Vec<OutputFile>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

impl RunManifest {
    pub fn new(config_digest: String, params: ParamValues, started: String) -> Self {
        RunManifest {
            command: std::env::args().collect(),
            config_digest,
            params,
            tool_version: env!("CARGO_PKG_VERSION"),
            started,
            finished: String::new(),
            outputs: Vec::new(),
        }
    }

    pub fn add(&mut self, path: &Path) -> std::io::Result<()> {
        let bytes = std::fs::read(path)?;
        self.outputs.push(OutputFile { path: path.to_path_buf(), sha256: sha256_hex(&bytes) });
        Ok(())
    }

    /// Writes `manifest.json` into `dir` and returns its path.
    pub fn finish(mut self, dir: &Path) -> std::io::Result<PathBuf> {
        self.finished = now();
        let path = dir.join("manifest.json");
        let body = serde_json::to_string_pretty(&self).map_err(std::io::Error::other)?;
        std::fs::write(&path, body + "\n")?;
        Ok(path)
    }
}
