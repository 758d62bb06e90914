//! Run directory writer. Every file carries the config hash, the resolved
//! configuration and the tool version; `report.json` indexes them.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use sinegordon_core::checks::SuiteResult;
use sinegordon_core::io::{with_comments, write_atomic, write_json};

use crate::config::{hex, RunConfig};

pub const TOOL: &str = "sglab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_hash: String,
    pub config: Value,
}

pub struct RunOutput {
    dir: PathBuf,
    provenance: Provenance,
    files: Vec<FileEntry>,
}

impl RunOutput {
    pub fn new(config: &RunConfig) -> Result<Self> {
        std::fs::create_dir_all(&config.out)
            .with_context(|| format!("creating {}", config.out.display()))?;
        Ok(Self {
            dir: config.out.clone(),
            provenance: Provenance {
                tool: TOOL,
                version: VERSION,
                config_hash: config.hash(),
                config: serde_json::to_value(config)?,
            },
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    fn record(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        write_atomic(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(FileEntry {
            name: name.to_string(),
            sha256: hex(&Sha256::digest(bytes)),
        });
        Ok(())
    }

    /// CSV body prefixed with `#` provenance lines.
    pub fn csv(&mut self, name: &str, body: Vec<u8>) -> Result<()> {
        let p = &self.provenance;
        let comments = [
            format!(
                "tool={} version={} config_hash={}",
                p.tool, p.version, p.config_hash
            ),
            format!("config={}", serde_json::to_string(&p.config)?),
        ];
        let bytes = with_comments(&comments, body);
        self.record(name, &bytes)
    }

    /// `{"provenance": ..., "data": ...}`.
    pub fn json<T: Serialize>(&mut self, name: &str, data: &T) -> Result<()> {
        let doc = json!({ "provenance": self.provenance, "data": data });
        let mut bytes = serde_json::to_vec_pretty(&doc)?;
        bytes.push(b'\n');
        self.record(name, &bytes)
    }

    /// Write `report.json` and return it.
    pub fn finish(self, command: &str, checks: Vec<SuiteResult>, summary: Value) -> Result<Report> {
        let report = Report {
            passed: checks.iter().all(|c| c.passed),
            provenance: self.provenance,
            command: command.to_string(),
            checks,
            summary,
            files: self.files,
        };
        write_json(&self.dir.join("report.json"), &report)?;
        Ok(report)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub provenance: Provenance,
    pub command: String,
    pub passed: bool,
    pub checks: Vec<SuiteResult>,
    pub summary: Value,
    pub files: Vec<FileEntry>,
}
