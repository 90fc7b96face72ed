//! Configuration-driven experiment runner with JSON reports, CSV tables and
//! SVG plots.

mod config;
mod plots;
mod runner;

pub use config::{eps_mode, ExperimentKind, InitialData, RunConfig, Tolerances, SCHEMA_VERSION};
pub use plots::{emit_plots, read_csv, LineChart, Scale, Series};
pub use runner::run;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),
    #[error("failing checks: {}", .0.join(", "))]
    CheckFailure(Vec<String>),
    #[error("missing data: {0}")]
    MissingData(String),
    #[error(transparent)]
    Compute(#[from] crate::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ExperimentError {
    /// 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub passed: bool,
    /// Recorded for the report only; does not affect the exit status.
    pub informational: bool,
}

impl Check {
    /// Passes when `measured <= threshold`.
    pub fn at_most(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            threshold,
            passed: measured <= threshold,
            informational: false,
        }
    }

    /// Passes when `measured >= threshold`.
    pub fn at_least(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            threshold,
            passed: measured >= threshold,
            informational: false,
        }
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub config_sha256: String,
    pub crate_version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub fingerprint: Fingerprint,
    /// Paths relative to the output directory.
    pub artifacts: Vec<String>,
}

impl RunReport {
    pub fn failing(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.passed && !c.informational)
            .map(|c| c.name.clone())
            .collect()
    }

    /// `Ok` when every non-informational check passed.
    pub fn into_result(self) -> Result<Self, ExperimentError> {
        let failing = self.failing();
        if failing.is_empty() {
            Ok(self)
        } else {
            Err(ExperimentError::CheckFailure(failing))
        }
    }
}

pub fn fingerprint(cfg: &RunConfig) -> Fingerprint {
    let bytes = serde_json::to_vec(cfg).expect("config serializes");
    let digest = Sha256::digest(&bytes);
    let config_sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
    Fingerprint {
        config_sha256,
        crate_version: env!("CARGO_PKG_VERSION").into(),
    }
}

/// Collects artifact files written under one directory.
pub(crate) struct Output {
    dir: PathBuf,
    artifacts: Vec<String>,
}

impl Output {
    fn new(dir: &Path) -> Result<Self, ExperimentError> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            artifacts: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), ExperimentError> {
        std::fs::write(self.dir.join(name), contents)?;
        self.artifacts.push(name.to_owned());
        Ok(())
    }

    fn write_json(&mut self, name: &str, value: &serde_json::Value) -> Result<(), ExperimentError> {
        let mut text = serde_json::to_string_pretty(value).expect("json value serializes");
        text.push('\n');
        self.write(name, &text)
    }

    fn plots(&mut self) -> Result<(), ExperimentError> {
        for path in emit_plots(&self.dir)? {
            let name = path
                .file_name()
                .expect("plot file name")
                .to_string_lossy()
                .into_owned();
            self.artifacts.push(name);
        }
        Ok(())
    }
}
