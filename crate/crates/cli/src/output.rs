use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use aqc::sweep::ScalingSummary;
use serde::{Deserialize, Serialize};

/// Echo of everything that determines an output, written into every file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub version: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverEcho>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<String>,
    pub out: String,
    pub caps: Caps,
}

impl ExperimentConfig {
    pub fn new(command: &str, out: &Path) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            n: Vec::new(),
            count: None,
            seed: None,
            grid_step: None,
            block: None,
            solver: None,
            jobs: None,
            verify: None,
            inputs: Vec::new(),
            out: out.display().to_string(),
            caps: Caps::default(),
        }
    }

    pub fn header_line(&self) -> anyhow::Result<String> {
        Ok(format!("# config: {}", serde_json::to_string(self)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverEcho {
    pub tol: f64,
    pub max_krylov: usize,
    pub max_restarts: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Caps {
    pub state_vector: usize,
    pub dense: usize,
    pub brute_force: usize,
    pub density_block: usize,
    pub grover_closed_form: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            state_vector: aqc::STATE_VECTOR_CAP,
            dense: aqc::DENSE_CAP,
            brute_force: aqc::instances::BRUTE_FORCE_CAP,
            density_block: aqc::entanglement::DENSITY_BLOCK_CAP,
            grover_closed_form: aqc::grover::CLOSED_FORM_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub n: usize,
    pub instance_id: u64,
    pub error: String,
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryFile {
    pub config: ExperimentConfig,
    pub scaling: ScalingSummary,
    pub failures: Vec<Failure>,
}

/// Twelve significant digits.
pub fn float(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn ensure_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// CSV file with a config comment line and a header row.
pub struct CsvWriter {
    path: PathBuf,
    inner: BufWriter<fs::File>,
}

impl CsvWriter {
    pub fn create(path: &Path, config: &ExperimentConfig, header: &str) -> anyhow::Result<Self> {
        let file =
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut inner = BufWriter::new(file);
        writeln!(inner, "{}", config.header_line()?)?;
        writeln!(inner, "{header}")?;
        Ok(Self {
            path: path.to_path_buf(),
            inner,
        })
    }

    pub fn row(&mut self, fields: &[String]) -> anyhow::Result<()> {
        writeln!(self.inner, "{}", fields.join(","))
            .with_context(|| format!("writing {}", self.path.display()))
    }

    pub fn finish(mut self) -> anyhow::Result<()> {
        self.inner
            .flush()
            .with_context(|| format!("writing {}", self.path.display()))
    }
}
