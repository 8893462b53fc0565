use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "aqc",
    version,
    about = "Adiabatic ground-state entanglement experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate Exact Cover instances with a unique solution.
    Generate(GenerateArgs),
    /// Sweep ensembles along s and write per-point CSV plus a summary.
    Sweep(SweepArgs),
    /// Closed-form Grover gap and entropy scan.
    Grover(GroverArgs),
    /// Scaling fits over one or more sweep summaries.
    Fit(FitArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SizeArgs {
    /// Single qubit count.
    #[arg(long, conflicts_with = "n_range")]
    pub n: Option<usize>,
    /// Inclusive range A:B:STEP, e.g. 6:14:2.
    #[arg(long, value_name = "A:B:STEP")]
    pub n_range: Option<String>,
}

impl SizeArgs {
    pub fn sizes(&self) -> anyhow::Result<Vec<usize>> {
        match (&self.n, &self.n_range) {
            (Some(n), None) => Ok(vec![*n]),
            (None, Some(r)) => parse_range(r),
            _ => bail!("one of --n or --n-range is required"),
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub size: SizeArgs,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub size: SizeArgs,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Grid step on [0, 1]; 1/step must be an integer.
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    /// Block A of the bipartition: `first:K` or a comma list of qubits.
    /// Defaults to the first ceil(n/2) qubits.
    #[arg(long)]
    pub block: Option<String>,
    /// Eigensolver residual tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GroverArgs {
    #[command(flatten)]
    pub size: SizeArgs,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    /// Block size: `first:K`, `K`, or a comma list whose length is used.
    /// Defaults to floor(n/2).
    #[arg(long)]
    pub block: Option<String>,
    /// Cross-check against dense diagonalization (n <= 12).
    #[arg(long)]
    pub verify: bool,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Summary JSON files written by `sweep`.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

pub fn parse_range(spec: &str) -> anyhow::Result<Vec<usize>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| -> anyhow::Result<usize> {
        s.trim()
            .parse()
            .with_context(|| format!("bad number {s:?} in range {spec:?}"))
    };
    let (a, b, step) = match parts.as_slice() {
        [a, b] => (num(a)?, num(b)?, 1),
        [a, b, c] => (num(a)?, num(b)?, num(c)?),
        _ => bail!("range {spec:?} is not A:B or A:B:STEP"),
    };
    if step == 0 || a > b {
        bail!("range {spec:?} needs A <= B and STEP >= 1");
    }
    Ok((a..=b).step_by(step).collect())
}

/// Qubits of block A.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockSpec {
    First(usize),
    List(Vec<usize>),
}

impl BlockSpec {
    pub fn parse(spec: &str) -> anyhow::Result<Self> {
        let spec = spec.trim();
        if let Some(k) = spec.strip_prefix("first:") {
            return Ok(Self::First(
                k.parse()
                    .with_context(|| format!("bad block size in {spec:?}"))?,
            ));
        }
        let list = spec
            .split(',')
            .map(|q| q.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .with_context(|| format!("block {spec:?} is neither first:K nor a qubit list"))?;
        Ok(Self::List(list))
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Self::First(k) => (0..*k).collect(),
            Self::List(l) => l.clone(),
        }
    }
}

/// Block size for Grover scans: `first:K`, a bare `K`, or a comma list
/// (only its length matters by permutation symmetry).
pub fn grover_block_size(spec: &str) -> anyhow::Result<usize> {
    let spec = spec.trim();
    if !spec.contains(',') {
        let k = spec.strip_prefix("first:").unwrap_or(spec);
        return k
            .parse()
            .with_context(|| format!("bad block size in {spec:?}"));
    }
    match BlockSpec::parse(spec)? {
        BlockSpec::List(l) => Ok(l.len()),
        BlockSpec::First(k) => Ok(k),
    }
}
