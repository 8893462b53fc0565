//! s-grid sweeps over instances and ensembles.

mod fit;
mod stats;

pub use fit::{fit_linear, fit_peak_asymmetry, LinearFit, PeakShapeFit, PEAK_ENTROPY_FLOOR};
pub use stats::{
    aggregate, mean_entropy_curve, scaling_summary, spearman, EnsembleSummary, ScalingSummary,
    Stat, WorstCase,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigensolver::{lowest_two_iterative, EigenResult, SolverOptions};
use crate::entanglement::{bipartition_entropy, Bipartition};
use crate::hamiltonian::ProblemHamiltonian;
use crate::instances::{generate_instance_with, instance_rng, Instance};
use crate::{Error, Result, StateVector};

/// Entropy at the product-state endpoints must stay below this.
pub const ENDPOINT_ENTROPY_TOL: f64 = 1e-9;

/// Inclusive grid `0, step, ..., 1`; `1/step` must be an integer.
pub fn s_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::InvalidArgument(format!(
            "grid step {step} outside (0, 0.5]"
        )));
    }
    let intervals = (1.0 / step).round();
    if ((1.0 / step) - intervals).abs() > 1e-9 * intervals {
        return Err(Error::InvalidArgument(format!(
            "grid step {step} does not divide [0, 1] evenly"
        )));
    }
    let m = intervals as usize;
    Ok((0..=m).map(|i| i as f64 / m as f64).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub s: f64,
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
    pub entropy_bits: f64,
    pub schmidt_rank: usize,
}

impl SweepPoint {
    pub fn log2_chi(&self) -> f64 {
        (self.schmidt_rank as f64).log2()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceResult {
    pub id: u64,
    pub n: usize,
    pub points: Vec<SweepPoint>,
    pub s_peak: f64,
    pub entropy_max: f64,
    pub s_gapmin: f64,
    pub gap_min: f64,
}

impl InstanceResult {
    /// Locates the entropy peak and the gap minimum, ties toward smaller s.
    pub fn from_points(id: u64, n: usize, points: Vec<SweepPoint>) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::InsufficientData("sweep without points".into()))?;
        let (mut peak, mut gapmin) = (first, first);
        for p in &points[1..] {
            if p.entropy_bits > peak.entropy_bits {
                peak = p;
            }
            if p.gap < gapmin.gap {
                gapmin = p;
            }
        }
        Ok(Self {
            id,
            n,
            s_peak: peak.s,
            entropy_max: peak.entropy_bits,
            s_gapmin: gapmin.s,
            gap_min: gapmin.gap,
            points,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub grid_step: f64,
    pub solver: SolverOptions,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            grid_step: 0.01,
            solver: SolverOptions::default(),
        }
    }
}

/// RNG for the starting vector of grid point `s_index` of instance `id`.
fn start_rng(id: u64, s_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(id);
    rng.set_stream(s_index as u64);
    rng
}

/// Ground state, gap and entanglement on every grid point, warm-started in
/// increasing s. Endpoint invariants are checked before returning.
pub fn sweep_instance(
    inst: &Instance,
    id: u64,
    config: &SweepConfig,
    part: &Bipartition,
) -> Result<InstanceResult> {
    if part.n() != inst.n() {
        return Err(Error::InvalidArgument(format!(
            "bipartition over {} qubits for an instance of {}",
            part.n(),
            inst.n()
        )));
    }
    let grid = s_grid(config.grid_step)?;
    let ham = ProblemHamiltonian::new(inst)?;
    let mut points = Vec::with_capacity(grid.len());
    let mut previous: Option<StateVector> = None;
    for (k, &s) in grid.iter().enumerate() {
        let wrap = |e: Error| Error::Sweep {
            instance: id,
            s,
            source: Box::new(e),
        };
        let op = ham.at(s).map_err(wrap)?;
        let EigenResult {
            e0,
            e1,
            ground,
            iterations,
            ..
        } = lowest_two_iterative(
            &op,
            &config.solver,
            previous.as_ref(),
            &mut start_rng(id, k),
        )
        .map_err(wrap)?;
        let ent = bipartition_entropy(&ground, part).map_err(wrap)?;
        log::trace!(
            "instance {id} s {s:.3} gap {:.6} S {:.6} it {iterations}",
            e1 - e0,
            ent.entropy_bits
        );
        points.push(SweepPoint {
            s,
            e0,
            e1,
            gap: e1 - e0,
            entropy_bits: ent.entropy_bits,
            schmidt_rank: ent.schmidt_rank,
        });
        previous = Some(ground);
    }
    check_endpoints(id, &points)?;
    InstanceResult::from_points(id, inst.n(), points)
}

fn check_endpoints(id: u64, points: &[SweepPoint]) -> Result<()> {
    let fail = |detail: String| {
        Err(Error::EndpointInvariant {
            instance: id,
            detail,
        })
    };
    let (first, last) = (&points[0], &points[points.len() - 1]);
    for p in [first, last] {
        if p.entropy_bits >= ENDPOINT_ENTROPY_TOL || p.schmidt_rank != 1 {
            return fail(format!(
                "s = {}: entropy {:e}, schmidt rank {}",
                p.s, p.entropy_bits, p.schmidt_rank
            ));
        }
    }
    if last.e0.abs() > 1e-9 {
        return fail(format!("e0(1) = {:e}", last.e0));
    }
    if last.gap < 1.0 - 1e-9 {
        return fail(format!("gap(1) = {}", last.gap));
    }
    Ok(())
}

/// Swept ensemble plus the instances that failed (excluded from `results`).
#[derive(Debug, Clone)]
pub struct EnsembleOutcome {
    pub results: Vec<InstanceResult>,
    pub failures: Vec<(u64, String)>,
}

/// Generates and sweeps `count` instances of size `n`. Instance `i` uses the
/// RNG stream `i` of `seed`, so results do not depend on scheduling; output
/// is sorted by instance id. Runs on the ambient rayon pool.
pub fn run_ensemble(
    n: usize,
    count: usize,
    seed: u64,
    config: &SweepConfig,
    part: &Bipartition,
) -> Result<EnsembleOutcome> {
    if count == 0 {
        return Err(Error::InvalidArgument("ensemble count must be >= 1".into()));
    }
    let outcomes: Vec<(u64, Result<InstanceResult>)> = (0..count as u64)
        .into_par_iter()
        .map(|id| {
            let res = generate_instance_with(n, &mut instance_rng(seed, id))
                .and_then(|inst| sweep_instance(&inst, id, config, part));
            match &res {
                Ok(r) => log::info!(
                    "n={n} instance {id}: S_max {:.4} at s={:.2}, g_min {:.4} at s={:.2}",
                    r.entropy_max,
                    r.s_peak,
                    r.gap_min,
                    r.s_gapmin
                ),
                Err(e) => log::warn!("n={n} instance {id} failed: {e}"),
            }
            (id, res)
        })
        .collect();
    let mut results = Vec::new();
    let mut failures = Vec::new();
    for (id, res) in outcomes {
        match res {
            Ok(r) => results.push(r),
            Err(e) => failures.push((id, e.to_string())),
        }
    }
    if !failures.is_empty() {
        log::warn!("n={n}: {} of {count} instances excluded", failures.len());
    }
    Ok(EnsembleOutcome { results, failures })
}
