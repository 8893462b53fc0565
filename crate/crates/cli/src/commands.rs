use std::collections::BTreeMap;
use std::fs;

use anyhow::{bail, ensure, Context};
use aqc::eigensolver::SolverOptions;
use aqc::entanglement::{bipartition_entropy, Bipartition};
use aqc::grover::{grover_dense_oracle, grover_scan};
use aqc::instances::{generate_instance_with, instance_rng};
use aqc::sweep::{
    aggregate, run_ensemble, s_grid, scaling_summary, EnsembleSummary, LinearFit, PeakShapeFit,
    SweepConfig,
};
use serde::Serialize;

use crate::args::{grover_block_size, BlockSpec, FitArgs, GenerateArgs, GroverArgs, SweepArgs};
use crate::output::{
    ensure_dir, float, write_json, CsvWriter, ExperimentConfig, Failure, SolverEcho, SummaryFile,
};

const VERIFY_TOL: f64 = 1e-10;

pub fn generate(args: &GenerateArgs) -> anyhow::Result<()> {
    let sizes = args.size.sizes()?;
    ensure!(args.count > 0, "--count must be at least 1");
    ensure_dir(&args.out)?;
    let mut config = ExperimentConfig::new("generate", &args.out);
    config.n = sizes.clone();
    config.count = Some(args.count);
    config.seed = Some(args.seed);

    let mut files = Vec::new();
    for &n in &sizes {
        for i in 0..args.count {
            let inst = generate_instance_with(n, &mut instance_rng(args.seed, i as u64))
                .with_context(|| format!("generating instance {i} with n = {n}"))?;
            let name = format!("instance_n{n}_{i:04}.json");
            fs::write(args.out.join(&name), serde_json::to_string(&inst)?)
                .with_context(|| format!("writing {name}"))?;
            println!(
                "{name}: n={n} clauses={} solution={} ({:0width$b})",
                inst.clauses().len(),
                inst.solution().0,
                inst.solution().0,
                width = n
            );
            files.push(name);
        }
    }
    #[derive(Serialize)]
    struct Manifest<'a> {
        config: &'a ExperimentConfig,
        files: &'a [String],
    }
    write_json(
        &args.out.join("manifest.json"),
        &Manifest {
            config: &config,
            files: &files,
        },
    )
}

fn bipartition(n: usize, block: Option<&BlockSpec>) -> anyhow::Result<Bipartition> {
    let part = match block {
        Some(spec) => Bipartition::new(n, spec.qubits()),
        None => Bipartition::first_half(n),
    };
    part.with_context(|| format!("bipartition for n = {n}"))
}

pub fn sweep(args: &SweepArgs) -> anyhow::Result<()> {
    let sizes = args.size.sizes()?;
    let block = args.block.as_deref().map(BlockSpec::parse).transpose()?;
    let grid = s_grid(args.step)?;
    let sweep_config = SweepConfig {
        grid_step: args.step,
        solver: SolverOptions {
            tol: args.tol,
            ..SolverOptions::default()
        },
    };
    let parts = sizes
        .iter()
        .map(|&n| bipartition(n, block.as_ref()))
        .collect::<anyhow::Result<Vec<_>>>()?;
    ensure_dir(&args.out)?;

    let mut config = ExperimentConfig::new("sweep", &args.out);
    config.n = sizes.clone();
    config.count = Some(args.count);
    config.seed = Some(args.seed);
    config.grid_step = Some(args.step);
    config.block = Some(
        args.block
            .clone()
            .unwrap_or_else(|| "first:ceil(n/2)".into()),
    );
    config.solver = Some(SolverEcho {
        tol: sweep_config.solver.tol,
        max_krylov: sweep_config.solver.max_krylov,
        max_restarts: sweep_config.solver.max_restarts,
    });
    config.jobs = Some(args.jobs);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .context("building worker pool")?;
    let mut outcomes = Vec::new();
    for (&n, part) in sizes.iter().zip(&parts) {
        log::info!(
            "sweeping {} instances with n = {n} over {} points",
            args.count,
            grid.len()
        );
        let outcome =
            pool.install(|| run_ensemble(n, args.count, args.seed, &sweep_config, part))?;
        outcomes.push((n, outcome));
    }

    let mut csv = CsvWriter::create(
        &args.out.join("sweep.csv"),
        &config,
        "instance_id,n,s,e0,e1,gap,entropy_bits,schmidt_rank",
    )?;
    let mut summaries: Vec<EnsembleSummary> = Vec::new();
    let mut failures = Vec::new();
    for (n, outcome) in &outcomes {
        for r in &outcome.results {
            for p in &r.points {
                csv.row(&[
                    r.id.to_string(),
                    n.to_string(),
                    float(p.s),
                    float(p.e0),
                    float(p.e1),
                    float(p.gap),
                    float(p.entropy_bits),
                    p.schmidt_rank.to_string(),
                ])?;
            }
        }
        for (id, err) in &outcome.failures {
            eprintln!("n={n} instance {id} failed: {err}");
            failures.push(Failure {
                n: *n,
                instance_id: *id,
                error: err.clone(),
            });
        }
        if outcome.results.is_empty() {
            continue;
        }
        let s = aggregate(&outcome.results)?;
        println!(
            "n={n}: {} ok, {} failed; E_max {:.4} +- {:.4} at s {:.3}; g_min {:.4} +- {:.4} at s {:.3}",
            outcome.results.len(),
            outcome.failures.len(),
            s.entropy_max.mean,
            s.entropy_max.ci95,
            s.s_peak.mean,
            s.gap_min.mean,
            s.gap_min.ci95,
            s.s_gapmin.mean
        );
        summaries.push(s);
    }
    csv.finish()?;

    let scaling = scaling_summary(summaries, args.step)?;
    let file = SummaryFile {
        config,
        scaling,
        failures,
    };
    write_json(&args.out.join("summary.json"), &file)?;
    if !file.failures.is_empty() {
        bail!("{} instances failed", file.failures.len());
    }
    Ok(())
}

pub fn grover(args: &GroverArgs) -> anyhow::Result<()> {
    let sizes = args.size.sizes()?;
    let fixed_block = args.block.as_deref().map(grover_block_size).transpose()?;
    if args.verify {
        if let Some(&n) = sizes.iter().find(|&&n| n > aqc::DENSE_CAP) {
            bail!(
                "--verify needs n <= {} (dense oracle), got n = {n}",
                aqc::DENSE_CAP
            );
        }
    }
    let grid = s_grid(args.step)?;
    ensure_dir(&args.out)?;
    let mut config = ExperimentConfig::new("grover", &args.out);
    config.n = sizes.clone();
    config.grid_step = Some(args.step);
    config.block = Some(args.block.clone().unwrap_or_else(|| "floor(n/2)".into()));
    config.verify = Some(args.verify);

    let mut csv = CsvWriter::create(
        &args.out.join("grover.csv"),
        &config,
        "n,s,gap,entropy_bits",
    )?;
    for &n in &sizes {
        let k = fixed_block.unwrap_or(n / 2);
        let scan = grover_scan(n, &grid, k).with_context(|| format!("Grover scan n = {n}"))?;
        for p in &scan {
            csv.row(&[
                n.to_string(),
                float(p.s),
                float(p.gap),
                float(p.entropy_bits),
            ])?;
        }
        let peak = scan.iter().fold(&scan[0], |b, p| {
            if p.entropy_bits > b.entropy_bits {
                p
            } else {
                b
            }
        });
        let gmin = scan
            .iter()
            .fold(&scan[0], |b, p| if p.gap < b.gap { p } else { b });
        println!(
            "n={n} block={k}: max entropy {:.6} at s={:.2}, min gap {:.6e} at s={:.2}",
            peak.entropy_bits, peak.s, gmin.gap, gmin.s
        );
        if args.verify {
            let part = Bipartition::new(n, (0..k).collect())?;
            let (mut dgap, mut dent) = (0.0f64, 0.0f64);
            for p in &scan {
                let (spectrum, ground) = grover_dense_oracle(p.s, n, 0)?;
                dgap = dgap.max((spectrum[1] - spectrum[0] - p.gap).abs());
                let e = bipartition_entropy(&ground, &part)?.entropy_bits;
                dent = dent.max((e - p.entropy_bits).abs());
            }
            println!("n={n} verify: max |d gap| = {dgap:.3e}, max |d entropy| = {dent:.3e}");
            ensure!(
                dgap < VERIFY_TOL && dent < VERIFY_TOL,
                "closed form disagrees with the dense oracle at n = {n}"
            );
        }
    }
    csv.finish()
}

#[derive(Debug, Serialize)]
struct FitReport {
    config: ExperimentConfig,
    n_values: Vec<usize>,
    entropy_fit: Option<LinearFit>,
    entropy_fit_worst: Option<LinearFit>,
    gap_fit: Option<LinearFit>,
    gap_fit_worst: Option<LinearFit>,
    peak_shape: Option<PeakShapeFit>,
}

pub fn fit(args: &FitArgs) -> anyhow::Result<()> {
    let mut by_n: BTreeMap<usize, EnsembleSummary> = BTreeMap::new();
    let mut grid_step: Option<f64> = None;
    for path in &args.inputs {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let file: SummaryFile =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let step = file
            .config
            .grid_step
            .with_context(|| format!("{} has no grid step", path.display()))?;
        match grid_step {
            Some(g) if g != step => bail!("inputs mix grid steps {g} and {step}"),
            _ => grid_step = Some(step),
        }
        for e in file.scaling.ensembles {
            if by_n.insert(e.n, e).is_some() {
                bail!("n appears in more than one ensemble ({})", path.display());
            }
        }
    }
    ensure!(
        by_n.len() >= 3,
        "fit needs ensembles for at least 3 values of n, got {}",
        by_n.len()
    );
    let n_values: Vec<usize> = by_n.keys().copied().collect();
    let scaling = scaling_summary(by_n.into_values().collect(), grid_step.unwrap_or(0.01))?;

    ensure_dir(&args.out)?;
    let mut config = ExperimentConfig::new("fit", &args.out);
    config.n = n_values.clone();
    config.grid_step = grid_step;
    config.inputs = args
        .inputs
        .iter()
        .map(|p| p.display().to_string())
        .collect();

    let show = |label: &str, f: &Option<LinearFit>| match f {
        Some(f) => println!(
            "{label}: slope {:.6} intercept {:.6} rms {:.3e}",
            f.slope, f.intercept, f.rms_residual
        ),
        None => println!("{label}: not available"),
    };
    show("E_max vs n", &scaling.entropy_fit);
    show("worst E_max vs n", &scaling.entropy_fit_worst);
    show("g_min vs 1/n", &scaling.gap_fit);
    show("worst g_min vs 1/n", &scaling.gap_fit_worst);
    match &scaling.peak_shape {
        Some(p) => println!(
            "peak at s_c {:.3}: left a {:.4} b {:.4} rms {:.3e} (line {:.3e}); right alpha {:.4}",
            p.s_c, p.a, p.b, p.left_rms, p.left_line_rms, p.alpha
        ),
        None => println!("peak shape: not available"),
    }

    write_json(
        &args.out.join("fit.json"),
        &FitReport {
            config,
            n_values,
            entropy_fit: scaling.entropy_fit,
            entropy_fit_worst: scaling.entropy_fit_worst,
            gap_fit: scaling.gap_fit,
            gap_fit_worst: scaling.gap_fit_worst,
            peak_shape: scaling.peak_shape,
        },
    )
}
