use serde::{Deserialize, Serialize};

use super::fit::{fit_linear, fit_peak_asymmetry, LinearFit, PeakShapeFit};
use super::InstanceResult;
use crate::{Error, Result};

/// Normal-approximation factor for a two-sided 95% interval.
pub const CI95_FACTOR: f64 = 1.96;

/// Sample mean, sample standard deviation (N - 1) and 95% CI half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
    pub ci95: f64,
}

impl Stat {
    /// A single value has zero spread by convention.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientData("statistic of an empty set".into()));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Ok(Self {
            mean,
            std,
            ci95: CI95_FACTOR * std / n.sqrt(),
        })
    }
}

/// The instance singled out as a worst case, with its headline numbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstCase {
    pub instance_id: u64,
    pub entropy_max: f64,
    pub s_peak: f64,
    pub gap_min: f64,
    pub s_gapmin: f64,
}

impl From<&InstanceResult> for WorstCase {
    fn from(r: &InstanceResult) -> Self {
        Self {
            instance_id: r.id,
            entropy_max: r.entropy_max,
            s_peak: r.s_peak,
            gap_min: r.gap_min,
            s_gapmin: r.s_gapmin,
        }
    }
}

/// Statistics of one fixed-n ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub n: usize,
    pub count: usize,
    pub entropy_max: Stat,
    /// `log2 chi` at each instance's entropy peak.
    pub log2_chi_at_peak: Stat,
    pub gap_min: Stat,
    pub s_peak: Stat,
    pub s_gapmin: Stat,
    /// Largest entropy peak.
    pub worst_by_entropy: WorstCase,
    /// Smallest minimum gap.
    pub worst_by_gap: WorstCase,
    /// Spearman correlation of gap_min with entropy_max (None below 2 instances).
    pub gap_entropy_rank_correlation: Option<f64>,
    /// Mean entropy per grid point, as `(s, mean)` pairs.
    pub mean_entropy_curve: Vec<(f64, f64)>,
}

/// Average of the entropy curves; all results must share one grid.
pub fn mean_entropy_curve(results: &[&InstanceResult]) -> Result<Vec<(f64, f64)>> {
    let first = results
        .first()
        .ok_or_else(|| Error::InsufficientData("empty ensemble".into()))?;
    let grid: Vec<f64> = first.points.iter().map(|p| p.s).collect();
    let mut sums = vec![0.0; grid.len()];
    for r in results {
        if r.points.len() != grid.len() || r.points.iter().zip(&grid).any(|(p, &s)| p.s != s) {
            return Err(Error::InvalidArgument(format!(
                "instance {} was swept on a different grid",
                r.id
            )));
        }
        for (acc, p) in sums.iter_mut().zip(&r.points) {
            *acc += p.entropy_bits;
        }
    }
    let count = results.len() as f64;
    Ok(grid
        .into_iter()
        .zip(sums)
        .map(|(s, t)| (s, t / count))
        .collect())
}

/// Summarizes one ensemble. The input order does not matter: results are
/// processed in instance-id order and ties go to the smaller id.
pub fn aggregate(results: &[InstanceResult]) -> Result<EnsembleSummary> {
    let mut sorted: Vec<&InstanceResult> = results.iter().collect();
    sorted.sort_by_key(|r| r.id);
    let first = *sorted
        .first()
        .ok_or_else(|| Error::InsufficientData("cannot aggregate an empty ensemble".into()))?;
    if let Some(r) = sorted.iter().find(|r| r.n != first.n) {
        return Err(Error::InvalidArgument(format!(
            "mixed ensemble: n = {} and n = {}",
            first.n, r.n
        )));
    }
    if sorted.windows(2).any(|w| w[0].id == w[1].id) {
        return Err(Error::InvalidArgument("duplicate instance ids".into()));
    }
    let column =
        |f: fn(&InstanceResult) -> f64| -> Vec<f64> { sorted.iter().map(|r| f(r)).collect() };
    let entropy = column(|r| r.entropy_max);
    let gaps = column(|r| r.gap_min);
    let chi = column(|r| {
        r.points
            .iter()
            .find(|p| p.s == r.s_peak)
            .map_or(0.0, |p| p.log2_chi())
    });

    let mut worst_entropy = first;
    let mut worst_gap = first;
    for r in &sorted[1..] {
        if r.entropy_max > worst_entropy.entropy_max {
            worst_entropy = r;
        }
        if r.gap_min < worst_gap.gap_min {
            worst_gap = r;
        }
    }

    Ok(EnsembleSummary {
        n: first.n,
        count: sorted.len(),
        entropy_max: Stat::from_values(&entropy)?,
        log2_chi_at_peak: Stat::from_values(&chi)?,
        gap_min: Stat::from_values(&gaps)?,
        s_peak: Stat::from_values(&column(|r| r.s_peak))?,
        s_gapmin: Stat::from_values(&column(|r| r.s_gapmin))?,
        worst_by_entropy: worst_entropy.into(),
        worst_by_gap: worst_gap.into(),
        gap_entropy_rank_correlation: spearman(&gaps, &entropy),
        mean_entropy_curve: mean_entropy_curve(&sorted)?,
    })
}

/// Average ranks (1-based), ties sharing the mean of their positions.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation; `None` for fewer than 2 points or a constant input.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return None;
    }
    Some(cov / (vx * vy).sqrt())
}

/// Per-n ensembles with the scaling fits across n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSummary {
    pub ensembles: Vec<EnsembleSummary>,
    /// Mean entropy_max against n.
    pub entropy_fit: Option<LinearFit>,
    /// Largest entropy_max per n against n.
    pub entropy_fit_worst: Option<LinearFit>,
    /// Mean gap_min against 1/n.
    pub gap_fit: Option<LinearFit>,
    /// Smallest gap_min per n against 1/n.
    pub gap_fit_worst: Option<LinearFit>,
    /// Peak shape of the mean curve of the largest n, around its grid argmax.
    pub peak_shape: Option<PeakShapeFit>,
}

/// Assembles ensembles (any order, distinct n) and fits the scaling laws.
/// Fits that lack data (fewer than 3 sizes, too few peak points) are `None`.
pub fn scaling_summary(
    mut ensembles: Vec<EnsembleSummary>,
    grid_step: f64,
) -> Result<ScalingSummary> {
    ensembles.sort_by_key(|e| e.n);
    if ensembles.windows(2).any(|w| w[0].n == w[1].n) {
        return Err(Error::InvalidArgument(
            "two ensembles with the same n".into(),
        ));
    }
    let ns: Vec<f64> = ensembles.iter().map(|e| e.n as f64).collect();
    let inv: Vec<f64> = ns.iter().map(|n| 1.0 / n).collect();
    let col = |f: fn(&EnsembleSummary) -> f64| -> Vec<f64> { ensembles.iter().map(f).collect() };
    let entropy_fit = fit_linear(&ns, &col(|e| e.entropy_max.mean)).ok();
    let entropy_fit_worst = fit_linear(&ns, &col(|e| e.worst_by_entropy.entropy_max)).ok();
    let gap_fit = fit_linear(&inv, &col(|e| e.gap_min.mean)).ok();
    let gap_fit_worst = fit_linear(&inv, &col(|e| e.worst_by_gap.gap_min)).ok();
    let peak_shape = ensembles.last().and_then(|e| {
        let curve = &e.mean_entropy_curve;
        let &(s_c, _) = curve
            .iter()
            .fold(None::<&(f64, f64)>, |best, p| match best {
                Some(b) if b.1 >= p.1 => Some(b),
                _ => Some(p),
            })?;
        fit_peak_asymmetry(curve, s_c, grid_step).ok()
    });
    Ok(ScalingSummary {
        ensembles,
        entropy_fit,
        entropy_fit_worst,
        gap_fit,
        gap_fit_worst,
        peak_shape,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::SweepPoint;

    fn synthetic(id: u64, n: usize, peak: f64, gap: f64) -> InstanceResult {
        let points = (0..=10)
            .map(|i| {
                let s = f64::from(i) / 10.0;
                let bump = if i == 7 {
                    peak
                } else {
                    peak * 0.5 * f64::from(i.min(10 - i)) / 10.0
                };
                SweepPoint {
                    s,
                    e0: 0.0,
                    e1: if i == 8 { gap } else { gap + 1.0 },
                    gap: if i == 8 { gap } else { gap + 1.0 },
                    entropy_bits: if i == 0 || i == 10 { 0.0 } else { bump },
                    schmidt_rank: if i == 0 || i == 10 { 1 } else { 4 },
                }
            })
            .collect();
        InstanceResult::from_points(id, n, points).unwrap()
    }

    #[test]
    fn single_instance_has_zero_ci() {
        let s = aggregate(&[synthetic(0, 8, 0.9, 0.2)]).unwrap();
        assert_eq!(s.entropy_max.mean, 0.9);
        assert_eq!(s.entropy_max.ci95, 0.0);
        assert_eq!(s.s_peak.mean, 0.7);
        assert_eq!(s.s_gapmin.mean, 0.8);
        assert_eq!(s.log2_chi_at_peak.mean, 2.0);
        assert_eq!(s.gap_entropy_rank_correlation, None);
    }

    #[test]
    fn identical_results_have_zero_spread() {
        let rs: Vec<_> = (0..5).map(|id| synthetic(id, 8, 0.9, 0.2)).collect();
        let s = aggregate(&rs).unwrap();
        assert_eq!(s.gap_min.std, 0.0);
        assert_eq!(s.gap_min.ci95, 0.0);
        assert_eq!(s.worst_by_gap.instance_id, 0);
    }

    #[test]
    fn ci_uses_sample_std() {
        let st = Stat::from_values(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let std = (5.0f64 / 3.0).sqrt();
        assert!((st.std - std).abs() < 1e-15);
        assert!((st.ci95 - 1.96 * std / 2.0).abs() < 1e-15);
    }

    #[test]
    fn worst_cases_and_permutation_invariance() {
        let rs = vec![
            synthetic(3, 8, 0.5, 0.30),
            synthetic(1, 8, 1.1, 0.10),
            synthetic(2, 8, 0.8, 0.20),
            synthetic(0, 8, 0.7, 0.25),
        ];
        let s = aggregate(&rs).unwrap();
        assert_eq!(s.worst_by_entropy.instance_id, 1);
        assert_eq!(s.worst_by_gap.instance_id, 1);
        assert!(s.worst_by_gap.gap_min <= s.gap_min.mean);
        assert_eq!(s.gap_entropy_rank_correlation, Some(-1.0));
        let mut rev = rs.clone();
        rev.reverse();
        assert_eq!(aggregate(&rev).unwrap(), s);
    }

    #[test]
    fn rejects_bad_groups() {
        assert!(aggregate(&[]).is_err());
        assert!(aggregate(&[synthetic(0, 8, 1.0, 0.1), synthetic(1, 10, 1.0, 0.1)]).is_err());
        assert!(aggregate(&[synthetic(0, 8, 1.0, 0.1), synthetic(0, 8, 1.0, 0.1)]).is_err());
    }

    #[test]
    fn spearman_with_ties() {
        assert_eq!(ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
        let r = spearman(&[1.0, 2.0, 3.0, 4.0], &[10.0, 20.0, 30.0, 40.0]).unwrap();
        assert!((r - 1.0).abs() < 1e-15);
        assert_eq!(spearman(&[1.0, 1.0], &[1.0, 2.0]), None);
    }

    #[test]
    fn scaling_fits_on_synthetic_sizes() {
        let ensembles: Vec<EnsembleSummary> = [6usize, 8, 10, 12]
            .iter()
            .map(|&n| aggregate(&[synthetic(0, n, 0.1 * n as f64, 1.2 / n as f64)]).unwrap())
            .collect();
        let summary = scaling_summary(ensembles, 0.1).unwrap();
        let e = summary.entropy_fit.unwrap();
        assert!((e.slope - 0.1).abs() < 1e-12);
        let g = summary.gap_fit.unwrap();
        assert!((g.slope - 1.2).abs() < 1e-12);
        assert!(g.intercept.abs() < 1e-12);
        // Eleven grid points are too few for a peak-shape fit.
        assert!(summary.peak_shape.is_none());
    }
}
