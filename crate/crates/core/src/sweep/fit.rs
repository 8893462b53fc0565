use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Right-side points with entropy at or below this are dropped before the
/// log-log fit (the curve reaches exactly zero at s = 1).
pub const PEAK_ENTROPY_FLOOR: f64 = 1e-9;

/// Width of the exclusion window around `s_c`, in grid steps.
pub const PEAK_EXCLUSION_STEPS: f64 = 2.0;

/// Left-side points below this s are not fitted.
pub const PEAK_LEFT_MIN_S: f64 = 0.1;

const MIN_SIDE_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
}

impl LinearFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

/// Ordinary least squares `y = intercept + slope * x`.
pub fn fit_linear(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    if xs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "linear fit needs >= 3 points, got {}",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= f64::EPSILON * mx.abs().max(1.0) * n {
        return Err(Error::InsufficientData("degenerate abscissae".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(LinearFit {
        slope,
        intercept,
        rms_residual: (sse / n).sqrt(),
    })
}

/// Two-sided description of an entropy peak.
///
/// Left of the peak `E ~ a + b ln|ln(s_c - s)|`; right of it
/// `E ~ C (s - s_c)^{-alpha}`, fitted as a line in log-log space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakShapeFit {
    pub s_c: f64,
    pub exclusion_window: f64,
    pub a: f64,
    pub b: f64,
    pub left_rms: f64,
    /// RMS of a straight line `E = c + d s` on the same left points.
    pub left_line_rms: f64,
    pub left_points: usize,
    pub alpha: f64,
    /// RMS of the log-log line, in units of `ln E`.
    pub right_log_rms: f64,
    pub right_points: usize,
}

/// Fits both sides of the peak of `curve` (pairs `(s, E)`) around `s_c`.
pub fn fit_peak_asymmetry(curve: &[(f64, f64)], s_c: f64, grid_step: f64) -> Result<PeakShapeFit> {
    let window = PEAK_EXCLUSION_STEPS * grid_step;
    let eps = 1e-9;
    let (mut lx, mut ls, mut ly) = (Vec::new(), Vec::new(), Vec::new());
    let (mut rx, mut ry) = (Vec::new(), Vec::new());
    for &(s, e) in curve {
        let d = s - s_c;
        if d <= -(window - eps) && s >= PEAK_LEFT_MIN_S - eps {
            lx.push((-d).ln().abs().ln());
            ls.push(s);
            ly.push(e);
        } else if d >= window - eps && e > PEAK_ENTROPY_FLOOR {
            rx.push(d.ln());
            ry.push(e.ln());
        }
    }
    if lx.len() < MIN_SIDE_POINTS || rx.len() < MIN_SIDE_POINTS {
        return Err(Error::InsufficientData(format!(
            "peak fit needs >= {MIN_SIDE_POINTS} points per side, got {} left and {} right",
            lx.len(),
            rx.len()
        )));
    }
    let left = fit_linear(&lx, &ly)?;
    let line = fit_linear(&ls, &ly)?;
    let right = fit_linear(&rx, &ry)?;
    Ok(PeakShapeFit {
        s_c,
        exclusion_window: window,
        a: left.intercept,
        b: left.slope,
        left_rms: left.rms_residual,
        left_line_rms: line.rms_residual,
        left_points: lx.len(),
        alpha: -right.slope,
        right_log_rms: right.rms_residual,
        right_points: rx.len(),
    })
}
