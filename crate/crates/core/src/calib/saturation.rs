//! Emitted photons against drive power, `n = A / (1 + B / P)`.
//!
//! The fit runs in `(s, u) = (A/B, 1/B)`, where the model reads
//! `n = sP / (1 + uP)`. The slope `s` stays well determined in the linear
//! regime `P ≪ B`, where `A` and `B` separately do not.

use crate::error::{Error, Result};

use super::lm::levenberg_marquardt;
use super::report::FitReport;

/// Curvature `uP_max` below which the data cannot separate `A` from `B`.
pub const LINEAR_REGIME_CURVATURE: f64 = 0.05;

/// `A / (1 + B / P)`.
pub fn saturation_model(p_in: f64, a: f64, b: f64) -> f64 {
    a / (1.0 + b / p_in)
}

/// Fitted saturation curve. `a`, `b` are `None` when the fitted curvature
/// is not positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SaturationFit {
    pub a: Option<f64>,
    pub b: Option<f64>,
    /// Low-power slope `A/B`.
    pub slope: f64,
    /// `1/B`.
    pub curvature: f64,
    pub report: FitReport,
}

/// Ordinary least squares `y = c0 + c1 x`.
fn line_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if !(sxx > 1e-300 * n) {
        return None;
    }
    let c1 = sxy / sxx;
    Some((my - c1 * mx, c1))
}

pub fn fit_saturation(p_in: &[f64], n_emit: &[f64]) -> Result<SaturationFit> {
    if p_in.len() != n_emit.len() {
        return Err(Error::LengthMismatch { expected: p_in.len(), found: n_emit.len() });
    }
    if p_in.len() < 3 {
        return Err(Error::DegenerateData(format!("need at least 3 points, got {}", p_in.len())));
    }
    if let Some(p) = p_in.iter().find(|p| !(**p > 0.0 && p.is_finite())) {
        return Err(Error::Domain(format!("input powers must be positive, found {p}")));
    }
    if n_emit.iter().any(|n| !n.is_finite()) {
        return Err(Error::DegenerateData("non-finite photon numbers".into()));
    }
    let first = p_in[0];
    if p_in.iter().all(|p| *p == first) {
        return Err(Error::DegenerateData("all input powers are equal".into()));
    }
    // start from the linearisation 1/n = (1/s)(1/P) + u/s
    let usable: Vec<(f64, f64)> = p_in.iter().zip(n_emit).filter(|(_, n)| **n > 0.0).map(|(p, n)| (1.0 / p, 1.0 / n)).collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = usable.into_iter().unzip();
    let start = match line_fit(&xs, &ys) {
        Some((icpt, slope)) if slope > 0.0 => [1.0 / slope, (icpt / slope).max(0.0)],
        _ => {
            let (_, s) = line_fit(p_in, n_emit).ok_or_else(|| Error::DegenerateData("cannot seed the fit".into()))?;
            [s, 0.0]
        }
    };
    let residuals = |q: &[f64]| -> Option<Vec<f64>> {
        p_in.iter()
            .zip(n_emit)
            .map(|(p, n)| {
                let denom = 1.0 + q[1] * p;
                (denom > 0.0).then(|| q[0] * p / denom - n)
            })
            .collect()
    };
    let sol = levenberg_marquardt(residuals, &start)?;
    let (slope, curvature) = (sol.params[0], sol.params[1]);
    let mut report = FitReport::new(sol.residual_norm, sol.iterations);
    report.parameter("slope_a_over_b", slope, sol.std_errors[0]);
    report.parameter("inv_b", curvature, sol.std_errors[1]);
    let (a, b) = if curvature > 0.0 { (Some(slope / curvature), Some(1.0 / curvature)) } else { (None, None) };
    report.derived("a", a);
    report.derived("b", b);
    let p_max = p_in.iter().cloned().fold(0.0, f64::max);
    if curvature * p_max < LINEAR_REGIME_CURVATURE {
        report.flag(format!(
            "near-linear data: B/P_max = {:.3e}; only the slope A/B is determined",
            if curvature > 0.0 { 1.0 / (curvature * p_max) } else { f64::INFINITY }
        ));
    } else if sol.std_errors[1] > curvature.abs() {
        report.flag("A and B are poorly separated: 1/B uncertainty exceeds its value");
    }
    if a.is_none() {
        report.flag("fitted 1/B is not positive; A and B undefined");
    }
    Ok(SaturationFit { a, b, slope, curvature, report })
}
