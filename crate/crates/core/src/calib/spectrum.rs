//! ac-Stark-split qubit spectra: a comb of Gaussian peaks, one per cavity
//! Fock number, spaced by the dispersive pull and weighted by the photon
//! distribution.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::hertz;

use super::lm::levenberg_marquardt;
use super::report::FitReport;

/// How the measurement-induced broadening `Γ(n)` depends on `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinewidthMode {
    /// Thermal drive present: `Γ(n) = κ(2n̄n + n + n̄)`.
    ThermalOn,
    /// Drive off: `Γ(n) = κn`.
    ThermalOff,
    /// Coherent drive: `Γ(n) = κn`.
    Coherent,
}

/// Cavity photon-number distribution with mean `nbar`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PhotonDistribution {
    Poisson { nbar: f64 },
    Geometric { nbar: f64 },
}

impl PhotonDistribution {
    pub fn nbar(&self) -> f64 {
        match *self {
            Self::Poisson { nbar } | Self::Geometric { nbar } => nbar,
        }
    }

    pub fn with_nbar(&self, nbar: f64) -> Self {
        match self {
            Self::Poisson { .. } => Self::Poisson { nbar },
            Self::Geometric { .. } => Self::Geometric { nbar },
        }
    }

    /// `p_n`, unnormalised over any cutoff.
    pub fn probability(&self, n: usize) -> f64 {
        let nbar = self.nbar();
        match self {
            Self::Poisson { .. } => {
                if nbar == 0.0 {
                    return if n == 0 { 1.0 } else { 0.0 };
                }
                let ln_fact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
                (n as f64 * nbar.ln() - nbar - ln_fact).exp()
            }
            Self::Geometric { .. } => {
                let q = nbar / (1.0 + nbar);
                (1.0 - q) * q.powi(n as i32)
            }
        }
    }

    /// Weights `p_0..=p_{n_max}` renormalised to one, and the discarded tail.
    pub fn weights(&self, n_max: usize) -> (Vec<f64>, f64) {
        let raw: Vec<f64> = (0..=n_max).map(|n| self.probability(n)).collect();
        let kept: f64 = raw.iter().sum();
        ((raw.iter().map(|p| p / kept).collect()), (1.0 - kept).max(0.0))
    }
}

/// Parameters of a synthetic or fitted qubit spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumModel {
    /// Shift of the qubit line per cavity photon, Hz.
    pub peak_spacing: f64,
    /// Intrinsic FWHM `γ_i`, Hz.
    pub gamma_intrinsic: f64,
    pub linewidth_mode: LinewidthMode,
    pub distribution: PhotonDistribution,
    /// Total integrated intensity.
    pub amplitude: f64,
}

impl SpectrumModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.peak_spacing != 0.0 && self.peak_spacing.is_finite()) {
            return Err(Error::Domain(format!("peak spacing must be non-zero, got {}", self.peak_spacing)));
        }
        let nbar = self.distribution.nbar();
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(Error::Domain(format!("nbar must be >= 0, got {nbar}")));
        }
        if !(self.gamma_intrinsic >= 0.0) {
            return Err(Error::Domain(format!("intrinsic linewidth must be >= 0, got {}", self.gamma_intrinsic)));
        }
        Ok(())
    }
}

/// FWHM of peak `n`, `γ_i + Γ(n)/2π`, Hz. `kappa` in rad/s.
pub fn linewidth(n: usize, model: &SpectrumModel, kappa: f64) -> f64 {
    let n = n as f64;
    let nbar = model.distribution.nbar();
    let broadening = match model.linewidth_mode {
        LinewidthMode::ThermalOn => kappa * (2.0 * nbar * n + n + nbar),
        LinewidthMode::ThermalOff | LinewidthMode::Coherent => kappa * n,
    };
    model.gamma_intrinsic + hertz(broadening)
}

/// FWHM to Gaussian standard deviation.
pub fn fwhm_to_sigma(fwhm: f64) -> f64 {
    fwhm / (2.0 * (2.0 * LN_2).sqrt())
}

/// Spectrum on `freq_grid` (offsets from the bare qubit line, Hz) summing
/// peaks `0..=n_max`. Also returns the distribution tail beyond `n_max`.
pub fn synth_spectrum_with_tail(
    model: &SpectrumModel,
    freq_grid: &[f64],
    n_max: usize,
    kappa: f64,
) -> Result<(Vec<f64>, f64)> {
    model.validate()?;
    let (weights, tail) = model.distribution.weights(n_max);
    let mut out = vec![0.0; freq_grid.len()];
    for (n, w) in weights.iter().enumerate() {
        if *w == 0.0 {
            continue;
        }
        let sigma = fwhm_to_sigma(linewidth(n, model, kappa));
        if !(sigma > 0.0) {
            return Err(Error::Domain(format!("peak {n} has zero width")));
        }
        let center = n as f64 * model.peak_spacing;
        let scale = model.amplitude * w / (sigma * (2.0 * PI).sqrt());
        for (o, f) in out.iter_mut().zip(freq_grid) {
            let z = (f - center) / sigma;
            *o += scale * (-0.5 * z * z).exp();
        }
    }
    Ok((out, tail))
}

/// [`synth_spectrum_with_tail`] without the tail.
pub fn synth_spectrum(model: &SpectrumModel, freq_grid: &[f64], n_max: usize, kappa: f64) -> Result<Vec<f64>> {
    Ok(synth_spectrum_with_tail(model, freq_grid, n_max, kappa)?.0)
}

/// Quantities held fixed during a spectrum fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumFixed {
    /// Hz per photon.
    pub peak_spacing: f64,
    /// rad/s.
    pub kappa: f64,
    pub n_max: usize,
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1])).sum()
}

/// Least-squares fit of `(n̄, γ_i, amplitude)`.
///
/// The distribution family and linewidth mode come from `init`, as do the
/// starting `n̄` and `γ_i`. The starting amplitude is the integral of the
/// data, so the fitted `n̄` does not depend on the overall data scale. The
/// fitted `n̄` is the intracavity photon number `n_c`.
pub fn fit_spectrum(
    data: &[f64],
    freq_grid: &[f64],
    fixed: SpectrumFixed,
    init: &SpectrumModel,
) -> Result<(SpectrumModel, FitReport)> {
    if data.len() != freq_grid.len() {
        return Err(Error::LengthMismatch { expected: freq_grid.len(), found: data.len() });
    }
    if data.iter().any(|d| !d.is_finite()) || freq_grid.iter().any(|f| !f.is_finite()) {
        return Err(Error::DegenerateData("non-finite spectrum data".into()));
    }
    let (lo, hi) = freq_grid.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), f| (a.min(*f), b.max(*f)));
    if !(hi - lo >= 3.0 * fixed.peak_spacing.abs()) {
        return Err(Error::Domain(format!(
            "frequency grid spans {} Hz, need at least three peak spacings ({} Hz)",
            hi - lo,
            3.0 * fixed.peak_spacing.abs()
        )));
    }
    let first = data[0];
    if data.iter().all(|d| *d == first) {
        return Err(Error::DegenerateData("spectrum is flat".into()));
    }
    let template = SpectrumModel { peak_spacing: fixed.peak_spacing, ..*init };
    template.validate()?;
    let area = trapezoid(freq_grid, data).abs();
    let area = if area > 0.0 { area } else { data.iter().map(|d| d.abs()).fold(0.0, f64::max) };
    let build = |p: &[f64]| SpectrumModel {
        distribution: template.distribution.with_nbar(p[0]),
        gamma_intrinsic: p[1],
        amplitude: p[2],
        ..template
    };
    let residuals = |p: &[f64]| -> Option<Vec<f64>> {
        if !(p[0] >= 0.0 && p[1] > 0.0) {
            return None;
        }
        let model = synth_spectrum(&build(p), freq_grid, fixed.n_max, fixed.kappa).ok()?;
        Some(model.iter().zip(data).map(|(m, d)| m - d).collect())
    };
    let start = [init.distribution.nbar(), init.gamma_intrinsic.max(1e-3 * fixed.peak_spacing.abs()), area];
    let sol = levenberg_marquardt(residuals, &start)?;
    let model = build(&sol.params);
    let (_, tail) = model.distribution.weights(fixed.n_max);
    let mut report = FitReport::new(sol.residual_norm, sol.iterations);
    report.parameter("nbar", sol.params[0], sol.std_errors[0]);
    report.parameter("gamma_intrinsic_hz", sol.params[1], sol.std_errors[1]);
    report.parameter("amplitude", sol.params[2], sol.std_errors[2]);
    report.derived("n_c", sol.params[0]);
    report.derived("distribution_tail", tail);
    if tail > 1e-6 {
        report.flag(format!("photon distribution tail {tail:.3e} beyond n_max = {} renormalised away", fixed.n_max));
    }
    Ok((model, report))
}
