//! Symmetric two-port cavity between a hot and a cold thermal bath.
//!
//! The hot bath enters from the left, the cold bath from the right. The
//! qubit state (`+` for |g⟩, `−` for |e⟩) pulls the cavity by `∓χ/2`, so
//! the transmitted and reflected output power depends on the qubit only when
//! the two baths differ. Detunings are `δ = ω_c − ω` in rad/s.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{hertz, BOLTZMANN, PLANCK};

/// Qubit-conditioned cavity branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// Qubit in |g⟩: resonance at `δ = −χ/2`.
    Plus,
    /// Qubit in |e⟩: resonance at `δ = +χ/2`.
    Minus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// Occupancies of the two baths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Baths {
    /// Frequency-independent occupancies across the resonance.
    Flat { nbar_hot: f64, nbar_cold: f64 },
    /// Bose–Einstein occupancies evaluated at each probe frequency
    /// `ω_c − δ`, with the cavity at `carrier_hz`.
    Blackbody { t_hot: f64, t_cold: f64, carrier_hz: f64 },
}

/// One symmetric-cavity scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterScene {
    /// rad/s
    pub kappa: f64,
    /// rad/s
    pub chi: f64,
    /// `δ = ω_c − ω`, rad/s.
    pub detuning_grid: Vec<f64>,
    pub baths: Baths,
    /// Signal duration T, seconds.
    pub duration: f64,
}

impl ScatterScene {
    pub fn new(kappa: f64, chi: f64, detuning_grid: Vec<f64>, baths: Baths, duration: f64) -> Result<Self> {
        let scene = Self { kappa, chi, detuning_grid, baths, duration };
        scene.validate()?;
        Ok(scene)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0) {
            return Err(Error::Domain("kappa must be positive".into()));
        }
        if !(self.duration > 0.0) {
            return Err(Error::Domain("duration must be positive".into()));
        }
        match self.baths {
            Baths::Flat { nbar_hot, nbar_cold } => {
                if !(nbar_hot >= 0.0 && nbar_cold >= 0.0) {
                    return Err(Error::Domain("occupancies must be >= 0".into()));
                }
            }
            Baths::Blackbody { t_hot, t_cold, carrier_hz } => {
                if !(t_hot > 0.0 && t_cold > 0.0 && carrier_hz > 0.0) {
                    return Err(Error::Domain("temperatures and carrier must be positive".into()));
                }
            }
        }
        Ok(())
    }

    /// Evenly spaced grid of `points` detunings over `[−span, span]`.
    pub fn symmetric_grid(span: f64, points: usize) -> Vec<f64> {
        match points {
            0 => Vec::new(),
            1 => vec![0.0],
            _ => (0..points)
                .map(|i| -span + 2.0 * span * i as f64 / (points - 1) as f64)
                .collect(),
        }
    }

    /// `(n̄_H, n̄_C)` seen at detuning `delta`.
    pub fn occupancies(&self, delta: f64) -> (f64, f64) {
        match self.baths {
            Baths::Flat { nbar_hot, nbar_cold } => (nbar_hot, nbar_cold),
            Baths::Blackbody { t_hot, t_cold, carrier_hz } => {
                let f = carrier_hz - hertz(delta);
                (occupancy(f, t_hot), occupancy(f, t_cold))
            }
        }
    }

    /// Occupancies at the cavity frequency.
    pub fn central_occupancies(&self) -> (f64, f64) {
        self.occupancies(0.0)
    }
}

fn occupancy(freq: f64, temp: f64) -> f64 {
    1.0 / (PLANCK * freq / (BOLTZMANN * temp)).exp_m1()
}

/// Mean photon number of a blackbody mode, `1/(exp(hf/k_BT) − 1)`.
pub fn bose_einstein(freq_hz: f64, temp_k: f64) -> Result<f64> {
    if !(temp_k > 0.0) {
        return Err(Error::Domain(format!("temperature must be positive, got {temp_k}")));
    }
    if !(freq_hz > 0.0) {
        return Err(Error::Domain(format!("frequency must be positive, got {freq_hz}")));
    }
    Ok(occupancy(freq_hz, temp_k))
}

/// `T± = −κ / (κ + i(δ ± χ/2))`.
pub fn transmission(delta: f64, branch: Branch, scene: &ScatterScene) -> Complex64 {
    -scene.kappa / Complex64::new(scene.kappa, delta + branch.sign() * scene.chi / 2.0)
}

/// `R± = 1 + T± = i(δ ± χ/2) / (κ + i(δ ± χ/2))`.
pub fn reflection(delta: f64, branch: Branch, scene: &ScatterScene) -> Complex64 {
    let detuning = delta + branch.sign() * scene.chi / 2.0;
    Complex64::new(0.0, detuning) / Complex64::new(scene.kappa, detuning)
}

/// `|T₊|² − |T₋|²` in closed form:
/// `−2χδ/κ² / ((1 + (δ+χ/2)²/κ²)(1 + (δ−χ/2)²/κ²))`.
pub fn transmission_difference(delta: f64, kappa: f64, chi: f64) -> f64 {
    let a = (delta + chi / 2.0) / kappa;
    let b = (delta - chi / 2.0) / kappa;
    -2.0 * chi * delta / (kappa * kappa) / ((1.0 + a * a) * (1.0 + b * b))
}

/// Power spectra on the detuning grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    pub detuning_grid: Vec<f64>,
    /// Per-quadrature output power, qubit in |g⟩.
    pub s_plus: Vec<f64>,
    /// Per-quadrature output power, qubit in |e⟩.
    pub s_minus: Vec<f64>,
    /// `n̄_H(|T₊|²−|T₋|²) + n̄_C(|R₊|²−|R₋|²)`. With the per-quadrature
    /// normalization of `s_plus`/`s_minus` this equals `2 (S₊ − S₋)`.
    pub signal: Vec<f64>,
    /// Closed-form `|T₊|² − |T₋|²`.
    pub transmission_difference: Vec<f64>,
    pub snr_p: Vec<f64>,
}

struct Coefficients {
    t_plus: f64,
    t_minus: f64,
    r_plus: f64,
    r_minus: f64,
}

fn coefficients(delta: f64, scene: &ScatterScene) -> Coefficients {
    Coefficients {
        t_plus: transmission(delta, Branch::Plus, scene).norm_sqr(),
        t_minus: transmission(delta, Branch::Minus, scene).norm_sqr(),
        r_plus: reflection(delta, Branch::Plus, scene).norm_sqr(),
        r_minus: reflection(delta, Branch::Minus, scene).norm_sqr(),
    }
}

/// `n̄_H(|T₊|²−|T₋|²) + n̄_C(|R₊|²−|R₋|²)`, evaluated as
/// `(n̄_H − n̄_C)(|T₊|²−|T₋|²)` through `|R|² = 1 − |T|²` so equal baths give
/// exactly zero.
fn signal_at(delta: f64, scene: &ScatterScene) -> f64 {
    let c = coefficients(delta, scene);
    let (hot, cold) = scene.occupancies(delta);
    (hot - cold) * (c.t_plus - c.t_minus)
}

/// Single-frequency power SNR. The noise uses branch-averaged `|T|²`, `|R|²`.
pub fn snr_single_frequency(scene: &ScatterScene, delta: f64) -> f64 {
    let c = coefficients(delta, scene);
    let (hot, cold) = scene.occupancies(delta);
    let t = 0.5 * (c.t_plus + c.t_minus);
    let r = 0.5 * (c.r_plus + c.r_minus);
    let noise = ((hot + 1.0).powi(2) * t + (cold + 1.0).powi(2) * r).sqrt();
    signal_at(delta, scene) * scene.duration.sqrt() / noise
}

/// Both qubit-conditioned spectra over the scene's grid.
pub fn power_spectrum(scene: &ScatterScene) -> SpectralResult {
    let n = scene.detuning_grid.len();
    let mut out = SpectralResult {
        detuning_grid: scene.detuning_grid.clone(),
        s_plus: Vec::with_capacity(n),
        s_minus: Vec::with_capacity(n),
        signal: Vec::with_capacity(n),
        transmission_difference: Vec::with_capacity(n),
        snr_p: Vec::with_capacity(n),
    };
    for &delta in &scene.detuning_grid {
        let c = coefficients(delta, scene);
        let (hot, cold) = scene.occupancies(delta);
        out.s_plus.push(c.t_plus * (hot + 1.0) / 2.0 + c.r_plus * (cold + 1.0) / 2.0);
        out.s_minus.push(c.t_minus * (hot + 1.0) / 2.0 + c.r_minus * (cold + 1.0) / 2.0);
        out.signal.push(signal_at(delta, scene));
        out.transmission_difference.push(transmission_difference(delta, scene.kappa, scene.chi));
        out.snr_p.push(snr_single_frequency(scene, delta));
    }
    out
}

/// Frequency-integrated signal and SNR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratedSnr {
    /// `πκ(n̄_H − n̄_C)`.
    pub signal_closed_form: f64,
    /// Trapezoid integral of the signal over the half-line holding the `+` peak.
    pub signal_numeric: f64,
    /// `(numeric − closed form) / closed form`; zero when both vanish.
    pub relative_error: f64,
    /// `√(πκT) (n̄_H − n̄_C) / √((n̄_H+1)² + (n̄_C+1)²)`.
    pub snr: f64,
    pub warnings: Vec<String>,
}

/// Nodes used for the numeric frequency integral.
pub const INTEGRATION_NODES: usize = 20_001;

/// Integrates the signal from far below the `+` resonance up to the midpoint
/// between the two resonances. The substitution `δ = −χ/2 + κ tan u` maps the
/// half-line onto a finite interval.
fn integrated_signal(scene: &ScatterScene) -> f64 {
    let kappa = scene.kappa;
    let center = -scene.chi / 2.0;
    let edge = (-center / kappa).atan();
    let (u_lo, u_hi) = if scene.chi >= 0.0 { (-PI / 2.0, edge) } else { (edge, PI / 2.0) };
    let h = (u_hi - u_lo) / (INTEGRATION_NODES - 1) as f64;
    let integrand = |i: usize| {
        // the signal decays like 1/δ³ while the Jacobian grows like δ²
        if (i == 0 && scene.chi >= 0.0) || (i == INTEGRATION_NODES - 1 && scene.chi < 0.0) {
            return 0.0;
        }
        let u = u_lo + h * i as f64;
        let delta = center + kappa * u.tan();
        signal_at(delta, scene) * kappa / u.cos().powi(2)
    };
    // composite Simpson rule over an even number of intervals
    let inner: f64 = (1..INTEGRATION_NODES - 1)
        .map(|i| if i % 2 == 1 { 4.0 } else { 2.0 } * integrand(i))
        .sum();
    h / 3.0 * (inner + integrand(0) + integrand(INTEGRATION_NODES - 1))
}

/// Frequency-integrated signal and SNR, closed form and numeric.
pub fn snr_integrated(scene: &ScatterScene) -> IntegratedSnr {
    let (hot, cold) = scene.central_occupancies();
    let mut warnings = Vec::new();
    let ratio = (scene.chi / scene.kappa).abs();
    if ratio < 5.0 {
        warnings.push(format!(
            "chi/kappa = {ratio:.3} < 5: resonances overlap and the pi*kappa approximation is poor"
        ));
    }
    let signal_closed_form = PI * scene.kappa * (hot - cold);
    let signal_numeric = integrated_signal(scene);
    let relative_error = if signal_closed_form == 0.0 {
        if signal_numeric == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        (signal_numeric - signal_closed_form) / signal_closed_form
    };
    let snr = (PI * scene.kappa * scene.duration).sqrt() * (hot - cold)
        / ((hot + 1.0).powi(2) + (cold + 1.0).powi(2)).sqrt();
    IntegratedSnr { signal_closed_form, signal_numeric, relative_error, snr, warnings }
}

pub const CSV_HEADER: &str = "detuning_hz,s_plus,s_minus,signal,transmission_difference,snr_p";

/// Writes a spectral result as CSV, detunings converted to Hz.
pub fn write_csv<W: Write>(mut out: W, result: &SpectralResult) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for i in 0..result.detuning_grid.len() {
        writeln!(
            out,
            "{:.9e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e}",
            hertz(result.detuning_grid[i]),
            result.s_plus[i],
            result.s_minus[i],
            result.signal[i],
            result.transmission_difference[i],
            result.snr_p[i]
        )?;
    }
    Ok(())
}
