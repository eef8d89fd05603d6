//! Synthetic demodulated records for thermal-light readout.
//!
//! The cavity output is modelled as complex Gaussian noise with a Lorentzian
//! line of half-width `κ/2` (rad/s), discretised as a one-pole AR(1) process
//! with pole `exp(−κ dt / 2)`. The line appears as two image sidebands at
//! `±Δf` of the selected resonance, each carrying half the photon flux. The
//! amplifier adds complex white noise of variance 1/2 per quadrature per
//! sample.
//!
//! Flux normalisation: a cavity at occupancy `n̄` emits `n̄κ` photons per
//! second, so the summed signal power over a trace of length `T` is `n̄κT`
//! photons times `η²`.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::rng::{stream_rng, CLASS_E, CLASS_G};

/// Fewest samples a simulated record may contain.
pub const MIN_TRACE_SAMPLES: usize = 64;

/// Qubit preparation a record was taken with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QubitLabel {
    G,
    E,
}

impl QubitLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::G => "g",
            Self::E => "e",
        }
    }

    /// RNG class tag of this preparation.
    pub fn class(self) -> u64 {
        match self {
            Self::G => CLASS_G,
            Self::E => CLASS_E,
        }
    }

    /// Demodulated offset of the resonance this preparation selects, Hz.
    pub fn demod_offset(self, params: &SystemParams) -> f64 {
        match self {
            Self::G => params.demod_offset_g,
            Self::E => params.demod_offset_e,
        }
    }
}

impl fmt::Display for QubitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QubitLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "g" | "G" => Ok(Self::G),
            "e" | "E" => Ok(Self::E),
            other => Err(Error::Config(format!("unknown qubit label `{other}`, expected g or e"))),
        }
    }
}

/// Uniformly sampled `I(t) + iQ(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeterodyneTrace {
    pub samples: Vec<Complex64>,
    /// Sample interval, s.
    pub dt: f64,
    pub qubit_label: QubitLabel,
    /// Offset of the selected resonance, Hz.
    pub demod_offset: f64,
}

impl HeterodyneTrace {
    pub fn new(samples: Vec<Complex64>, dt: f64, qubit_label: QubitLabel, demod_offset: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidState(format!("a trace needs at least 2 samples, got {}", samples.len())));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidState(format!("sample interval must be positive, got {dt}")));
        }
        Ok(Self { samples, dt, qubit_label, demod_offset })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.samples.len() as f64
    }
}

/// Emitted photons of a thermal readout counted over both resonances,
/// `2 n̄ κ T`.
pub fn thermal_emitted_photons(nbar: f64, duration: f64, params: &SystemParams) -> f64 {
    2.0 * nbar * params.kappa * duration
}

/// Number of samples in a record of `duration` seconds.
pub fn trace_length(duration: f64, params: &SystemParams) -> Result<usize> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::Config(format!("duration must be positive, got {duration}")));
    }
    if !(params.sample_rate > 0.0) {
        return Err(Error::Config(format!("sample rate must be positive, got {}", params.sample_rate)));
    }
    let n = (duration * params.sample_rate).round() as usize;
    if n < MIN_TRACE_SAMPLES {
        return Err(Error::Config(format!(
            "duration {duration} s gives {n} samples, need at least {MIN_TRACE_SAMPLES}"
        )));
    }
    Ok(n)
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(s * re, s * im)
}

fn check_inputs(nbar: f64, params: &SystemParams) -> Result<()> {
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::Config(format!("nbar must be finite and >= 0, got {nbar}")));
    }
    if !(params.kappa > 0.0) {
        return Err(Error::Config(format!("kappa must be positive, got {}", params.kappa)));
    }
    if !(params.eta > 0.0 && params.eta <= 1.0) {
        return Err(Error::Config(format!("eta must lie in (0, 1], got {}", params.eta)));
    }
    Ok(())
}

/// Draws a record of `n` samples from `rng`. Inputs must already be checked.
pub(crate) fn draw_thermal_trace<R: Rng + ?Sized>(
    rng: &mut R,
    label: QubitLabel,
    params: &SystemParams,
    nbar: f64,
    n: usize,
) -> HeterodyneTrace {
    let dt = params.dt();
    let offset = label.demod_offset(params);
    let pole = (-0.5 * params.kappa * dt).exp();
    let sideband_var = params.eta * params.eta * nbar * params.kappa * dt / 2.0;
    let innovation_var = sideband_var * (1.0 - pole * pole);
    let mut upper = complex_normal(rng, sideband_var);
    let mut lower = complex_normal(rng, sideband_var);
    let step = Complex64::from_polar(1.0, TAU * offset * dt);
    let mut carrier = Complex64::new(1.0, 0.0);
    let mut samples = Vec::with_capacity(n);
    for k in 0..n {
        if k > 0 {
            upper = upper * pole + complex_normal(rng, innovation_var);
            lower = lower * pole + complex_normal(rng, innovation_var);
            carrier *= step;
            // keep the phasor on the unit circle over long records
            if k % 1024 == 0 {
                carrier = Complex64::from_polar(1.0, TAU * offset * dt * k as f64);
            }
        }
        let noise = complex_normal(rng, 1.0);
        samples.push(upper * carrier + lower * carrier.conj() + noise);
    }
    HeterodyneTrace { samples, dt, qubit_label: label, demod_offset: offset }
}

/// One thermal-light record for the given qubit preparation.
pub fn simulate_thermal_trace(
    label: QubitLabel,
    params: &SystemParams,
    nbar: f64,
    duration: f64,
    seed: u64,
) -> Result<HeterodyneTrace> {
    check_inputs(nbar, params)?;
    let n = trace_length(duration, params)?;
    let mut rng = stream_rng(seed, label.class() << 56);
    Ok(draw_thermal_trace(&mut rng, label, params, nbar, n))
}

pub(crate) fn validate_thermal(nbar: f64, duration: f64, params: &SystemParams) -> Result<usize> {
    check_inputs(nbar, params)?;
    trace_length(duration, params)
}
