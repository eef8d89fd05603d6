//! Amplitude spectra of demodulated records and the weighted thermal signal.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::rng::shot_rng;

use super::snr::SnrResult;
use super::trace::{draw_thermal_trace, validate_thermal, HeterodyneTrace, QubitLabel};

/// `|FFT|` on a centred frequency grid, most negative frequency first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeSpectrum {
    /// Hz.
    pub freqs: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub background_subtracted: bool,
}

impl AmplitudeSpectrum {
    pub fn new(freqs: Vec<f64>, amplitudes: Vec<f64>, background_subtracted: bool) -> Result<Self> {
        if freqs.len() != amplitudes.len() {
            return Err(Error::LengthMismatch { expected: freqs.len(), found: amplitudes.len() });
        }
        if let Some(a) = amplitudes.iter().find(|a| !(**a >= 0.0)) {
            return Err(Error::InvalidState(format!("amplitudes must be >= 0, found {a}")));
        }
        Ok(Self { freqs, amplitudes, background_subtracted })
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Frequency of the largest amplitude.
    pub fn peak_frequency(&self) -> f64 {
        let (i, _) = self
            .amplitudes
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &a)| if a > best.1 { (i, a) } else { best });
        self.freqs[i]
    }

    /// Pointwise mean of spectra on a shared grid.
    pub fn average(spectra: &[AmplitudeSpectrum]) -> Result<Self> {
        let first = spectra.first().ok_or_else(|| Error::Domain("cannot average zero spectra".into()))?;
        let mut acc = vec![0.0; first.len()];
        for s in spectra {
            if s.len() != acc.len() {
                return Err(Error::LengthMismatch { expected: acc.len(), found: s.len() });
            }
            for (a, v) in acc.iter_mut().zip(&s.amplitudes) {
                *a += v;
            }
        }
        let n = spectra.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        Ok(Self { freqs: first.freqs.clone(), amplitudes: acc, background_subtracted: first.background_subtracted })
    }
}

/// Taper applied before the transform.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    #[default]
    None,
    Hann,
}

/// Centred FFT frequencies for `m` samples at interval `dt`.
pub fn fft_frequencies(m: usize, dt: f64) -> Vec<f64> {
    let half = m / 2;
    (0..m).map(|i| (i as f64 - half as f64) / (m as f64 * dt)).collect()
}

fn centred_magnitudes(samples: &[Complex64], window: Window) -> Vec<f64> {
    let m = samples.len();
    let mut buf: Vec<Complex64> = match window {
        Window::None => samples.to_vec(),
        Window::Hann => samples
            .iter()
            .enumerate()
            .map(|(k, z)| z * (0.5 - 0.5 * (2.0 * PI * k as f64 / m as f64).cos()))
            .collect(),
    };
    FftPlanner::<f64>::new().plan_fft_forward(m).process(&mut buf);
    let half = m / 2;
    (0..m).map(|i| buf[(i + m - half) % m].norm()).collect()
}

/// Amplitude spectrum of `trace` with an optional background subtracted and
/// clamped at zero. No window.
pub fn amplitude_spectrum(trace: &HeterodyneTrace, background: Option<&AmplitudeSpectrum>) -> Result<AmplitudeSpectrum> {
    amplitude_spectrum_windowed(trace, background, Window::None)
}

/// As [`amplitude_spectrum`] with a chosen taper.
pub fn amplitude_spectrum_windowed(
    trace: &HeterodyneTrace,
    background: Option<&AmplitudeSpectrum>,
    window: Window,
) -> Result<AmplitudeSpectrum> {
    let mut amplitudes = centred_magnitudes(&trace.samples, window);
    let freqs = fft_frequencies(trace.len(), trace.dt);
    if let Some(bg) = background {
        if bg.len() != amplitudes.len() {
            return Err(Error::LengthMismatch { expected: amplitudes.len(), found: bg.len() });
        }
        for (a, b) in amplitudes.iter_mut().zip(&bg.amplitudes) {
            *a = (*a - b).max(0.0);
        }
    }
    Ok(AmplitudeSpectrum { freqs, amplitudes, background_subtracted: background.is_some() })
}

/// `Σ_k A_k w_k`.
pub fn thermal_measurement_signal(spectrum: &AmplitudeSpectrum, weight: &[f64]) -> Result<f64> {
    if weight.len() != spectrum.len() {
        return Err(Error::LengthMismatch { expected: spectrum.len(), found: weight.len() });
    }
    Ok(spectrum.amplitudes.iter().zip(weight).map(|(a, w)| a * w).sum())
}

/// Weight function: averaged |g⟩ spectrum minus averaged |e⟩ spectrum.
pub fn difference_weight(mean_g: &AmplitudeSpectrum, mean_e: &AmplitudeSpectrum) -> Result<Vec<f64>> {
    if mean_g.len() != mean_e.len() {
        return Err(Error::LengthMismatch { expected: mean_g.len(), found: mean_e.len() });
    }
    Ok(mean_g.amplitudes.iter().zip(&mean_e.amplitudes).map(|(g, e)| g - e).collect())
}

/// Spectra of `shots` independent records of one preparation, shot `k`
/// drawn from stream `(seed, class, k)`.
pub fn thermal_spectra(
    label: QubitLabel,
    params: &SystemParams,
    nbar: f64,
    duration: f64,
    shots: std::ops::Range<usize>,
    seed: u64,
) -> Result<Vec<AmplitudeSpectrum>> {
    let n = validate_thermal(nbar, duration, params)?;
    shots
        .into_par_iter()
        .map(|k| {
            let mut rng = shot_rng(seed, label.class(), k as u64);
            let trace = draw_thermal_trace(&mut rng, label, params, nbar, n);
            amplitude_spectrum(&trace, None)
        })
        .collect()
}

/// Train/evaluate thermal SNR.
///
/// For each preparation, the first half of `shots` records builds the class
/// mean spectra and the weight; the second half is scored with that weight.
pub fn thermal_snr_mc(nbar: f64, duration: f64, params: &SystemParams, shots: usize, seed: u64) -> Result<SnrResult> {
    if shots < 100 {
        return Err(Error::Domain(format!("need at least 100 shots, got {shots}")));
    }
    let split = shots / 2;
    let train_g = thermal_spectra(QubitLabel::G, params, nbar, duration, 0..split, seed)?;
    let train_e = thermal_spectra(QubitLabel::E, params, nbar, duration, 0..split, seed)?;
    let weight = difference_weight(&AmplitudeSpectrum::average(&train_g)?, &AmplitudeSpectrum::average(&train_e)?)?;
    drop((train_g, train_e));
    let score = |label| -> Result<Vec<f64>> {
        thermal_spectra(label, params, nbar, duration, split..shots, seed)?
            .iter()
            .map(|s| thermal_measurement_signal(s, &weight))
            .collect()
    };
    SnrResult::from_signals(&score(QubitLabel::G)?, &score(QubitLabel::E)?)
}
