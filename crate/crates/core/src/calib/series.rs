//! Intracavity photon-number time series and CSV inputs for calibration.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bin width of a photon-number series, s.
pub const DEFAULT_SERIES_DT: f64 = 200e-9;

/// `n_c(t_i)` sampled every `dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonSeries {
    pub times: Vec<f64>,
    pub n_c: Vec<f64>,
    pub dt: f64,
}

impl PhotonSeries {
    pub fn new(times: Vec<f64>, n_c: Vec<f64>, dt: f64) -> Result<Self> {
        if times.len() != n_c.len() {
            return Err(Error::LengthMismatch { expected: times.len(), found: n_c.len() });
        }
        if let Some(n) = n_c.iter().find(|n| !(**n >= 0.0)) {
            return Err(Error::InvalidState(format!("photon numbers must be >= 0, found {n}")));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidState(format!("bin width must be positive, got {dt}")));
        }
        Ok(Self { times, n_c, dt })
    }

    /// Series on the grid `t_i = i dt`.
    pub fn uniform(n_c: Vec<f64>, dt: f64) -> Result<Self> {
        let times = (0..n_c.len()).map(|i| i as f64 * dt).collect();
        Self::new(times, n_c, dt)
    }
}

/// `Σ n_c(t_i) κ Δt`, doubled when both resonances are driven.
pub fn emitted_photons(series: &PhotonSeries, kappa: f64, two_resonance: bool) -> Result<f64> {
    if series.n_c.is_empty() {
        return Err(Error::Domain("photon series is empty".into()));
    }
    let single: f64 = series.n_c.iter().map(|n| n * kappa * series.dt).sum();
    Ok(if two_resonance { 2.0 * single } else { single })
}

fn read_pairs<R: Read>(input: R) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(input);
    for row in reader.deserialize() {
        let (x, y): (f64, f64) = row?;
        a.push(x);
        b.push(y);
    }
    Ok((a, b))
}

/// Reads `frequency_hz,amplitude` rows into `(grid, data)`.
pub fn read_spectrum_csv<R: Read>(input: R) -> Result<(Vec<f64>, Vec<f64>)> {
    read_pairs(input)
}

/// Reads `time_s,n_c` rows. `dt` comes from the first two times, or the
/// default for a single row.
pub fn read_photon_series_csv<R: Read>(input: R) -> Result<PhotonSeries> {
    let (times, n_c) = read_pairs(input)?;
    let dt = if times.len() >= 2 { times[1] - times[0] } else { DEFAULT_SERIES_DT };
    PhotonSeries::new(times, n_c, dt)
}

/// Reads `p_in,n_emit` rows.
pub fn read_saturation_csv<R: Read>(input: R) -> Result<(Vec<f64>, Vec<f64>)> {
    read_pairs(input)
}
