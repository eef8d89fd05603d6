//! Seeded additive noise for synthetic calibration data.

use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Stream tag reserved for calibration noise.
pub const NOISE_STREAM: u64 = 7;

/// `clean[i] + N(0, sigma²)`, drawn in index order from `(seed, NOISE_STREAM)`.
pub fn add_gaussian_noise(clean: &[f64], sigma: f64, seed: u64) -> Result<Vec<f64>> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::Domain(format!("noise level must be finite and >= 0, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(clean.to_vec());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::Domain(e.to_string()))?;
    let mut rng = stream_rng(seed, NOISE_STREAM);
    Ok(clean.iter().map(|c| c + normal.sample(&mut rng)).collect())
}
