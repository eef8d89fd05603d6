//! Histogram SNR, `2|c_g − c_e| / (σ_g + σ_e)`, and the coherent-light pipeline.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{coherent_state, DensityMatrix, FockVector, TruncationPolicy, MODE};
use crate::rng::{CLASS_E, CLASS_G};

use super::sampler::sample_quadratures;

/// Class centers, widths and the resulting SNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrResult {
    pub center_g: f64,
    pub center_e: f64,
    pub sigma_g: f64,
    pub sigma_e: f64,
    pub snr: f64,
}

fn mean_and_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mu = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (n - 1.0);
    (mu, var.sqrt())
}

impl SnrResult {
    /// From scalar measurement signals of the two classes.
    pub fn from_signals(g: &[f64], e: &[f64]) -> Result<Self> {
        if g.len() < 2 || e.len() < 2 {
            return Err(Error::Domain("each class needs at least two shots".into()));
        }
        let (center_g, sigma_g) = mean_and_std(g);
        let (center_e, sigma_e) = mean_and_std(e);
        if !(sigma_g > 0.0 && sigma_e > 0.0) {
            return Err(Error::DegenerateData("a class has zero spread".into()));
        }
        Ok(Self {
            center_g,
            center_e,
            sigma_g,
            sigma_e,
            snr: 2.0 * (center_g - center_e).abs() / (sigma_g + sigma_e),
        })
    }

    /// From I/Q points, projected onto the empirical mean-difference axis.
    pub fn from_iq(g: &[Complex64], e: &[Complex64]) -> Result<Self> {
        if g.is_empty() || e.is_empty() {
            return Err(Error::Domain("each class needs at least two shots".into()));
        }
        let mean = |xs: &[Complex64]| xs.iter().sum::<Complex64>() / xs.len() as f64;
        let diff = mean(g) - mean(e);
        let axis = if diff.norm() > 0.0 { diff / diff.norm() } else { Complex64::new(1.0, 0.0) };
        let project = |xs: &[Complex64]| xs.iter().map(|x| (x * axis.conj()).re).collect::<Vec<_>>();
        Self::from_signals(&project(g), &project(e))
    }
}

/// `η √(2 n_emit)`.
pub fn snr_model_coherent(n_emit: f64, eta: f64) -> f64 {
    eta * (2.0 * n_emit).sqrt()
}

/// Fock cutoff that keeps a coherent state of `n_emit` photons within `1e−12`.
fn coherent_policy(n_emit: f64) -> TruncationPolicy {
    let dim = (n_emit + 12.0 * n_emit.sqrt() + 24.0).ceil() as usize;
    TruncationPolicy::new(dim, 1e-12).expect("valid policy")
}

/// Monte-Carlo SNR of coherent-light readout: `|√n⟩` for |g⟩, vacuum for |e⟩,
/// `shots` heterodyne outcomes per class.
pub fn coherent_snr_mc(n_emit: f64, eta: f64, shots: usize, seed: u64) -> Result<SnrResult> {
    if shots < 100 {
        return Err(Error::Domain(format!("need at least 100 shots, got {shots}")));
    }
    if !(n_emit >= 0.0) {
        return Err(Error::Domain(format!("emitted photon number must be >= 0, got {n_emit}")));
    }
    let policy = coherent_policy(n_emit);
    let lit = coherent_state(Complex64::new(n_emit.sqrt(), 0.0), &policy)?.to_density(MODE)?;
    let dark: DensityMatrix = FockVector::number(0, policy.dim())?.to_density(MODE)?;
    let g: Vec<Complex64> = sample_quadratures(&lit, eta, shots, seed, CLASS_G)?
        .into_iter()
        .map(|s| s.beta)
        .collect();
    let e: Vec<Complex64> = sample_quadratures(&dark, eta, shots, seed, CLASS_E)?
        .into_iter()
        .map(|s| s.beta)
        .collect();
    SnrResult::from_iq(&g, &e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_examples() {
        assert_eq!(snr_model_coherent(0.0, 0.3), 0.0);
        assert_eq!(snr_model_coherent(2.0, 1.0), 2.0);
        assert!((snr_model_coherent(8.0, 0.2) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn snr_definition() {
        let r = SnrResult::from_signals(&[1.0, 3.0], &[-1.0, -3.0]).unwrap();
        let sigma = 2.0f64.sqrt();
        assert!((r.snr - 2.0 * 4.0 / (2.0 * sigma)).abs() < 1e-12);
        assert!(SnrResult::from_signals(&[1.0, 1.0], &[0.0, 2.0]).is_err());
    }

    #[test]
    fn coherent_mc_matches_model() {
        let r = coherent_snr_mc(8.0, 1.0, 100_000, 17).unwrap();
        assert!((r.snr / 4.0 - 1.0).abs() < 0.02, "{r:?}");
        let r = coherent_snr_mc(8.0, 0.2, 100_000, 18).unwrap();
        assert!((r.snr / 0.8 - 1.0).abs() < 0.03, "{r:?}");
    }

    #[test]
    fn dark_readout_has_no_snr() {
        let shots = 10_000;
        let r = coherent_snr_mc(0.0, 1.0, shots, 19).unwrap();
        assert!(r.snr < 3.0 / (shots as f64).sqrt(), "{r:?}");
    }

    #[test]
    fn snr_is_rotation_invariant() {
        let g: Vec<Complex64> = (0..500).map(|k| Complex64::new((k as f64 * 0.37).sin() + 1.0, (k as f64 * 0.91).cos())).collect();
        let e: Vec<Complex64> = (0..500).map(|k| Complex64::new((k as f64 * 0.53).cos(), (k as f64 * 0.29).sin() - 0.4)).collect();
        let base = SnrResult::from_iq(&g, &e).unwrap();
        let rot = Complex64::from_polar(1.0, 1.234);
        let gr: Vec<Complex64> = g.iter().map(|x| x * rot).collect();
        let er: Vec<Complex64> = e.iter().map(|x| x * rot).collect();
        let turned = SnrResult::from_iq(&gr, &er).unwrap();
        assert!((base.snr - turned.snr).abs() < 1e-12);
    }

    #[test]
    fn rejects_too_few_shots() {
        assert!(coherent_snr_mc(1.0, 1.0, 99, 0).is_err());
    }
}
