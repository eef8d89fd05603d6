//! Husimi (heterodyne) sampling of single-mode field states.
//!
//! An outcome `β` is drawn with density `⟨β|ρ|β⟩/π`, in units where the
//! vacuum has per-quadrature variance 1/2. The state is split into its
//! eigen-mixture; for each pure component `|ψ⟩ = Σ ψ_m |m⟩` the radial
//! marginal of `|β|²` is a mixture of `Gamma(m+1, 1)` laws weighted by
//! `|ψ_m|²`, and the phase is drawn by rejection from
//! `|Σ ψ_m c_m(r) e^{−imφ}|²`, bounded by `(Σ |ψ_m| c_m(r))²`.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::distr::weighted::WeightedIndex;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{hermitian_eigh, DensityMatrix};
use crate::rng::{shot_rng, stream_rng};

/// One heterodyne outcome, `β = I + iQ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSample {
    pub beta: Complex64,
}

/// Pure-loss channel with power transmissivity `t` on a single mode.
///
/// Kraus operators `A_k|n⟩ = √C(n,k) t^{(n−k)/2} (1−t)^{k/2} |n−k⟩`.
pub fn attenuate(field: &DensityMatrix, transmissivity: f64) -> Result<DensityMatrix> {
    if field.dims().len() != 1 {
        return Err(Error::InvalidState(format!("expected a single mode, got dims {:?}", field.dims())));
    }
    if !(0.0..=1.0).contains(&transmissivity) {
        return Err(Error::Domain(format!("transmissivity must lie in [0, 1], got {transmissivity}")));
    }
    if transmissivity == 1.0 {
        return Ok(field.clone());
    }
    let d = field.dim();
    let rho = field.matrix();
    // ln C(n, k) via cumulative log-factorials
    let mut ln_fact = vec![0.0; d + 1];
    for n in 1..=d {
        ln_fact[n] = ln_fact[n - 1] + (n as f64).ln();
    }
    let ln_choose = |n: usize, k: usize| ln_fact[n] - ln_fact[k] - ln_fact[n - k];
    let (ln_t, ln_r) = (transmissivity.ln(), (1.0 - transmissivity).ln());
    let mut out = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
    for m in 0..d {
        for n in 0..d {
            let value = rho[(m, n)];
            if value == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..=m.min(n) {
                let kept = (m + n - 2 * k) as f64 / 2.0;
                let lost = k as f64;
                // 0·ln 0 terms: t = 0 keeps only full loss, t = 1 handled above
                let ln_w = 0.5 * (ln_choose(m, k) + ln_choose(n, k))
                    + if kept == 0.0 { 0.0 } else { kept * ln_t }
                    + if lost == 0.0 { 0.0 } else { lost * ln_r };
                out[(m - k, n - k)] += value * ln_w.exp();
            }
        }
    }
    DensityMatrix::new(out, field.dims().to_vec(), field.labels().to_vec())
}

struct PureComponent {
    amplitudes: Vec<Complex64>,
    photon_number: WeightedIndex<f64>,
    /// Some(m) when the component is the number state |m⟩.
    number_state: Option<usize>,
}

/// Reusable Husimi sampler for one field state and detection efficiency.
pub struct HusimiSampler {
    components: Vec<PureComponent>,
    mixture: WeightedIndex<f64>,
    gammas: Vec<Gamma<f64>>,
}

impl HusimiSampler {
    /// `eta` is the amplitude efficiency: the field passes a beam splitter
    /// of power transmissivity `η²` before vacuum-limited detection.
    pub fn new(field: &DensityMatrix, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::Domain(format!("efficiency must lie in (0, 1], got {eta}")));
        }
        let detected = attenuate(field, eta * eta)?;
        let d = detected.dim();
        let mut components = Vec::new();
        let mut weights = Vec::new();
        for (lambda, v) in hermitian_eigh(detected.matrix()) {
            if lambda <= 1e-15 {
                continue;
            }
            let populations: Vec<f64> = v.iter().map(|c| c.norm_sqr()).collect();
            let support: Vec<usize> = (0..d).filter(|&m| populations[m] > 1e-30).collect();
            let photon_number = WeightedIndex::new(&populations)
                .map_err(|e| Error::InvalidState(format!("eigenvector weights: {e}")))?;
            components.push(PureComponent {
                amplitudes: v.iter().copied().collect(),
                photon_number,
                number_state: (support.len() == 1).then(|| support[0]),
            });
            weights.push(lambda);
        }
        let mixture = WeightedIndex::new(&weights).map_err(|e| Error::InvalidState(format!("spectrum: {e}")))?;
        let gammas = (0..d)
            .map(|m| Gamma::new(m as f64 + 1.0, 1.0).expect("shape and scale are positive"))
            .collect();
        Ok(Self { components, mixture, gammas })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> QuadratureSample {
        let component = &self.components[self.mixture.sample(rng)];
        let m = component.photon_number.sample(rng);
        let r = self.gammas[m].sample(rng).sqrt();
        let phi = match component.number_state {
            Some(_) => rng.random::<f64>() * TAU,
            None => sample_phase(&component.amplitudes, r, rng),
        };
        QuadratureSample { beta: Complex64::from_polar(r, phi) }
    }
}

fn sample_phase<R: Rng + ?Sized>(amplitudes: &[Complex64], r: f64, rng: &mut R) -> f64 {
    // c_m = e^{−r²/2} r^m / √m!, built up iteratively
    let mut weights = Vec::with_capacity(amplitudes.len());
    let mut c = (-r * r / 2.0).exp();
    for (m, psi) in amplitudes.iter().enumerate() {
        if m > 0 {
            c *= r / (m as f64).sqrt();
        }
        weights.push(*psi * c);
    }
    let bound: f64 = weights.iter().map(|w| w.norm()).sum::<f64>().powi(2);
    loop {
        let phi = rng.random::<f64>() * TAU;
        let step = Complex64::from_polar(1.0, -phi);
        let mut phase = Complex64::new(1.0, 0.0);
        let mut overlap = Complex64::new(0.0, 0.0);
        for w in &weights {
            overlap += w * phase;
            phase *= step;
        }
        if rng.random::<f64>() * bound <= overlap.norm_sqr() {
            return phi;
        }
    }
}

/// Single heterodyne outcome for `field` at efficiency `eta`.
pub fn sample_quadrature(field: &DensityMatrix, eta: f64, seed: u64) -> Result<QuadratureSample> {
    let sampler = HusimiSampler::new(field, eta)?;
    Ok(sampler.sample(&mut stream_rng(seed, 0)))
}

/// `shots` outcomes; shot `k` uses stream `(class, k)` of `seed`, so the
/// result is independent of the thread count.
pub fn sample_quadratures(
    field: &DensityMatrix,
    eta: f64,
    shots: usize,
    seed: u64,
    class: u64,
) -> Result<Vec<QuadratureSample>> {
    let sampler = HusimiSampler::new(field, eta)?;
    Ok((0..shots)
        .into_par_iter()
        .map(|k| sampler.sample(&mut shot_rng(seed, class, k as u64)))
        .collect())
}

/// Empirical heterodyne moments with standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplifierMoments {
    pub samples: usize,
    pub mean_re: f64,
    pub mean_im: f64,
    pub var_re: f64,
    pub var_im: f64,
    /// Variance of `|β|²`.
    pub var_abs2: f64,
    pub se_mean_re: f64,
    pub se_var_re: f64,
    pub se_var_im: f64,
    pub se_var_abs2: f64,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance and the standard error of that variance estimate.
fn variance_with_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mu = mean(xs);
    let sq: Vec<f64> = xs.iter().map(|x| (x - mu).powi(2)).collect();
    let var = sq.iter().sum::<f64>() / (n - 1.0);
    let var_of_sq = sq.iter().map(|s| (s - var).powi(2)).sum::<f64>() / (n - 1.0);
    (var, (var_of_sq / n).sqrt())
}

/// Heterodyne statistics of `field` from `samples` Monte-Carlo shots.
pub fn amplifier_moments(field: &DensityMatrix, eta: f64, samples: usize, seed: u64) -> Result<AmplifierMoments> {
    if samples < 2 {
        return Err(Error::Domain("need at least two samples".into()));
    }
    let outcomes = sample_quadratures(field, eta, samples, seed, 0)?;
    let re: Vec<f64> = outcomes.iter().map(|s| s.beta.re).collect();
    let im: Vec<f64> = outcomes.iter().map(|s| s.beta.im).collect();
    let abs2: Vec<f64> = outcomes.iter().map(|s| s.beta.norm_sqr()).collect();
    let (var_re, se_var_re) = variance_with_error(&re);
    let (var_im, se_var_im) = variance_with_error(&im);
    let (var_abs2, se_var_abs2) = variance_with_error(&abs2);
    Ok(AmplifierMoments {
        samples,
        mean_re: mean(&re),
        mean_im: mean(&im),
        var_re,
        var_im,
        var_abs2,
        se_mean_re: (var_re / samples as f64).sqrt(),
        se_var_re,
        se_var_im,
        se_var_abs2,
    })
}
