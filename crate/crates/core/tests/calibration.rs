//! Calibration round trips: synthetic spectra and saturation curves.

use qreadout::calib::{
    fit_saturation, fit_spectrum, saturation_model, synth_spectrum, LinewidthMode, PhotonDistribution, SpectrumFixed,
    SpectrumModel,
};
use qreadout::params::angular;
use qreadout::rng::stream_rng;
use rand_distr::{Distribution, Normal};

fn grid() -> Vec<f64> {
    (0..1201).map(|k| -110e6 + k as f64 * 0.1e6).collect()
}

fn truth(distribution: PhotonDistribution, mode: LinewidthMode) -> SpectrumModel {
    SpectrumModel { peak_spacing: -12.6e6, gamma_intrinsic: 0.8e6, linewidth_mode: mode, distribution, amplitude: 1.0e6 }
}

fn fixed() -> SpectrumFixed {
    SpectrumFixed { peak_spacing: -12.6e6, kappa: angular(0.5e6), n_max: 40 }
}

#[test]
fn noiseless_round_trip_over_photon_numbers_and_families() {
    let g = grid();
    for nbar in [0.3, 1.0, 3.0] {
        for dist in [PhotonDistribution::Poisson { nbar }, PhotonDistribution::Geometric { nbar }] {
            let model = truth(dist, LinewidthMode::ThermalOff);
            let data = synth_spectrum(&model, &g, fixed().n_max, fixed().kappa).unwrap();
            let init = SpectrumModel { distribution: dist.with_nbar(1.0), gamma_intrinsic: 1.5e6, ..model };
            let (fit, report) = fit_spectrum(&data, &g, fixed(), &init).unwrap();
            assert!((fit.distribution.nbar() - nbar).abs() < 1e-4, "{dist:?}: {report:?}");
        }
    }
}

#[test]
fn two_percent_noise_recovers_photon_number() {
    let g = grid();
    let nbar = 1.5;
    let model = truth(PhotonDistribution::Poisson { nbar }, LinewidthMode::Coherent);
    let clean = synth_spectrum(&model, &g, fixed().n_max, fixed().kappa).unwrap();
    let peak = clean.iter().cloned().fold(0.0, f64::max);
    let noise = Normal::new(0.0, 0.02 * peak).unwrap();
    let init = SpectrumModel { distribution: PhotonDistribution::Poisson { nbar: 1.0 }, gamma_intrinsic: 1.5e6, ..model };
    let good = (0..100u64)
        .filter(|seed| {
            let mut rng = stream_rng(*seed, 7);
            let data: Vec<f64> = clean.iter().map(|c| c + noise.sample(&mut rng)).collect();
            match fit_spectrum(&data, &g, fixed(), &init) {
                Ok((fit, _)) => (fit.distribution.nbar() / nbar - 1.0).abs() < 0.05,
                Err(_) => false,
            }
        })
        .count();
    assert!(good >= 95, "{good} of 100 within 5%");
}

#[test]
fn saturation_round_trip() {
    let p: Vec<f64> = (1..=15).map(|k| 0.04 * k as f64).collect();
    let n: Vec<f64> = p.iter().map(|x| saturation_model(*x, 10.0, 0.3)).collect();
    let fit = fit_saturation(&p, &n).unwrap();
    assert!((fit.a.unwrap() - 10.0).abs() < 1e-6);
    assert!((fit.b.unwrap() - 0.3).abs() < 1e-6);
}
