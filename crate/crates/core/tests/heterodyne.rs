//! Measurement-channel properties: sampler statistics, SNR convergence,
//! thermal spectra and thread-count independence.

use num_complex::Complex64;
use qreadout::fock::{coherent_state, thermal_state, TruncationPolicy, MODE};
use qreadout::heterodyne::{
    amplifier_moments, amplitude_spectrum, coherent_snr_mc, difference_weight, sample_quadratures, simulate_thermal_trace,
    snr_model_coherent, thermal_emitted_photons, thermal_measurement_signal, thermal_snr_mc, thermal_spectra,
    AmplitudeSpectrum, QubitLabel,
};
use qreadout::params::{hertz, SystemParams};

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn thermal_marginals_within_four_standard_errors() {
    let policy = TruncationPolicy::new(128, 1e-12).unwrap();
    for (k, nbar) in [0.0, 1.0, 3.0].into_iter().enumerate() {
        let field = thermal_state(nbar, &policy).unwrap();
        let m = amplifier_moments(&field, 1.0, 100_000, 40 + k as u64).unwrap();
        assert!(m.mean_re.abs() < 4.0 * m.se_mean_re, "n̄={nbar}: {m:?}");
        assert!((m.var_re - (nbar + 1.0) / 2.0).abs() < 4.0 * m.se_var_re, "n̄={nbar}: {m:?}");
        assert!((m.var_im - (nbar + 1.0) / 2.0).abs() < 4.0 * m.se_var_im, "n̄={nbar}: {m:?}");
        assert!((m.var_abs2 - (nbar + 1.0).powi(2)).abs() < 4.0 * m.se_var_abs2, "n̄={nbar}: {m:?}");
    }
}

#[test]
fn coherent_mean_is_displacement() {
    let policy = TruncationPolicy::new(40, 1e-12).unwrap();
    let field = coherent_state(Complex64::new(2.0, 0.0), &policy).unwrap().to_density(MODE).unwrap();
    let m = amplifier_moments(&field, 1.0, 100_000, 7).unwrap();
    assert!((m.mean_re - 2.0).abs() < 4.0 * m.se_mean_re);
    assert!(m.mean_im.abs() < 4.0 * m.se_mean_re);
}

#[test]
fn coherent_snr_converges_to_model() {
    for (k, n) in [1.0, 2.0, 4.0, 8.0].into_iter().enumerate() {
        for (j, eta) in [0.2, 1.0].into_iter().enumerate() {
            let seed = 1000 + 10 * k as u64 + j as u64;
            let r = coherent_snr_mc(n, eta, 100_000, seed).unwrap();
            let model = snr_model_coherent(n, eta);
            assert!((r.snr / model - 1.0).abs() < 0.05, "n={n} η={eta}: {} vs {model}", r.snr);
        }
    }
}

#[test]
fn sampling_is_thread_count_independent() {
    let policy = TruncationPolicy::new(48, 1e-12).unwrap();
    let field = thermal_state(0.7, &policy).unwrap();
    let one = in_pool(1, || sample_quadratures(&field, 0.6, 5000, 99, 0).unwrap());
    let many = in_pool(4, || sample_quadratures(&field, 0.6, 5000, 99, 0).unwrap());
    assert_eq!(one, many);
    let p = SystemParams::reference_device();
    let a = in_pool(1, || thermal_snr_mc(0.5, 2e-6, &p, 200, 3).unwrap());
    let b = in_pool(3, || thermal_snr_mc(0.5, 2e-6, &p, 200, 3).unwrap());
    assert_eq!(a, b);
    let c = in_pool(1, || coherent_snr_mc(2.0, 0.5, 1000, 3).unwrap());
    let d = in_pool(5, || coherent_snr_mc(2.0, 0.5, 1000, 3).unwrap());
    assert_eq!(c, d);
}

/// Mean periodogram `E|X_k|²` of `traces` records.
fn mean_power(label: QubitLabel, p: &SystemParams, nbar: f64, duration: f64, traces: u64) -> AmplitudeSpectrum {
    let mut acc: Option<AmplitudeSpectrum> = None;
    for seed in 0..traces {
        let s = amplitude_spectrum(&simulate_thermal_trace(label, p, nbar, duration, seed).unwrap(), None).unwrap();
        let power: Vec<f64> = s.amplitudes.iter().map(|a| a * a / traces as f64).collect();
        match acc.as_mut() {
            None => acc = Some(AmplitudeSpectrum { amplitudes: power, ..s }),
            Some(a) => a.amplitudes.iter_mut().zip(&power).for_each(|(x, y)| *x += y),
        }
    }
    acc.unwrap()
}

/// Half width at half maximum of the peak nearest `center`, above `floor`.
fn half_width(s: &AmplitudeSpectrum, center: f64, floor: f64) -> (f64, f64) {
    let df = s.freqs[1] - s.freqs[0];
    let window = 2e6;
    let (ipk, _) = s
        .freqs
        .iter()
        .zip(&s.amplitudes)
        .enumerate()
        .filter(|(_, (f, _))| (**f - center).abs() < window)
        .fold((0, f64::NEG_INFINITY), |b, (i, (_, a))| if *a > b.1 { (i, *a) } else { b });
    let peak = s.amplitudes[ipk] - floor;
    let crossing = |dir: isize| {
        let mut i = ipk as isize;
        loop {
            let next = i + dir;
            let v = s.amplitudes[next as usize] - floor;
            if v < peak / 2.0 {
                let u = s.amplitudes[i as usize] - floor;
                let frac = (u - peak / 2.0) / (u - v);
                return (i - ipk as isize) as f64 * df * dir as f64 + frac * df;
            }
            i = next;
        }
    };
    (s.freqs[ipk], 0.5 * (crossing(1) + crossing(-1)))
}

#[test]
fn thermal_peaks_sit_at_demodulation_offsets_with_lorentzian_width() {
    let p = SystemParams::reference_device();
    let duration = 20e-6;
    let g = mean_power(QubitLabel::G, &p, 2.0, duration, 1000);
    let floor = {
        let far: Vec<f64> = g
            .freqs
            .iter()
            .zip(&g.amplitudes)
            .filter(|(f, _)| (f.abs() - 5e6).abs() < 2e6)
            .map(|(_, a)| *a)
            .collect();
        far.iter().sum::<f64>() / far.len() as f64
    };
    let bin = 1.0 / duration;
    for center in [p.demod_offset_g, -p.demod_offset_g] {
        let (f, hwhm) = half_width(&g, center, floor);
        assert!((f - center).abs() <= 1.001 * bin, "peak at {f}, expected {center}");
        let expected = hertz(p.kappa) / 2.0;
        assert!((hwhm / expected - 1.0).abs() < 0.15, "half width {hwhm} vs {expected}");
    }
    let e = mean_power(QubitLabel::E, &p, 2.0, duration, 200);
    for center in [p.demod_offset_e, -p.demod_offset_e] {
        let (f, _) = half_width(&e, center, floor);
        assert!((f - center).abs() <= 1.001 * bin);
    }
    let separation = p.demod_offset_e - p.demod_offset_g;
    assert!((separation - hertz(p.chi).abs() * 2.0).abs() < 0.2e6);
}

#[test]
fn peak_bin_within_one_bin_for_all_seeds() {
    let p = SystemParams::reference_device();
    let duration = 10e-6;
    for seed in 0..10u64 {
        let mut spectra = thermal_spectra(QubitLabel::G, &p, 2.0, duration, 0..100, seed).unwrap();
        // positive-frequency half only
        let avg = AmplitudeSpectrum::average(&spectra).unwrap();
        let half: Vec<(f64, f64)> = avg.freqs.iter().cloned().zip(avg.amplitudes.iter().cloned()).filter(|(f, _)| *f > 0.0).collect();
        let (fpk, _) = half.iter().cloned().fold((0.0, f64::NEG_INFINITY), |b, x| if x.1 > b.1 { x } else { b });
        assert!((fpk - p.demod_offset_g).abs() <= 1.001 / duration, "seed {seed}: {fpk}");
        spectra.clear();
    }
}

#[test]
fn background_subtracted_residual_vanishes_on_average() {
    let p = SystemParams::reference_device();
    let bg = AmplitudeSpectrum::average(&thermal_spectra(QubitLabel::G, &p, 1.0, 2e-6, 0..2000, 1).unwrap()).unwrap();
    let fresh = thermal_spectra(QubitLabel::G, &p, 1.0, 2e-6, 0..2000, 2).unwrap();
    let residual: f64 = fresh
        .iter()
        .map(|s| s.amplitudes.iter().zip(&bg.amplitudes).map(|(a, b)| a - b).sum::<f64>())
        .sum::<f64>()
        / (fresh.len() * bg.len()) as f64;
    let scale = bg.amplitudes.iter().sum::<f64>() / bg.len() as f64;
    assert!(residual.abs() < 2e-3 * scale, "{residual} vs {scale}");
}

#[test]
fn trained_weight_separates_fresh_classes() {
    let p = SystemParams::reference_device();
    let duration = 2e-6;
    let nbar = 4.0 / (p.kappa * duration);
    let g = thermal_spectra(QubitLabel::G, &p, nbar, duration, 0..1000, 8).unwrap();
    let e = thermal_spectra(QubitLabel::E, &p, nbar, duration, 0..1000, 8).unwrap();
    let w = difference_weight(
        &AmplitudeSpectrum::average(&g[..500]).unwrap(),
        &AmplitudeSpectrum::average(&e[..500]).unwrap(),
    )
    .unwrap();
    let stats = |set: &[AmplitudeSpectrum]| {
        let v: Vec<f64> = set.iter().map(|s| thermal_measurement_signal(s, &w).unwrap()).collect();
        let n = v.len() as f64;
        let mu = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (n - 1.0);
        (mu, (var / n).sqrt())
    };
    let (mg, seg) = stats(&g[500..]);
    let (me, see) = stats(&e[500..]);
    assert!(mg > me);
    assert!(mg - me > 5.0 * (seg * seg + see * see).sqrt());
}

#[test]
fn thermal_snr_grows_with_photon_flux() {
    let p = SystemParams::reference_device();
    let duration = 2e-6;
    let snrs: Vec<f64> = [0.5, 1.0, 2.0]
        .iter()
        .map(|x| thermal_snr_mc(x / (p.kappa * duration), duration, &p, 2000, 21).unwrap().snr)
        .collect();
    assert!(snrs[0] < snrs[1] && snrs[1] < snrs[2], "{snrs:?}");
}

/// Best histogram SNR any quadratic heterodyne statistic reaches for thermal
/// light carrying `photons` per record: spreading them evenly over `K`
/// modes gives `2N / √(2K + 2N + N²/K)`, largest at `K = N/√2`.
fn thermal_energy_detection_bound(photons: f64) -> f64 {
    let k = photons / 2f64.sqrt();
    2.0 * photons / (2.0 * k + 2.0 * photons + photons * photons / k).sqrt()
}

/// Thermal light with the same emitted-photon count gives a smaller SNR
/// than coherent light, bounded by energy detection of the `n_emit / 2`
/// photons a single record carries.
#[test]
fn thermal_snr_per_photon_against_coherent() {
    let p = SystemParams::reference_device();
    let duration = 2e-6;
    let n_emit = 4.0;
    let nbar = n_emit / (2.0 * p.kappa * duration);
    assert!((thermal_emitted_photons(nbar, duration, &p) - n_emit).abs() < 1e-12);
    let thermal = thermal_snr_mc(nbar, duration, &p, 4000, 5).unwrap().snr;
    let coherent = coherent_snr_mc(n_emit, 1.0, 10_000, 5).unwrap().snr;
    let bound = thermal_energy_detection_bound(n_emit / 2.0);
    let ratio = thermal / coherent;
    println!("thermal {thermal:.4} coherent {coherent:.4} ratio {ratio:.4} bound {bound:.4}");
    assert!(thermal < bound);
    assert!(bound / snr_model_coherent(n_emit, 1.0) < 0.5);
    assert!(ratio > 0.1, "ratio {ratio}");
}
