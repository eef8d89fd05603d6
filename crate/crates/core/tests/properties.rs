//! Property-based invariants across modules.

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use qreadout::calib::{emitted_photons, PhotonSeries};
use qreadout::fock::{
    dephase_fock_basis, partial_trace, tensor, thermal_state, von_neumann_entropy, DensityMatrix, LogBase,
    TruncationPolicy, MODE, QUBIT,
};
use qreadout::heterodyne::SnrResult;
use qreadout::scatter::{reflection, transmission, transmission_difference, Baths, Branch, ScatterScene, power_spectrum};
use qreadout::sources::{apply_source, qubit_coherence, SourceKind, SourceSpec};

fn random_state(entries: &[(f64, f64)], dim: usize, rank: usize, label: &str) -> DensityMatrix {
    // ρ = A A† / tr(A A†) with A of shape dim × rank
    let a = DMatrix::from_fn(dim, rank, |i, j| {
        let (re, im) = entries[(i * rank + j) % entries.len()];
        Complex64::new(re + 0.01 * (i + j) as f64, im)
    });
    let m = &a * a.adjoint();
    let tr = m.trace();
    DensityMatrix::new(m / tr, vec![dim], vec![label.to_string()]).unwrap()
}

fn entries() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_states_are_valid_and_bounded(e in entries(), dim in 1usize..8, rank in 1usize..4) {
        let rho = random_state(&e, dim, rank, MODE);
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-10);
        prop_assert!(rho.eigenvalues().iter().all(|l| *l > -1e-10));
        let s = von_neumann_entropy(&rho, LogBase::Two);
        prop_assert!(s >= 0.0 && s <= (dim as f64).log2() + 1e-9);
    }

    #[test]
    fn partial_trace_recovers_product_factors(e1 in entries(), e2 in entries(), dim in 1usize..6) {
        let q = random_state(&e1, 2, 2, QUBIT);
        let f = random_state(&e2, dim, 2, MODE);
        let joint = tensor(&q, &f).unwrap();
        prop_assert!(partial_trace(&joint, &[QUBIT]).unwrap().max_abs_diff(q.matrix()) < 1e-12);
        prop_assert!(partial_trace(&joint, &[MODE]).unwrap().max_abs_diff(f.matrix()) < 1e-12);
        let s_sum = von_neumann_entropy(&q, LogBase::E) + von_neumann_entropy(&f, LogBase::E);
        prop_assert!((von_neumann_entropy(&joint, LogBase::E) - s_sum).abs() < 1e-9);
    }

    #[test]
    fn dephasing_keeps_populations_and_raises_entropy(e in entries(), dim in 2usize..8) {
        let rho = random_state(&e, dim, 3, MODE);
        let d = dephase_fock_basis(&rho, &[MODE]).unwrap();
        for (a, b) in rho.populations().iter().zip(d.populations()) {
            prop_assert!((a - b).abs() < 1e-15);
        }
        prop_assert!(von_neumann_entropy(&d, LogBase::Two) >= von_neumann_entropy(&rho, LogBase::Two) - 1e-9);
    }

    #[test]
    fn sources_preserve_qubit_populations(kind_idx in 0usize..3, n in 0.0f64..1.0, e in entries()) {
        let kind = SourceKind::ALL[kind_idx];
        let qubit = random_state(&e, 2, 2, QUBIT);
        let policy = TruncationPolicy::new(24, 1e-10).unwrap();
        let joint = apply_source(&SourceSpec::from_emission(kind, n).unwrap(), &qubit, &policy).unwrap();
        let reduced = partial_trace(&joint, &[QUBIT]).unwrap();
        prop_assert!((reduced.element(0, 0).re - qubit.element(0, 0).re).abs() < 1e-12);
        prop_assert!(qubit_coherence(&joint).unwrap() <= 2.0 * qubit.element(0, 1).norm() + 1e-12);
    }

    #[test]
    fn scattering_is_unitary(delta in -1e9f64..1e9, kappa in 1e5f64..1e8, chi in -1e9f64..1e9) {
        let scene = ScatterScene::new(kappa, chi, vec![delta], Baths::Flat { nbar_hot: 1.0, nbar_cold: 0.0 }, 1e-6).unwrap();
        for branch in [Branch::Plus, Branch::Minus] {
            let t = transmission(delta, branch, &scene);
            let r = reflection(delta, branch, &scene);
            prop_assert!((t.norm_sqr() + r.norm_sqr() - 1.0).abs() < 1e-12);
        }
        let direct = transmission(delta, Branch::Plus, &scene).norm_sqr() - transmission(delta, Branch::Minus, &scene).norm_sqr();
        prop_assert!((transmission_difference(delta, kappa, chi) - direct).abs() < 1e-12);
    }

    #[test]
    fn equal_baths_give_no_signal(nbar in 0.0f64..50.0, ratio in 0.5f64..200.0) {
        let kappa = 2.0 * std::f64::consts::PI * 0.5e6;
        let chi = ratio * kappa;
        let scene = ScatterScene::new(
            kappa,
            chi,
            ScatterScene::symmetric_grid(2.0 * chi, 101),
            Baths::Flat { nbar_hot: nbar, nbar_cold: nbar },
            1e-6,
        )
        .unwrap();
        prop_assert!(power_spectrum(&scene).signal.iter().all(|s| *s == 0.0));
    }

    #[test]
    fn emitted_photons_are_linear(ns in prop::collection::vec(0.0f64..10.0, 1..50), scale in 0.0f64..5.0, dt in 1e-9f64..1e-6) {
        let kappa = 3.1e6;
        let base = emitted_photons(&PhotonSeries::uniform(ns.clone(), dt).unwrap(), kappa, false).unwrap();
        let scaled = emitted_photons(&PhotonSeries::uniform(ns.iter().map(|n| n * scale).collect(), dt).unwrap(), kappa, false).unwrap();
        prop_assert!((scaled - scale * base).abs() <= 1e-12 * (1.0 + scale * base));
        let longer = emitted_photons(&PhotonSeries::uniform(ns.clone(), 2.0 * dt).unwrap(), kappa, false).unwrap();
        prop_assert!((longer - 2.0 * base).abs() <= 1e-12 * (1.0 + base));
    }

    #[test]
    fn snr_ignores_global_rotation(points in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 8..60), angle in 0.0f64..6.3, shift in -2.0f64..2.0) {
        let half = points.len() / 2;
        let g: Vec<Complex64> = points[..half].iter().map(|(a, b)| Complex64::new(a + shift, *b)).collect();
        let e: Vec<Complex64> = points[half..].iter().map(|(a, b)| Complex64::new(*a, *b)).collect();
        if let Ok(base) = SnrResult::from_iq(&g, &e) {
            let rot = Complex64::from_polar(1.0, angle);
            let gr: Vec<Complex64> = g.iter().map(|z| z * rot).collect();
            let er: Vec<Complex64> = e.iter().map(|z| z * rot).collect();
            let turned = SnrResult::from_iq(&gr, &er).unwrap();
            prop_assert!((turned.snr - base.snr).abs() < 1e-9 * (1.0 + base.snr));
        }
    }
}

#[test]
fn thermal_state_entropy_matches_closed_form() {
    let policy = TruncationPolicy::new(200, 1e-12).unwrap();
    for nbar in [0.1, 1.0, 3.0] {
        let s = von_neumann_entropy(&thermal_state(nbar, &policy).unwrap(), LogBase::E);
        let exact = (nbar + 1.0) * (nbar + 1.0).ln() - nbar * nbar.ln();
        assert!((s - exact).abs() < 1e-9);
    }
}
