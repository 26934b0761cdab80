use std::f64::consts::PI;

use loqc::linalg::{c, cr};
use loqc::measure::DetectorModel;
use loqc::sources::{
    binomial_amplitudes, counting_curve, counting_rate, detection_rate, g2_curve, gaussian_spectrum,
    heralded_single_photon, hom_coincidence, hom_coincidence_brute_force, hom_dip, lorentzian_amplitudes,
    lorentzian_norm_printed, lorentzian_norm_sqr, lorentzian_partial_norm_sqr, pair_distribution, pdc_pair_probability,
    pdc_state, pdc_truncation_error, poisson_distance, two_photon_g2, SpectralAmplitude, TimeBin,
};
use loqc::Exec;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn binomial_spectra() {
    for (n, mu) in [(10, 0.3), (100, 0.05), (1000, 0.01), (50, 0.5)] {
        let f = binomial_amplitudes(n, mu).unwrap();
        assert!((f.norm_sqr() - 1.0).abs() < 1e-12);
        let peak = f.dominant_frequency() as f64;
        assert!((peak - mu * n as f64).abs() <= 1.0, "{n} {mu} {peak}");
    }
    assert!(binomial_amplitudes(10, 0.7).is_err());
    assert!(binomial_amplitudes(0, 0.3).is_err());
}

#[test]
fn counting_rate_is_periodic_and_peaked() {
    let f = binomial_amplitudes(100, 0.05).unwrap();
    let curve = counting_curve(&f, 256, Exec::default());
    let (t_max, n_max) = curve.iter().copied().fold((0.0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    assert!(t_max.abs() < 1e-12);
    assert!(n_max > counting_rate(&f, 0.5));
    for t in [0.1, 1.3, -2.0] {
        assert!((counting_rate(&f, t) - counting_rate(&f, t + 2.0 * PI)).abs() < 1e-10);
    }
    // time average of n(t) is the norm
    let mean: f64 = curve.iter().map(|x| x.1).sum::<f64>() / curve.len() as f64;
    assert!((mean - 1.0).abs() < 1e-10);
    assert!((detection_rate(&f, 0.2, 0.5) - 0.5 * counting_rate(&f, 0.2)).abs() < 1e-15);
}

#[test]
fn lorentzian_truncation() {
    let mu = 1.0;
    let full = lorentzian_norm_sqr(mu);
    let partial = lorentzian_partial_norm_sqr(1000, mu);
    assert!((full - partial) / full < 0.01);
    assert!(partial < full);
    assert!((lorentzian_norm_printed(mu) - full - PI / 2.0).abs() < 1e-12);
    let f = lorentzian_amplitudes(1000, mu).unwrap();
    assert!((f.norm_sqr() - 1.0).abs() < 1e-12);
    assert_eq!(f.dominant_frequency(), 1);
    assert!(lorentzian_amplitudes(10, 0.0).is_err());
}

#[test]
fn time_bins() {
    let b = TimeBin::new(3, 12).unwrap();
    assert!((b.tau() - PI / 6.0).abs() < 1e-15);
    assert!(b.g(3.0 * b.tau()).is_err());
    let g1 = b.g(0.2).unwrap();
    let g2 = b.g(0.2 + 2.0 * PI).unwrap();
    assert!((g1 - g2).norm() < 1e-10);
    assert!(TimeBin::new(0, 12).is_err());
    assert!(TimeBin::new(13, 12).is_err());
}

#[test]
fn g2_peaks_at_bin_separation() {
    let (mu, nu, n) = (2, 5, 10);
    let tau = 2.0 * PI / n as f64;
    let t = mu as f64 * tau - 0.05;
    let curve = g2_curve(mu, nu, t, n, 2000, Exec::default());
    let (t_peak, g_peak) = curve.iter().copied().fold((0.0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    let sep = (nu - mu) as f64 * tau;
    assert!((t_peak - sep).abs() < tau / 2.0, "{t_peak} vs {sep}");
    let at_zero = two_photon_g2(mu, nu, t, 0.0, n).unwrap();
    assert!(at_zero < 1e-3 * g_peak, "{at_zero} {g_peak}");
    assert!(two_photon_g2(mu, mu, t, 0.3, n).is_err());
    let swapped = two_photon_g2(nu, mu, t, 0.7, n).unwrap();
    assert!((swapped - two_photon_g2(mu, nu, t, 0.7, n).unwrap()).abs() < 1e-12);
}

#[test]
fn hom_matches_fock_simulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let a = SpectralAmplitude::random(4, &mut rng).unwrap();
        let b = SpectralAmplitude::random(4, &mut rng).unwrap();
        let analytic = hom_coincidence(&a, &b).unwrap();
        let brute = hom_coincidence_brute_force(&a, &b).unwrap();
        assert!((analytic - brute).abs() < 1e-12);
        assert!((0.0..=0.5 + 1e-12).contains(&analytic));
    }
    let a = SpectralAmplitude::new(vec![cr(1.0), cr(0.0)]).unwrap();
    let b = SpectralAmplitude::new(vec![cr(0.0), c(0.0, 1.0)]).unwrap();
    assert!((hom_coincidence(&a, &b).unwrap() - 0.5).abs() < 1e-15);
    assert!(hom_coincidence(&a, &a).unwrap().abs() < 1e-15);
}

#[test]
fn gaussian_dip() {
    let f = gaussian_spectrum(40, 20.0, 3.0).unwrap();
    let delays: Vec<f64> = (0..=20).map(|k| k as f64 * 0.05).collect();
    let dip = hom_dip(&f, &delays, Exec::default()).unwrap();
    assert!(dip[0].1.abs() < 1e-12);
    for w in dip.windows(2) {
        assert!(w[1].1 >= w[0].1 - 1e-12);
    }
    assert!(dip.last().unwrap().1 > 0.49);
}

#[test]
fn pdc_statistics() {
    let lambda = c(0.3, 0.2);
    let s = pdc_state(lambda, 6).unwrap();
    assert!((s.norm_sqr() - (1.0 - pdc_truncation_error(lambda, 6))).abs() < 1e-12);
    for (n, p) in pair_distribution(&s) {
        assert!((p - pdc_pair_probability(lambda, n)).abs() < 1e-14);
    }
    assert!(pdc_state(cr(1.0), 3).is_err());
}

#[test]
fn heralding() {
    let lambda = cr(0.3);
    let ideal = heralded_single_photon(lambda, &DetectorModel::ideal(8), 6).unwrap();
    assert!((ideal.fidelity - 1.0).abs() < 1e-12);
    let bucket = heralded_single_photon(lambda, &DetectorModel::bucket(1.0, 8), 8).unwrap();
    assert!((bucket.fidelity - (1.0 - 0.09)).abs() < 1e-6);
    let mut last = 1.0;
    for l in [0.05, 0.1, 0.2, 0.4] {
        let h = heralded_single_photon(cr(l), &DetectorModel::bucket(1.0, 8), 8).unwrap();
        assert!(h.fidelity < last);
        last = h.fidelity;
    }
}

#[test]
fn binomial_approaches_poisson() {
    let d: Vec<f64> = [50, 100, 200].iter().map(|&n| poisson_distance(n, 5.0).unwrap()).collect();
    assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
    assert!(d[2] < 0.02);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hom_is_symmetric_and_bounded(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = SpectralAmplitude::random(n, &mut rng).unwrap();
        let b = SpectralAmplitude::random(n, &mut rng).unwrap();
        let ab = hom_coincidence(&a, &b).unwrap();
        prop_assert!((ab - hom_coincidence(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert!(ab > -1e-12 && ab < 0.5 + 1e-12);
    }

    #[test]
    fn pdc_probabilities_sum_below_one(l in 0.0f64..0.95, k in 1usize..10) {
        let total: f64 = (0..=k).map(|n| pdc_pair_probability(cr(l), n)).sum();
        prop_assert!((total + pdc_truncation_error(cr(l), k) - 1.0).abs() < 1e-12);
    }
}
