use std::f64::consts::PI;

use loqc::linalg::{c, cr};
use loqc::teleport::{
    apply_cz, build_czn, build_tn, correction_phase, success_fraction, teleport, teleported_cz,
    z_readout_after_teleport,
};
use loqc::C64;
use nalgebra::DVector;
use proptest::prelude::*;

#[test]
fn success_fraction_is_exact() {
    for n in 1..=5u64 {
        let [zero, one] = success_fraction(n as usize);
        // each logical value misses exactly one of the n+1 branches
        assert_eq!(zero, (n, n + 1));
        assert_eq!(one, (n, n + 1));
    }
}

#[test]
fn teleport_success_and_fidelity() {
    let input = [cr(0.6), c(0.0, 0.8)];
    for n in 1..=5 {
        let r = teleport(input, n).unwrap();
        assert!((r.total_probability() - 1.0).abs() < 1e-12);
        assert!((r.success_probability() - n as f64 / (n + 1) as f64).abs() < 1e-12, "n={n}");
        assert!(r.min_success_fidelity() > 1.0 - 1e-10);
    }
}

#[test]
fn output_mode_follows_photon_count() {
    let r = teleport([cr(0.6), cr(0.8)], 5).unwrap();
    let two: Vec<_> = r.outcomes.iter().filter(|o| o.m == 2).collect();
    assert!(!two.is_empty());
    assert!(two.iter().all(|o| o.output_mode == Some(7)));
    for o in &r.outcomes {
        if !o.success {
            assert!(o.m == 0 || o.m == 6);
        }
    }
}

#[test]
fn correction_phase_values() {
    assert_eq!(correction_phase(&[1, 0]), 0.0);
    assert!((correction_phase(&[0, 1]) - PI).abs() < 1e-15);
    assert!((correction_phase(&[0, 1, 1]) - 0.0).abs() < 1e-15);
    assert!((correction_phase(&[0, 0, 1]) - 4.0 * PI / 3.0).abs() < 1e-12);
}

#[test]
fn resources_are_normalized() {
    for n in 1..=4 {
        let t = build_tn(n, n + 1).unwrap();
        assert!((t.state.norm_sqr() - 1.0).abs() < 1e-12);
        assert_eq!(t.state.len(), n + 1);
        let cz = build_czn(n, 2 * n + 2).unwrap();
        assert!((cz.state.norm_sqr() - 1.0).abs() < 1e-12);
        assert_eq!(cz.state.len(), (n + 1) * (n + 1));
    }
}

#[test]
fn teleported_cz_success() {
    for n in 1..=3 {
        let r = teleported_cz(n).unwrap();
        let want = (n * n) as f64 / ((n + 1) * (n + 1)) as f64;
        assert!((r.success_probability - want).abs() < 1e-12, "n={n}");
        assert!((r.success_probability + r.failure_probability - 1.0).abs() < 1e-12);
        assert!(r.min_fidelity() > 1.0 - 1e-10);
    }
}

#[test]
fn ideal_cz_flips_only_eleven() {
    let v = DVector::from_vec(vec![cr(0.5); 4]);
    let w = apply_cz(&v);
    assert_eq!(w[3], cr(-0.5));
    assert_eq!(w[0], cr(0.5));
}

#[test]
fn failed_branches_are_z_measurements() {
    let r = teleport([cr(0.6), cr(0.8)], 2).unwrap();
    let p = z_readout_after_teleport(&r);
    assert!((p - 0.64).abs() < 1e-12);
    for o in r.outcomes.iter().filter(|o| !o.success) {
        assert!(o.qubit[0].norm() == 1.0 || o.qubit[1].norm() == 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn teleport_is_faithful_for_any_qubit(theta in 0.0f64..PI, phi in 0.0f64..(2.0 * PI), n in 1usize..4) {
        let input: [C64; 2] = [cr((theta / 2.0).cos()), loqc::linalg::cis(phi) * (theta / 2.0).sin()];
        let r = teleport(input, n).unwrap();
        prop_assert!((r.total_probability() - 1.0).abs() < 1e-10);
        prop_assert!((r.success_probability() - n as f64 / (n + 1) as f64).abs() < 1e-10);
        prop_assert!(r.min_success_fidelity() > 1.0 - 1e-9);
    }
}
