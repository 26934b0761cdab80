use loqc::encoding::{
    concatenated_cz_claim, f2_block_rule, f2_fusion_action, fz_map, fz_success, fz_table, gate_cost, loss_recovery,
    lossy_logical_readout, measure_physical, parity_encode, readout_monte_carlo, readout_success_closed_form,
    LogicalGate, PhysicalBasis, PhysicalOutcome, RedundantQubit, Reduced,
};
use loqc::linalg::{c, cr};
use loqc::Exec;
use proptest::prelude::*;

#[test]
fn parity_blocks_have_definite_parity() {
    let zero = parity_encode(cr(1.0), cr(0.0), 3).unwrap();
    assert_eq!(zero.state.len(), 4);
    assert!((zero.even_parity_probability() - 1.0).abs() < 1e-12);
    let one = parity_encode(cr(0.0), cr(1.0), 3).unwrap();
    assert!(one.even_parity_probability() < 1e-12);
    let mixed = parity_encode(cr(0.6), c(0.0, 0.8), 4).unwrap();
    assert!((mixed.even_parity_probability() - 0.36).abs() < 1e-12);
    assert!((mixed.state.norm_sqr() - 1.0).abs() < 1e-12);
    // one photon is plain polarization encoding
    let single = parity_encode(cr(0.6), cr(0.8), 1).unwrap();
    assert!((single.state.amp(&[1, 0]) - cr(0.6)).norm() < 1e-12);
    assert!((single.state.amp(&[0, 1]) - cr(0.8)).norm() < 1e-12);
}

#[test]
fn rejects_bad_amplitudes() {
    assert!(parity_encode(cr(1.0), cr(1.0), 2).is_err());
    assert!(parity_encode(cr(1.0), cr(0.0), 0).is_err());
}

#[test]
fn computational_readout_shrinks_block() {
    let q = parity_encode(cr(0.6), c(0.0, 0.8), 3).unwrap();
    for m in measure_physical(&q, 2, PhysicalBasis::Computational).unwrap() {
        assert!((m.probability - 0.5).abs() < 1e-12);
        assert!(m.fidelity > 1.0 - 1e-12);
        match m.reduced {
            Reduced::Parity { qubit, flipped } => {
                assert_eq!(qubit.n, 2);
                assert_eq!(flipped, m.outcome == PhysicalOutcome::V);
            }
            Reduced::Disentangled(_) => panic!("expected a parity block"),
        }
    }
}

#[test]
fn diagonal_readout_disentangles() {
    let q = parity_encode(cr(0.6), c(0.0, 0.8), 3).unwrap();
    let r = measure_physical(&q, 0, PhysicalBasis::Diagonal).unwrap();
    let total: f64 = r.iter().map(|m| m.probability).sum();
    assert!((total - 1.0).abs() < 1e-12);
    for m in r {
        assert!(matches!(m.reduced, Reduced::Disentangled(_)));
        assert!(m.fidelity > 1.0 - 1e-12);
    }
    assert!(measure_physical(&q, 3, PhysicalBasis::Diagonal).is_err());
}

#[test]
fn fz_known_values() {
    let l0 = fz_success(0.25, 0).unwrap();
    assert!((l0.f_z - 7.0 / 52.0).abs() < 1e-15);
    let l1 = fz_success(0.25, 1).unwrap();
    assert!((l1.f_z - 4753.0 / 124228.0).abs() < 1e-15);
    assert!((l1.f_z - 0.03826030).abs() < 1e-8);
    assert!((l1.p_cz - l1.p_z * l1.p_z).abs() < 1e-15);
    let (pz, pcz) = concatenated_cz_claim();
    assert!(pz > 0.95);
    assert!(pcz < 0.95);
    assert!(fz_success(1.5, 0).is_err());
}

#[test]
fn fz_fixed_points_and_table() {
    assert_eq!(fz_map(0.0), 0.0);
    assert_eq!(fz_map(1.0), 1.0);
    let t = fz_table(0.25, 4).unwrap();
    assert_eq!(t.len(), 4);
    for w in t.windows(2) {
        assert!(w[1].f_z < w[0].f_z);
    }
}

#[test]
fn f2_fusion_small_blocks() {
    for n in 2..=3 {
        for m in 2..=3 {
            let psi = parity_encode(cr(0.6), c(0.0, 0.8), n).unwrap();
            let r = f2_fusion_action(&psi, m).unwrap();
            assert!((r.success_probability() - 0.5).abs() < 1e-12, "n={n} m={m}");
            let total: f64 = r.branches.iter().map(|b| b.probability).sum();
            assert!((total - 1.0).abs() < 1e-12);
            assert!(r.min_fidelity() > 1.0 - 1e-12);
            for b in &r.branches {
                assert_eq!(b.blocks, f2_block_rule(n, m, b.success));
                assert_eq!(b.zero_block_value.is_some(), !b.success);
            }
        }
    }
    let tiny = parity_encode(cr(1.0), cr(0.0), 1).unwrap();
    assert!(f2_fusion_action(&tiny, 2).is_err());
}

#[test]
fn lossy_readout_matches_closed_form() {
    for (n, q) in [(1, 1), (2, 3), (3, 2), (4, 4)] {
        let r = RedundantQubit::new(cr(0.6), cr(0.8), n, q).unwrap();
        for eta in [0.5, 0.8, 0.95, 1.0] {
            let d = lossy_logical_readout(&r, eta).unwrap();
            assert!((d.total_probability() - 1.0).abs() < 1e-12);
            let want = readout_success_closed_form(n, q, eta);
            assert!((d.success_probability() - want).abs() < 1e-12);
        }
    }
    let r = RedundantQubit::new(cr(0.6), cr(0.8), 3, 3).unwrap();
    assert!(lossy_logical_readout(&r, 0.0).is_err());
    let (mean, sigma) = readout_monte_carlo(&r, 0.8, 20_000, 7, Exec::default()).unwrap();
    assert!((mean - readout_success_closed_form(3, 3, 0.8)).abs() < 4.0 * sigma);
}

#[test]
fn loss_of_one_photon_is_recoverable() {
    let r = RedundantQubit::new(cr(0.6), c(0.0, 0.8), 3, 2).unwrap();
    for lost in 0..2 {
        let b = loss_recovery(&r, lost).unwrap();
        assert!((b.iter().map(|x| x.probability).sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(b.iter().all(|x| x.fidelity > 1.0 - 1e-12));
    }
    assert!(loss_recovery(&r, 2).is_err());
}

#[test]
fn gate_costs() {
    let x = gate_cost(LogicalGate::XTheta, 3, 4).unwrap();
    assert_eq!((x.cnot_p, x.single_photon_ops, x.fusions), (6, 1, 12));
    let z = gate_cost(LogicalGate::Z, 3, 4).unwrap();
    assert_eq!((z.single_photon_ops, z.fusions), (3, 0));
    let zp = gate_cost(LogicalGate::ZPi2, 3, 4).unwrap();
    assert_eq!((zp.zpi2_p, zp.fusions), (1, 1));
    let cn = gate_cost(LogicalGate::Cnot, 3, 4).unwrap();
    assert_eq!((cn.cnot_p, cn.fusions), (4, 8));
    assert!(gate_cost(LogicalGate::Cnot, 0, 1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fz_is_monotone(a in 0.0f64..=1.0, b in 0.0f64..=1.0, level in 0usize..3) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let fl = fz_success(lo, level).unwrap().f_z;
        let fh = fz_success(hi, level).unwrap().f_z;
        prop_assert!(fl <= fh + 1e-15);
        prop_assert!((0.0..=1.0).contains(&fl));
    }

    #[test]
    fn fz_improves_below_half(f in 0.001f64..0.5) {
        prop_assert!(fz_map(f) < f);
    }
}
