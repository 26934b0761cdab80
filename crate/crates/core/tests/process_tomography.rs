use loqc::gates::{cnot_gate, cz_gate, run_gate, CnotVariant, CzVariant};
use loqc::linalg::{c, cnot, cr, cz, hadamard, haar_unitary, kron, CMatrix};
use loqc::tomography::{
    cnot_ideal_chi, depolarized_unitary, gate_tomography, process_fidelity, process_tomography, state_fidelity,
    unitary_chi, PauliBasis,
};
use loqc::Exec;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_density(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let a = CMatrix::from_fn(dim, dim, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let rho = &a * a.adjoint();
    let t = rho.trace();
    rho / t
}

#[test]
fn pauli_basis_ordering() {
    let b = PauliBasis::new(2).unwrap();
    assert_eq!(b.dim(), 4);
    assert_eq!(b.operators.len(), 16);
    assert_eq!(b.index_of("II"), Some(0));
    assert_eq!(b.index_of("IX"), Some(1));
    assert_eq!(b.index_of("XI"), Some(4));
    assert_eq!(b.index_of("ZZ"), Some(15));
    assert!(PauliBasis::new(0).is_err());
    assert!(PauliBasis::new(4).is_err());
}

#[test]
fn identity_channel_is_ii() {
    for q in 1..=2 {
        let p = process_tomography(q, |r: &CMatrix| r.clone(), Exec::default()).unwrap();
        assert!((p.chi[(0, 0)].re - 1.0).abs() < 1e-12);
        assert_eq!(p.rank(1e-9), 1);
        assert!(p.trace_preservation_error() < 1e-12);
    }
}

#[test]
fn cz_is_rank_one() {
    let u = cz();
    let p = process_tomography(2, |r: &CMatrix| &u * r * u.adjoint(), Exec::default()).unwrap();
    assert_eq!(p.rank(1e-9), 1);
    assert!(p.hermiticity_error() < 1e-12);
    assert!(p.min_eigenvalue() > -1e-12);
    let ideal = unitary_chi(&u).unwrap();
    assert!((process_fidelity(&p, &ideal).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn cnot_reference_matches_unitary() {
    let from_u = unitary_chi(&cnot()).unwrap();
    let literal = cnot_ideal_chi();
    assert!((&from_u.chi - &literal.chi).camax() < 1e-12);
    let vs_cz = process_fidelity(&literal, &unitary_chi(&cz()).unwrap()).unwrap();
    assert!((vs_cz - 0.25).abs() < 1e-12);
}

#[test]
fn simulated_gates_reconstruct_ideal() {
    let pittman = run_gate(&cnot_gate(CnotVariant::PittmanAncilla)).unwrap();
    let p = gate_tomography(&pittman, Exec::default()).unwrap();
    assert!((process_fidelity(&p, &cnot_ideal_chi()).unwrap() - 1.0).abs() < 1e-9);
    assert!((p.trace() - 1.0).abs() < 1e-9);
    let two_ns = run_gate(&cz_gate(CzVariant::TwoNs)).unwrap();
    let p = gate_tomography(&two_ns, Exec::default()).unwrap();
    let ideal = unitary_chi(&cz()).unwrap();
    assert!((process_fidelity(&p, &ideal).unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn chi_reproduces_channel_outputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let u = haar_unitary(4, &mut rng);
    let channel = depolarized_unitary(&u, 0.2);
    let p = process_tomography(2, &channel, Exec::default()).unwrap();
    for _ in 0..20 {
        let rho = random_density(4, &mut rng);
        let diff = p.apply(&rho) - channel(&rho);
        assert!(diff.camax() < 1e-10);
    }
}

#[test]
fn depolarizing_slope() {
    let u = kron(&hadamard(), &CMatrix::identity(2, 2));
    let ideal = unitary_chi(&u).unwrap();
    for eps in [0.0, 0.1, 0.3, 0.7, 1.0] {
        let p = process_tomography(2, depolarized_unitary(&u, eps), Exec::default()).unwrap();
        let f = process_fidelity(&p, &ideal).unwrap();
        assert!((f - (1.0 - 15.0 / 16.0 * eps)).abs() < 1e-12, "{eps} {f}");
    }
}

#[test]
fn parallel_and_sequential_agree() {
    let u = cnot();
    let a = process_tomography(2, |r: &CMatrix| &u * r * u.adjoint(), Exec::Parallel).unwrap();
    let b = process_tomography(2, |r: &CMatrix| &u * r * u.adjoint(), Exec::Sequential).unwrap();
    assert_eq!(a, b);
}

#[test]
fn state_fidelity_basics() {
    let zero = CMatrix::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(0.0)]);
    let one = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(0.0), cr(0.0), cr(1.0)]);
    let mixed = CMatrix::identity(2, 2) * cr(0.5);
    assert!(state_fidelity(&zero, &one).unwrap() < 1e-12);
    assert!((state_fidelity(&zero, &mixed).unwrap() - 0.5).abs() < 1e-12);
    assert!(state_fidelity(&zero, &CMatrix::identity(4, 4)).is_err());
    assert!(state_fidelity(&(zero * cr(-1.0)), &mixed).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn state_fidelity_is_symmetric(seed in any::<u64>(), dim in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_density(dim, &mut rng);
        let b = random_density(dim, &mut rng);
        let ab = state_fidelity(&a, &b).unwrap();
        let ba = state_fidelity(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-8);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((state_fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn unitary_process_fidelity_with_itself(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = haar_unitary(2, &mut rng);
        let p = process_tomography(1, |r: &CMatrix| &u * r * u.adjoint(), Exec::Sequential).unwrap();
        prop_assert!((process_fidelity(&p, &unitary_chi(&u).unwrap()).unwrap() - 1.0).abs() < 1e-10);
    }
}
