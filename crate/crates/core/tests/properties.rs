mod common;

use common::*;
use isoflow::{AlgebraElement, CMat, Complex64, GroupElement, QuadraticStructure};
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn adjoint_is_an_involution(seed in any::<u64>(), n in 1usize..12) {
        let a = random_matrix(&mut rng(seed), n);
        prop_assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn commutator_is_antisymmetric(seed in any::<u64>(), n in 1usize..12) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, n);
        let b = random_matrix(&mut r, n);
        let ab = a.commutator(&b).unwrap();
        let ba = b.commutator(&a).unwrap();
        prop_assert!((&ab + &ba).frobenius_norm() <= 1e-13 * (1.0 + ab.frobenius_norm()));
    }

    #[test]
    fn solve_round_trips(seed in any::<u64>(), n in 1usize..=32) {
        let mut r = rng(seed);
        let mut a = random_matrix(&mut r, n);
        a.add_to_diagonal(Complex64::new(n as f64, 0.0));
        let x = random_matrix(&mut r, n);
        let b = a.matmul(&x);
        let solved = a.solve(&b).unwrap();
        prop_assert!(solved.distance(&x) <= 1e-10 * x.frobenius_norm().max(1.0));
    }

    #[test]
    fn spectrum_is_similarity_invariant(seed in any::<u64>(), n in 2usize..10) {
        let mut r = rng(seed);
        let w = random_skew_hermitian(&mut r, n);
        let u = random_unitary(&mut r, n);
        let conj = u.adjoint().matmul(&w).matmul(&u);
        prop_assert!(spectrum_distance(&w, &conj) <= 1e-10);
    }

    #[test]
    fn reconstruction_preserves_spectrum(seed in any::<u64>(), n in 2usize..10) {
        let mut r = rng(seed);
        let structure = QuadraticStructure::identity(n).into_shared();
        let w = AlgebraElement::new(structure.clone(), random_traceless_skew(&mut r, n)).unwrap();
        let q = GroupElement::new(structure, random_unitary(&mut r, n)).unwrap();
        let out = w.reconstruct(&q).unwrap();
        prop_assert!(out.residual() <= 1e-12);
        prop_assert!(spectrum_distance(w.matrix(), out.matrix()) <= 1e-10);
        prop_assert!((out.matrix().trace() - w.matrix().trace()).norm() <= 1e-12);
    }

    #[test]
    fn adjunction_conjugate_fixes_members(seed in any::<u64>(), n in 1usize..10) {
        let structure = QuadraticStructure::identity(n);
        let w = random_skew_hermitian(&mut rng(seed), n);
        let conj = structure.adjunction_conjugate(&w).unwrap();
        prop_assert!(conj.distance(&w) <= 1e-14 * (1.0 + w.frobenius_norm()));
    }
}

#[test]
fn random_su4_reconstruction() {
    let mut r = rng(4);
    let structure = QuadraticStructure::identity(4).into_shared();
    for _ in 0..20 {
        let w = random_traceless_skew(&mut r, 4);
        let q = random_unitary(&mut r, 4);
        let out = structure.reconstruct(&w, &q).unwrap();
        assert!(structure.algebra_residual(&out).unwrap() <= 1e-12);
        assert!(spectrum_distance(&w, &out) <= 1e-12);
    }
    let not_unitary = CMat::identity(4).scale_real(2.0);
    assert!(structure.reconstruct(&random_traceless_skew(&mut r, 4), &not_unitary).is_err());
}
