#![allow(dead_code)]

use isoflow::models::default_initial_coefficients;
use isoflow::{AlgebraElement, CMat, Complex64, RigidBodyModel, ZeitlinModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    CMat::from_fn(n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn random_skew_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let a = random_matrix(rng, n);
    (&a - &a.adjoint()).scale_real(0.5)
}

pub fn random_traceless_skew(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let mut w = random_skew_hermitian(rng, n);
    w.add_to_diagonal(-w.trace() / n as f64);
    w
}

/// Unitary from the Cayley transform of a skew-Hermitian matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let a = random_skew_hermitian(rng, n);
    let mut plus = a.clone();
    plus.add_to_diagonal(Complex64::new(1.0, 0.0));
    let mut minus = a.scale_real(-1.0);
    minus.add_to_diagonal(Complex64::new(1.0, 0.0));
    minus.solve(&plus).unwrap()
}

pub fn zeitlin_setup(n: usize) -> (ZeitlinModel, AlgebraElement) {
    let model = ZeitlinModel::new(n).unwrap();
    let w0 = model.initial_vorticity(&default_initial_coefficients()).unwrap();
    (model, w0)
}

pub fn rigid_body_setup() -> (RigidBodyModel, AlgebraElement) {
    let model = RigidBodyModel::default();
    let w0 = model.element(isoflow::models::default_momentum()).unwrap();
    (model, w0)
}

pub fn trace_power(w: &CMat, k: u32) -> Complex64 {
    let mut p = w.clone();
    for _ in 1..k {
        p = p.matmul(w);
    }
    p.trace()
}

pub fn spectrum_distance(a: &CMat, b: &CMat) -> f64 {
    let ea = a.eigenvalues().unwrap();
    let eb = b.eigenvalues().unwrap();
    ea.iter().zip(&eb).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
