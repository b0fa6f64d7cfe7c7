mod common;

use common::*;
use isoflow::integrators::integrate;
use isoflow::models::{default_momentum, hat};
use isoflow::{Scheme, StepConfig};

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Classical RK4 on `π̇ = π × Ω`.
fn euler_rk4(inertia: [f64; 3], mut pi: [f64; 3], h: f64, steps: usize) -> [f64; 3] {
    let f = |p: [f64; 3]| cross(p, [p[0] / inertia[0], p[1] / inertia[1], p[2] / inertia[2]]);
    let axpy = |p: [f64; 3], a: f64, k: [f64; 3]| [p[0] + a * k[0], p[1] + a * k[1], p[2] + a * k[2]];
    for _ in 0..steps {
        let k1 = f(pi);
        let k2 = f(axpy(pi, h / 2.0, k1));
        let k3 = f(axpy(pi, h / 2.0, k2));
        let k4 = f(axpy(pi, h, k3));
        for c in 0..3 {
            pi[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
    }
    pi
}

#[test]
fn rigid_body_matches_classical_euler_equations() {
    let (model, w0) = rigid_body_setup();
    let reference = euler_rk4(model.inertia(), default_momentum(), 1e-3, 1000);
    for scheme in Scheme::ALL {
        let cfg = StepConfig::gauss(3, 0.05).unwrap();
        let out = integrate(&model, scheme, &w0, &cfg, 1.0, &mut []).unwrap();
        let gap = out.final_state.matrix().distance(&hat(reference));
        assert!(gap <= 1e-10, "{scheme}: {gap}");
    }
}

#[test]
fn reduced_scheme_converges_at_order_2s() {
    let (model, w0) = rigid_body_setup();
    let run = |s: usize, h: f64| {
        let cfg = StepConfig::gauss(s, h).unwrap();
        integrate(&model, Scheme::Reduced, &w0, &cfg, 1.0, &mut []).unwrap().final_state.into_matrix()
    };
    let reference = run(3, 0.025 / 64.0);
    for s in 1..=2 {
        let coarse = run(s, 0.1).distance(&reference);
        let fine = run(s, 0.05).distance(&reference);
        let order = (coarse / fine).log2();
        assert!((order - 2.0 * s as f64).abs() <= 0.2, "s={s} order {order}");
    }
}
