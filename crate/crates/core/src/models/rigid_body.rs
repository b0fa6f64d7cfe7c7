//! Free rigid body on so(3).
//!
//! The body angular momentum `π` is stored as `W = hat(π)`. With
//! `B(W) = −hat(Ω)`, `Ω_k = π_k / I_k`, the flow `Ẇ = [B(W), W]` is Euler's
//! equation `π̇ = π × Ω`.

use std::sync::Arc;

use num_complex::Complex64;

use super::IsospectralModel;
use crate::dense::CMat;
use crate::error::{Error, Result};
use crate::quadratic::{AlgebraElement, QuadraticStructure};

pub const DEFAULT_INERTIA: [f64; 3] = [1.0, 2.0, 3.0];

/// Skew defect above which an input is not treated as an so(3) element.
const SKEW_TOLERANCE: f64 = 1e-8;

/// `hat(x) y = x × y`.
pub fn hat(x: [f64; 3]) -> CMat {
    let r = |v: f64| Complex64::new(v, 0.0);
    CMat::from_rows(&[
        vec![r(0.0), r(-x[2]), r(x[1])],
        vec![r(x[2]), r(0.0), r(-x[0])],
        vec![r(-x[1]), r(x[0]), r(0.0)],
    ])
    .expect("3x3")
}

/// Inverse of [`hat`] on the skew-symmetric part of the real part of `w`.
pub fn vee(w: &CMat) -> [f64; 3] {
    [
        0.5 * (w[(2, 1)].re - w[(1, 2)].re),
        0.5 * (w[(0, 2)].re - w[(2, 0)].re),
        0.5 * (w[(1, 0)].re - w[(0, 1)].re),
    ]
}

/// Default initial momentum, a unit vector tilted away from the first
/// principal axis so all three components evolve.
pub fn default_momentum() -> [f64; 3] {
    [0.1f64.cos(), 0.02, 0.1f64.sin()]
}

#[derive(Debug, Clone)]
pub struct RigidBodyModel {
    inertia: [f64; 3],
    structure: Arc<QuadraticStructure>,
}

impl Default for RigidBodyModel {
    fn default() -> Self {
        Self::new(DEFAULT_INERTIA).expect("default inertia is valid")
    }
}

impl RigidBodyModel {
    pub fn new(inertia: [f64; 3]) -> Result<Self> {
        if inertia.iter().any(|&i| !(i > 0.0) || !i.is_finite()) {
            return Err(Error::invalid(format!("inertia must be positive, got {inertia:?}")));
        }
        Ok(Self {
            inertia,
            structure: QuadraticStructure::identity(3).into_shared(),
        })
    }

    pub fn inertia(&self) -> [f64; 3] {
        self.inertia
    }

    pub fn element(&self, momentum: [f64; 3]) -> Result<AlgebraElement> {
        AlgebraElement::new(self.structure.clone(), hat(momentum))
    }

    fn momentum(&self, w: &CMat) -> Result<[f64; 3]> {
        self.structure.j().check_same_dim(w)?;
        let skew = w.distance(&w.adjoint().scale_real(-1.0));
        let imag: f64 = w.as_slice().iter().map(|z| z.im * z.im).sum::<f64>().sqrt();
        let tolerance = SKEW_TOLERANCE * w.frobenius_norm().max(1.0);
        if skew > tolerance || imag > tolerance {
            return Err(Error::Membership {
                what: "so(3)",
                residual: skew.max(imag),
                tolerance,
            });
        }
        Ok(vee(w))
    }

    pub fn angular_velocity(&self, momentum: [f64; 3]) -> [f64; 3] {
        [
            momentum[0] / self.inertia[0],
            momentum[1] / self.inertia[1],
            momentum[2] / self.inertia[2],
        ]
    }

    pub fn energy_of(&self, momentum: [f64; 3]) -> f64 {
        0.5 * momentum
            .iter()
            .zip(&self.inertia)
            .map(|(p, i)| p * p / i)
            .sum::<f64>()
    }
}

impl IsospectralModel for RigidBodyModel {
    fn name(&self) -> &str {
        "rigidbody"
    }

    fn structure(&self) -> &Arc<QuadraticStructure> {
        &self.structure
    }

    fn stream(&self, w: &CMat) -> Result<CMat> {
        let omega = self.angular_velocity(self.momentum(w)?);
        Ok(hat(omega).scale_real(-1.0))
    }

    fn hamiltonian(&self, w: &CMat) -> Option<f64> {
        self.momentum(w).ok().map(|p| self.energy_of(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }

    #[test]
    fn hat_vee_round_trip() {
        let x = [0.3, -1.2, 2.5];
        assert_eq!(vee(&hat(x)), x);
    }

    #[test]
    fn bracket_reproduces_euler_equations() {
        let model = RigidBodyModel::default();
        let pi = [0.4, -0.7, 1.1];
        let w = hat(pi);
        let b = model.stream(&w).unwrap();
        let rhs = vee(&b.commutator(&w).unwrap());
        let expected = cross(pi, model.angular_velocity(pi));
        for k in 0..3 {
            assert!((rhs[k] - expected[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn principal_axis_is_equilibrium() {
        let model = RigidBodyModel::default();
        let w = hat([1.0, 0.0, 0.0]);
        let b = model.stream(&w).unwrap();
        assert_eq!(b.commutator(&w).unwrap().frobenius_norm(), 0.0);
    }

    #[test]
    fn casimir_is_twice_negative_momentum_norm() {
        let pi = [0.3, 0.5, -0.2];
        let w = hat(pi);
        let tr = w.matmul(&w).trace();
        let norm2: f64 = pi.iter().map(|p| p * p).sum();
        assert!((tr.re + 2.0 * norm2).abs() < 1e-15);
        assert_eq!(tr.im, 0.0);
    }

    #[test]
    fn rejects_non_skew_input_and_bad_inertia() {
        let model = RigidBodyModel::default();
        assert!(model.stream(&CMat::identity(3)).is_err());
        assert!(RigidBodyModel::new([1.0, 0.0, 2.0]).is_err());
    }

    #[test]
    fn default_momentum_components() {
        let p = default_momentum();
        assert_eq!(p, [0.1f64.cos(), 0.02, 0.1f64.sin()]);
    }
}
