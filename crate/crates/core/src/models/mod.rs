//! Concrete isospectral flows `Ẇ = [B(W), W]`.

mod rigid_body;
mod zeitlin;

use std::fmt;
use std::sync::Arc;

use crate::dense::CMat;
use crate::error::Result;
use crate::quadratic::{AlgebraElement, QuadraticStructure};

pub use rigid_body::{default_momentum, hat, vee, RigidBodyModel, DEFAULT_INERTIA};
pub use zeitlin::{
    default_initial_coefficients, spin_generators, HarmonicMode, ZeitlinModel,
    DEFAULT_COEFFICIENT_SEED, MAX_INITIAL_DEGREE,
};

/// A flow on a quadratic Lie algebra, given by its stream map `B` and, for
/// Lie–Poisson flows, its Hamiltonian.
pub trait IsospectralModel: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    fn structure(&self) -> &Arc<QuadraticStructure>;

    fn dim(&self) -> usize {
        self.structure().dim()
    }

    /// `B(W)`. Implementations accept the off-algebra stage values produced
    /// during fixed-point sweeps and must return algebra members.
    fn stream(&self, w: &CMat) -> Result<CMat>;

    fn hamiltonian(&self, w: &CMat) -> Option<f64>;

    /// `B(W)` for a certified algebra element, certified in turn.
    fn stream_element(&self, w: &AlgebraElement) -> Result<AlgebraElement> {
        AlgebraElement::new(self.structure().clone(), self.stream(w.matrix())?)
    }
}

/// `B ≡ 0`: every state is an equilibrium.
#[derive(Debug, Clone)]
pub struct NullModel {
    structure: Arc<QuadraticStructure>,
}

impl NullModel {
    pub fn new(n: usize) -> Self {
        Self {
            structure: QuadraticStructure::identity(n).into_shared(),
        }
    }

    pub fn with_structure(structure: Arc<QuadraticStructure>) -> Self {
        Self { structure }
    }
}

impl IsospectralModel for NullModel {
    fn name(&self) -> &str {
        "null"
    }

    fn structure(&self) -> &Arc<QuadraticStructure> {
        &self.structure
    }

    fn stream(&self, w: &CMat) -> Result<CMat> {
        self.structure.j().check_same_dim(w)?;
        Ok(CMat::zeros(w.dim()))
    }

    fn hamiltonian(&self, _w: &CMat) -> Option<f64> {
        None
    }
}
