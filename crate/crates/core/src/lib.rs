//! Structure-preserving integrators for isospectral flows `Ẇ = [B(W), W]`
//! on J-quadratic Lie algebras, with the Euler–Zeitlin and rigid-body models.

pub mod dense;
pub mod error;
pub mod integrators;
pub mod models;
pub mod quadratic;
pub mod tableau;

pub use dense::CMat;
pub use error::{Error, Result};
pub use integrators::{integrate, Scheme, StepConfig, StepReport, TrajectorySummary};
pub use models::{IsospectralModel, NullModel, RigidBodyModel, ZeitlinModel};
pub use quadratic::{AlgebraElement, GroupElement, QuadraticStructure};
pub use tableau::Tableau;
pub use num_complex::Complex64;
