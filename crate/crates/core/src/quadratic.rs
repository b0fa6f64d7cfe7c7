//! J-quadratic Lie algebras and groups.
//!
//! The algebra is `{W : W†J + JW = 0}` and the group `{Q : Q†JQ = J}` for an
//! invertible `J` with `J² = αI`. Membership is checked by residuals and
//! never enforced by projection.

use std::sync::Arc;

use num_complex::Complex64;

use crate::dense::CMat;
use crate::error::{Error, Result};

/// Default tolerance for algebra and group membership checks.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct QuadraticStructure {
    j: CMat,
    j_inv: CMat,
    alpha: Complex64,
    identity: bool,
    tolerance: f64,
}

impl QuadraticStructure {
    /// Accepts `J` only when `J²` is a nonzero multiple of the identity.
    pub fn new(j: CMat) -> Result<Self> {
        let n = j.dim();
        if n == 0 {
            return Err(Error::invalid("J must be at least 1x1"));
        }
        if !j.is_finite() {
            return Err(Error::NonFinite { context: "J" });
        }
        let j2 = j.matmul(&j);
        let alpha = j2.trace() / n as f64;
        if alpha.norm() == 0.0 {
            return Err(Error::invalid("J² must be a nonzero multiple of the identity"));
        }
        let mut defect = j2.clone();
        defect.add_to_diagonal(-alpha);
        let residual = defect.frobenius_norm();
        let tolerance = 1e-12 * alpha.norm() * (n as f64).sqrt();
        if residual > tolerance {
            return Err(Error::Membership {
                what: "J² - αI",
                residual,
                tolerance,
            });
        }
        let j_inv = j.scale(alpha.inv());
        let identity = j == CMat::identity(n);
        Ok(Self {
            j,
            j_inv,
            alpha,
            identity,
            tolerance: MEMBERSHIP_TOLERANCE,
        })
    }

    /// `J = I`: the unitary group and its algebra of skew-Hermitian matrices.
    pub fn identity(n: usize) -> Self {
        Self::new(CMat::identity(n)).expect("identity is a valid J")
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn into_shared(self) -> Arc<Self> {
        Arc::new(self)
    }

    pub fn dim(&self) -> usize {
        self.j.dim()
    }

    pub fn j(&self) -> &CMat {
        &self.j
    }

    /// `J⁻¹ = J/α`.
    pub fn j_inv(&self) -> &CMat {
        &self.j_inv
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// `‖J² − αI‖_F`.
    pub fn square_residual(&self) -> f64 {
        let mut d = self.j.matmul(&self.j);
        d.add_to_diagonal(-self.alpha);
        d.frobenius_norm()
    }

    fn check_dim(&self, m: &CMat) -> Result<()> {
        self.j.check_same_dim(m)
    }

    /// `‖W†J + JW‖_F`.
    pub fn algebra_residual(&self, w: &CMat) -> Result<f64> {
        self.check_dim(w)?;
        if self.identity {
            return Ok(w.distance(&w.adjoint().scale_real(-1.0)));
        }
        let mut r = w.adjoint_mul(&self.j);
        r += &self.j.matmul(w);
        Ok(r.frobenius_norm())
    }

    /// `‖Q†JQ − J‖_F`.
    pub fn group_residual(&self, q: &CMat) -> Result<f64> {
        self.check_dim(q)?;
        let r = if self.identity {
            q.adjoint_mul_hermitian(q)
        } else {
            q.adjoint_mul(&self.j.matmul(q))
        };
        Ok(r.distance(&self.j))
    }

    /// `−J⁻¹B†J`, which equals `B` whenever `B` lies in the algebra.
    pub fn adjunction_conjugate(&self, b: &CMat) -> Result<CMat> {
        let residual = self.algebra_residual(b)?;
        if residual > self.tolerance {
            return Err(Error::Membership {
                what: "algebra",
                residual,
                tolerance: self.tolerance,
            });
        }
        let bj = b.adjoint().matmul(&self.j);
        Ok(self.j_inv.matmul(&bj).scale_real(-1.0))
    }

    /// Residuals behind the semisimplicity argument: `J²` scalar and central,
    /// and the algebra closed under `†`.
    pub fn verify_structure(&self, basis: &[AlgebraElement]) -> StructureReport {
        let j2 = self.j.matmul(&self.j);
        let mut centrality: f64 = 0.0;
        let mut closure: f64 = 0.0;
        for w in basis {
            let m = w.matrix();
            if let Ok(c) = j2.commutator(m) {
                centrality = centrality.max(c.frobenius_norm());
            }
            if let Ok(r) = self.algebra_residual(&m.adjoint()) {
                closure = closure.max(r);
            }
        }
        StructureReport {
            square_residual: self.square_residual(),
            centrality_residual: centrality,
            adjoint_closure_residual: closure,
        }
    }

    /// `W = Q†W₀JQJ⁻¹`.
    pub fn reconstruct(&self, w0: &CMat, q: &CMat) -> Result<CMat> {
        self.check_dim(w0)?;
        let residual = self.group_residual(q)?;
        if residual > self.tolerance {
            return Err(Error::Membership {
                what: "group",
                residual,
                tolerance: self.tolerance,
            });
        }
        Ok(self.conjugate_by(w0, q))
    }

    /// `Q†W₀JQJ⁻¹` with no membership check.
    pub(crate) fn conjugate_by(&self, w0: &CMat, q: &CMat) -> CMat {
        if self.identity {
            q.adjoint_mul_skew_if(w0, &w0.matmul(q))
        } else {
            let jqj = self.j.matmul(q).matmul(&self.j_inv);
            q.adjoint_mul(&w0.matmul(&jqj))
        }
    }
}

impl CMat {
    /// `self† · wq`, taking the skew-Hermitian fast path when `w` is
    /// skew-Hermitian up to round-off.
    pub(crate) fn adjoint_mul_skew_if(&self, w: &CMat, wq: &CMat) -> CMat {
        if is_skew_hermitian(w) {
            self.adjoint_mul_skew(wq)
        } else {
            self.adjoint_mul(wq)
        }
    }
}

fn is_skew_hermitian(w: &CMat) -> bool {
    let n = w.dim();
    let scale = w.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut defect = 0.0;
    for i in 0..n {
        for j in i..n {
            defect += (w[(i, j)] + w[(j, i)].conj()).norm_sqr();
        }
    }
    defect.sqrt() <= 1e-12 * scale
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureReport {
    /// `‖J² − αI‖_F`
    pub square_residual: f64,
    /// max over the basis of `‖[J², Wᵢ]‖_F`
    pub centrality_residual: f64,
    /// max over the basis of the algebra residual of `Wᵢ†`
    pub adjoint_closure_residual: f64,
}

impl StructureReport {
    pub fn max_residual(&self) -> f64 {
        self.square_residual
            .max(self.centrality_residual)
            .max(self.adjoint_closure_residual)
    }
}

/// A matrix certified (to the structure's tolerance) to lie in the algebra.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    structure: Arc<QuadraticStructure>,
    matrix: CMat,
}

impl AlgebraElement {
    pub fn new(structure: Arc<QuadraticStructure>, matrix: CMat) -> Result<Self> {
        if !matrix.is_finite() {
            return Err(Error::NonFinite {
                context: "algebra element",
            });
        }
        let residual = structure.algebra_residual(&matrix)?;
        let tolerance = structure.tolerance() * matrix.frobenius_norm().max(1.0);
        if residual > tolerance {
            return Err(Error::Membership {
                what: "algebra",
                residual,
                tolerance,
            });
        }
        Ok(Self { structure, matrix })
    }

    pub fn structure(&self) -> &Arc<QuadraticStructure> {
        &self.structure
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn residual(&self) -> f64 {
        self.structure
            .algebra_residual(&self.matrix)
            .expect("dimension checked at construction")
    }

    /// `Q†W₀JQJ⁻¹`, checked to stay in the algebra.
    pub fn reconstruct(&self, q: &GroupElement) -> Result<AlgebraElement> {
        let w = self.structure.reconstruct(&self.matrix, q.matrix())?;
        AlgebraElement::new(self.structure.clone(), w)
    }
}

/// A matrix certified (to the structure's tolerance) to lie in the group.
#[derive(Debug, Clone)]
pub struct GroupElement {
    structure: Arc<QuadraticStructure>,
    matrix: CMat,
}

impl GroupElement {
    pub fn new(structure: Arc<QuadraticStructure>, matrix: CMat) -> Result<Self> {
        if !matrix.is_finite() {
            return Err(Error::NonFinite {
                context: "group element",
            });
        }
        let residual = structure.group_residual(&matrix)?;
        if residual > structure.tolerance() {
            return Err(Error::Membership {
                what: "group",
                residual,
                tolerance: structure.tolerance(),
            });
        }
        Ok(Self { structure, matrix })
    }

    pub fn identity(structure: Arc<QuadraticStructure>) -> Self {
        let n = structure.dim();
        Self {
            structure,
            matrix: CMat::identity(n),
        }
    }

    pub fn structure(&self) -> &Arc<QuadraticStructure> {
        &self.structure
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{I, ONE, ZERO};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sigma3() -> CMat {
        CMat::diag(&[ONE, -ONE])
    }

    #[test]
    fn rejects_non_scalar_square() {
        let j = CMat::diag(&[ONE, c(2.0, 0.0)]);
        assert!(QuadraticStructure::new(j).is_err());
        assert!(QuadraticStructure::new(CMat::zeros(2)).is_err());
    }

    #[test]
    fn j_inverse_closed_form() {
        // symplectic J, J² = -I
        let j = CMat::from_real_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        let s = QuadraticStructure::new(j.clone()).unwrap();
        assert!((s.alpha() - c(-1.0, 0.0)).norm() < 1e-15);
        assert!(j.matmul(s.j_inv()).distance(&CMat::identity(2)) < 1e-15);
    }

    #[test]
    fn algebra_residual_examples() {
        let s = QuadraticStructure::identity(2);
        assert_eq!(s.algebra_residual(&sigma3().scale(I)).unwrap(), 0.0);
        let r = s.algebra_residual(&sigma3()).unwrap();
        assert!((r - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.algebra_residual(&CMat::zeros(2)).unwrap(), 0.0);
        assert!(s.algebra_residual(&CMat::zeros(3)).is_err());
    }

    #[test]
    fn group_residual_examples() {
        let s = QuadraticStructure::identity(3);
        assert_eq!(s.group_residual(&CMat::identity(3)).unwrap(), 0.0);
        let r = s.group_residual(&CMat::scalar(3, c(2.0, 0.0))).unwrap();
        assert!((r - 3.0 * 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn adjunction_conjugate_indefinite_metric() {
        let j = CMat::diag(&[ONE, -ONE]);
        let s = QuadraticStructure::new(j).unwrap();
        // i·σ₁ is not in u(1,1): B†J + JB = 2i·[[0,1],[-1,0]].
        let i_sigma1 = CMat::from_rows(&[vec![ZERO, I], vec![I, ZERO]]).unwrap();
        assert!((s.algebra_residual(&i_sigma1).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert!(s.adjunction_conjugate(&i_sigma1).is_err());
        // σ₁ is.
        let b = CMat::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap();
        assert_eq!(s.algebra_residual(&b).unwrap(), 0.0);
        let got = s.adjunction_conjugate(&b).unwrap();
        assert!(got.distance(&b) < 1e-15);
        assert!(s.adjunction_conjugate(&sigma3()).is_err());
        assert_eq!(
            s.adjunction_conjugate(&CMat::zeros(2)).unwrap(),
            CMat::zeros(2)
        );
    }

    #[test]
    fn corrupted_basis_reports_closure_defect() {
        let s = QuadraticStructure::identity(3).into_shared();
        let mut m = CMat::zeros(3);
        m[(0, 1)] = ONE;
        m[(1, 0)] = -ONE;
        m.add_to_diagonal(c(1e-3, 0.0));
        let w = AlgebraElement {
            structure: s.clone(),
            matrix: m,
        };
        let report = s.verify_structure(&[w]);
        // (W + 1e-3 I)† + (W + 1e-3 I) = 2e-3 I
        assert!((report.adjoint_closure_residual - 2e-3 * 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(report.centrality_residual, 0.0);
    }

    #[test]
    fn reconstruct_rejects_non_group_element() {
        let s = QuadraticStructure::identity(2);
        let w = sigma3().scale(I);
        assert!(s.reconstruct(&w, &CMat::scalar(2, c(2.0, 0.0))).is_err());
        assert_eq!(s.reconstruct(&w, &CMat::identity(2)).unwrap(), w);
    }
}
