//! Dense complex square matrices.
//!
//! Everything the integrators need lives here: products (including the
//! structure-aware `A†B` variant used when the result is known to be
//! skew-Hermitian), commutators, Frobenius quantities, an LU solver and
//! spectra. Storage is row-major `Vec<Complex64>`.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative pivot threshold for [`CMat::solve`].
pub const PIVOT_THRESHOLD: f64 = 1e-14;

/// Width (relative to the largest eigenvalue modulus) of the buckets used to
/// compare real parts when sorting spectra. Real parts closer than this are
/// treated as equal and the imaginary part decides.
pub const EIGEN_SORT_BUCKET: f64 = 1e-9;

#[derive(Clone, PartialEq)]
pub struct CMat {
    n: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMat({}x{})", self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = self
                .row(i)
                .iter()
                .map(|z| format!("{:+.4e}{:+.4e}i", z.re, z.im))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, ONE)
    }

    pub fn scalar(n: usize, value: Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = value;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Builds a matrix from row-major entries, rejecting non-square grids and
    /// non-finite values.
    pub fn from_row_major(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                context: "construction",
            });
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(n, data)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn check_same_dim(&self, other: &CMat) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    pub fn adjoint(&self) -> CMat {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `trace(A†B)`.
    pub fn frobenius_inner(&self, other: &CMat) -> Result<Complex64> {
        self.check_same_dim(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Frobenius distance without allocating.
    pub fn distance(&self, other: &CMat) -> f64 {
        debug_assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, alpha: Complex64) -> CMat {
        CMat {
            n: self.n,
            data: self.data.iter().map(|z| z * alpha).collect(),
        }
    }

    pub fn scale_real(&self, alpha: f64) -> CMat {
        CMat {
            n: self.n,
            data: self.data.iter().map(|z| z * alpha).collect(),
        }
    }

    /// `self += alpha * other`
    pub fn add_scaled(&mut self, alpha: Complex64, other: &CMat) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    /// `self += alpha * other` for a real coefficient.
    pub fn add_scaled_real(&mut self, alpha: f64, other: &CMat) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * alpha;
        }
    }

    pub fn add_to_diagonal(&mut self, value: Complex64) {
        let n = self.n;
        for i in 0..n {
            self.data[i * n + i] += value;
        }
    }

    /// `A·B`; panics on dimension mismatch (see [`CMat::try_mul`]).
    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n, "matmul dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (c, b) in out_row.iter_mut().zip(b_row) {
                    *c += a * b;
                }
            }
        }
        out
    }

    pub fn try_mul(&self, other: &CMat) -> Result<CMat> {
        self.check_same_dim(other)?;
        Ok(self.matmul(other))
    }

    /// `A†·B` without forming the adjoint.
    pub fn adjoint_mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n, "adjoint_mul dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for k in 0..n {
            let b_row = &other.data[k * n..(k + 1) * n];
            for i in 0..n {
                let a = self.data[k * n + i].conj();
                if a == ZERO {
                    continue;
                }
                let out_row = &mut out.data[i * n..(i + 1) * n];
                for (c, b) in out_row.iter_mut().zip(b_row) {
                    *c += a * b;
                }
            }
        }
        out
    }

    /// `A†·B` for operands whose product is skew-Hermitian (for instance
    /// `K†(W K)` with `W` skew-Hermitian). Only the upper triangle is
    /// accumulated; the lower triangle is filled by `C_ji = -conj(C_ij)`.
    pub fn adjoint_mul_skew(&self, other: &CMat) -> CMat {
        self.adjoint_mul_upper(other, -1.0)
    }

    /// `A†·B` for operands whose product is Hermitian (for instance `Q†Q`).
    pub fn adjoint_mul_hermitian(&self, other: &CMat) -> CMat {
        self.adjoint_mul_upper(other, 1.0)
    }

    fn adjoint_mul_upper(&self, other: &CMat, reflect: f64) -> CMat {
        assert_eq!(self.n, other.n, "adjoint_mul dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for k in 0..n {
            let b_row = &other.data[k * n..(k + 1) * n];
            for i in 0..n {
                let a = self.data[k * n + i].conj();
                if a == ZERO {
                    continue;
                }
                let out_row = &mut out.data[i * n + i..(i + 1) * n];
                for (c, b) in out_row.iter_mut().zip(&b_row[i..]) {
                    *c += a * b;
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                out.data[j * n + i] = out.data[i * n + j].conj() * reflect;
            }
        }
        out
    }

    /// `A·B` for operands whose product is skew-Hermitian (for instance
    /// `B X B` with `B`, `X` skew-Hermitian).
    pub fn matmul_skew(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n, "matmul_skew dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * n + i..(k + 1) * n];
                let out_row = &mut out.data[i * n + i..(i + 1) * n];
                for (c, b) in out_row.iter_mut().zip(b_row) {
                    *c += a * b;
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                out.data[j * n + i] = -out.data[i * n + j].conj();
            }
        }
        out
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &CMat) -> Result<CMat> {
        self.check_same_dim(other)?;
        let mut ab = self.matmul(other);
        ab -= &other.matmul(self);
        Ok(ab)
    }

    /// Solves `A X = Y` by LU with partial pivoting.
    pub fn solve(&self, rhs: &CMat) -> Result<CMat> {
        self.check_same_dim(rhs)?;
        Lu::factor(self)?.solve(rhs)
    }

    /// Eigenvalues with multiplicity, sorted by real part and then by
    /// imaginary part. Real parts are compared in buckets of width
    /// [`EIGEN_SORT_BUCKET`] times the spectral radius so round-off in the
    /// real parts of (say) skew-Hermitian spectra cannot reorder them.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let n = self.n;
        if n == 0 {
            return Ok(Vec::new());
        }
        let m = self.to_nalgebra();
        let schur = nalgebra::Schur::try_new(m, f64::EPSILON, 10_000 * n.max(1))
            .ok_or(Error::EigenNoConvergence { n })?;
        let vals = schur
            .eigenvalues()
            .ok_or(Error::EigenNoConvergence { n })?;
        let mut vals: Vec<Complex64> = vals.iter().copied().collect();
        sort_spectrum(&mut vals);
        Ok(vals)
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        self.to_nalgebra()
            .singular_values()
            .iter()
            .fold(0.0_f64, |acc, &s| acc.max(s))
    }

    pub fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.n, self.n, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        Self::from_fn_checked(m.nrows(), |i, j| m[(i, j)])
    }

    fn from_fn_checked(n: usize, f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let m = Self::from_fn(n, f);
        if !m.is_finite() {
            return Err(Error::NonFinite {
                context: "construction",
            });
        }
        Ok(m)
    }
}

/// Sorts a spectrum in the order documented on [`CMat::eigenvalues`].
pub fn sort_spectrum(vals: &mut [Complex64]) {
    let radius = vals.iter().fold(1.0_f64, |acc, z| acc.max(z.norm()));
    let width = EIGEN_SORT_BUCKET * radius;
    vals.sort_by(|a, b| {
        // `+ 0.0` folds -0.0 into +0.0 so total_cmp sees one bucket.
        let ka = (a.re / width).round() + 0.0;
        let kb = (b.re / width).round() + 0.0;
        ka.total_cmp(&kb).then(a.im.total_cmp(&b.im))
    });
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &CMat) -> Result<Self> {
        let n = a.n;
        let threshold = PIVOT_THRESHOLD * a.frobenius_norm();
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let (p, pivot) = (col..n)
                .map(|r| (r, lu[r * n + col].norm()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pivot > threshold) || pivot == 0.0 {
                return Err(Error::Singular {
                    column: col,
                    pivot,
                    threshold,
                });
            }
            if p != col {
                for j in 0..n {
                    lu.swap(p * n + j, col * n + j);
                }
                perm.swap(p, col);
            }
            let inv = ONE / lu[col * n + col];
            for r in (col + 1)..n {
                let factor = lu[r * n + col] * inv;
                lu[r * n + col] = factor;
                if factor == ZERO {
                    continue;
                }
                for j in (col + 1)..n {
                    let u = lu[col * n + j];
                    lu[r * n + j] -= factor * u;
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn solve(&self, rhs: &CMat) -> Result<CMat> {
        rhs.check_same_dim(&CMat::zeros(self.n))?;
        let n = self.n;
        let lu = &self.lu;
        // Work column-block-wise on the row-major right-hand side.
        let mut x = CMat::zeros(n);
        for (i, &p) in self.perm.iter().enumerate() {
            x.data[i * n..(i + 1) * n].copy_from_slice(rhs.row(p));
        }
        for i in 0..n {
            for k in 0..i {
                let l = lu[i * n + k];
                if l == ZERO {
                    continue;
                }
                let (head, tail) = x.data.split_at_mut(i * n);
                let src = &head[k * n..(k + 1) * n];
                for (dst, s) in tail[..n].iter_mut().zip(src) {
                    *dst -= l * s;
                }
            }
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let u = lu[i * n + k];
                if u == ZERO {
                    continue;
                }
                let (head, tail) = x.data.split_at_mut(k * n);
                let dst_row = &mut head[i * n..(i + 1) * n];
                for (dst, s) in dst_row.iter_mut().zip(&tail[..n]) {
                    *dst -= u * s;
                }
            }
            let inv = ONE / lu[i * n + i];
            for v in &mut x.data[i * n..(i + 1) * n] {
                *v *= inv;
            }
        }
        if !x.is_finite() {
            return Err(Error::NonFinite { context: "solve" });
        }
        Ok(x)
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl AddAssign<&CMat> for CMat {
    fn add_assign(&mut self, rhs: &CMat) {
        assert_eq!(self.n, rhs.n);
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&CMat> for CMat {
    fn sub_assign(&mut self, rhs: &CMat) {
        assert_eq!(self.n, rhs.n);
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

impl Add for &CMat {
    type Output = CMat;
    fn add(self, rhs: &CMat) -> CMat {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &CMat {
    type Output = CMat;
    fn sub(self, rhs: &CMat) -> CMat {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul for &CMat {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        self.matmul(rhs)
    }
}

impl Neg for &CMat {
    type Output = CMat;
    fn neg(self) -> CMat {
        self.scale_real(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli() -> [CMat; 3] {
        [
            CMat::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap(),
            CMat::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).unwrap(),
            CMat::from_rows(&[vec![ONE, ZERO], vec![ZERO, -ONE]]).unwrap(),
        ]
    }

    #[test]
    fn pauli_commutator() {
        let [s1, s2, s3] = pauli();
        let got = s1.commutator(&s2).unwrap();
        assert!(got.distance(&s3.scale(c(0.0, 2.0))) < 1e-15);
        assert_eq!(s1.commutator(&s1).unwrap().frobenius_norm(), 0.0);
        let id = CMat::identity(2);
        assert_eq!(id.commutator(&s3).unwrap().frobenius_norm(), 0.0);
    }

    #[test]
    fn commutator_dimension_mismatch() {
        let err = CMat::identity(2).commutator(&CMat::identity(3));
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn frobenius_inner_examples() {
        let [s1, s2, _] = pauli();
        assert_eq!(s1.frobenius_inner(&s2).unwrap(), ZERO);
        let id = CMat::identity(4);
        assert_eq!(id.frobenius_inner(&id).unwrap(), c(4.0, 0.0));
    }

    #[test]
    fn adjoint_of_diagonal() {
        let d = CMat::diag(&[I, -I]);
        assert_eq!(d.adjoint(), CMat::diag(&[-I, I]));
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(CMat::from_row_major(2, vec![ZERO; 3]).is_err());
        assert!(CMat::from_row_major(1, vec![c(f64::NAN, 0.0)]).is_err());
        assert!(CMat::from_rows(&[vec![ONE, ONE], vec![ONE]]).is_err());
    }

    #[test]
    fn solve_simple() {
        let y = CMat::from_fn(3, |i, j| c(i as f64, j as f64 + 1.0));
        assert_eq!(CMat::identity(3).solve(&y).unwrap(), y);
        let half = CMat::scalar(3, c(2.0, 0.0)).solve(&CMat::identity(3)).unwrap();
        assert!(half.distance(&CMat::scalar(3, c(0.5, 0.0))) < 1e-16);
    }

    #[test]
    fn solve_singular_reports_pivot() {
        let a = CMat::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        match a.solve(&CMat::identity(2)) {
            Err(Error::Singular { column, pivot, .. }) => {
                assert_eq!(column, 1);
                assert!(pivot < 1e-14);
            }
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn eigenvalues_examples() {
        let d = CMat::diag(&[c(3.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        let ev = d.eigenvalues().unwrap();
        for (k, expected) in [1.0, 2.0, 3.0].iter().enumerate() {
            assert!((ev[k] - c(*expected, 0.0)).norm() < 1e-14);
        }
        let rot = CMat::from_real_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        let ev = rot.eigenvalues().unwrap();
        assert!((ev[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn spectral_norm_examples() {
        assert!((CMat::identity(5).spectral_norm() - 1.0).abs() < 1e-14);
        assert!((CMat::diag(&[I, c(0.0, -3.0)]).spectral_norm() - 3.0).abs() < 1e-14);
        assert_eq!(CMat::zeros(4).spectral_norm(), 0.0);
    }

    #[test]
    fn structured_products_match_general_ones() {
        let k = CMat::from_fn(5, |i, j| c((i * 3 + j) as f64 * 0.1, (i as f64 - j as f64) * 0.05));
        let w = CMat::from_fn(5, |i, j| c(j as f64 - i as f64, (i + j) as f64 * 0.2));
        // make w skew-Hermitian
        let w = &w - &w.adjoint();
        let wk = w.matmul(&k);
        let full = k.adjoint().matmul(&wk);
        assert!(full.distance(&k.adjoint_mul(&wk)) < 1e-12);
        assert!(full.distance(&k.adjoint_mul_skew(&wk)) < 1e-12);
        let b = &k - &k.adjoint();
        let bw = b.matmul(&w);
        assert!(bw.matmul(&b).distance(&bw.matmul_skew(&b)) < 1e-12);
    }
}
