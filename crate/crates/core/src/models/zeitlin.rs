//! Euler–Zeitlin flow on su(N).
//!
//! Conventions: `Δ_N W = −Σ_a [S_a, [S_a, W]]` with `S_a` the spin
//! `j = (N−1)/2` generators, so trace-free eigenvalues are `−l(l+1)`; the
//! stream matrix is `B(W) = Δ_N⁻¹ W` (positive sign).
//!
//! `Δ_N` never mixes diagonal bands. On band `m` the entry `(a, a+m)` couples
//! only to `(a±1, a+m±1)`:
//!
//! ```text
//! (Δ W)_ab = (2 μ_a μ_b − 2j(j+1)) W_ab + s_a s_b W_{a+1,b+1} + s_{a−1} s_{b−1} W_{a−1,b−1}
//! ```
//!
//! with `μ_a = j − a` and `s_a = (S₊)_{a,a+1}`. Each band is therefore a
//! symmetric tridiagonal system, factored once at construction.

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::IsospectralModel;
use crate::dense::{CMat, I, ZERO};
use crate::error::{Error, Result};
use crate::quadratic::{AlgebraElement, QuadraticStructure};

/// Highest degree accepted by [`ZeitlinModel::initial_vorticity`].
pub const MAX_INITIAL_DEGREE: usize = 4;

/// Seed of the linear congruential sequence behind the default coefficients.
pub const DEFAULT_COEFFICIENT_SEED: u32 = 20240101;

/// Default `c_{l,m}` for `1 ≤ l ≤ 4`, `0 ≤ m ≤ l`: the sequence
/// `x ← 1664525 x + 1013904223 (mod 2³²)` mapped to `2x/2³² − 1`.
pub fn default_initial_coefficients() -> Vec<(usize, isize, Complex64)> {
    let mut x = DEFAULT_COEFFICIENT_SEED;
    let mut out = Vec::new();
    for l in 1..=MAX_INITIAL_DEGREE {
        for m in 0..=l as isize {
            x = x.wrapping_mul(1_664_525).wrapping_add(1_013_904_223);
            let value = 2.0 * f64::from(x) / 4_294_967_296.0 - 1.0;
            out.push((l, m, Complex64::new(value, 0.0)));
        }
    }
    out
}

/// `(S1, S2, S3)` of the N-dimensional irreducible representation of su(2).
pub fn spin_generators(n: usize) -> Result<[CMat; 3]> {
    if n < 2 {
        return Err(Error::invalid(format!("spin generators need N >= 2, got {n}")));
    }
    let j = (n as f64 - 1.0) / 2.0;
    let raise = raising_entries(n);
    let s3 = CMat::diag(&(0..n).map(|a| Complex64::new(j - a as f64, 0.0)).collect::<Vec<_>>());
    let mut s1 = CMat::zeros(n);
    let mut s2 = CMat::zeros(n);
    for (a, &s) in raise.iter().enumerate() {
        // S₊ = S1 + iS2 has entry s at (a, a+1), S₋ = S₊ᵀ.
        s1[(a, a + 1)] = Complex64::new(s / 2.0, 0.0);
        s1[(a + 1, a)] = Complex64::new(s / 2.0, 0.0);
        s2[(a, a + 1)] = Complex64::new(0.0, -s / 2.0);
        s2[(a + 1, a)] = Complex64::new(0.0, s / 2.0);
    }
    Ok([s1, s2, s3])
}

/// `(S₊)_{a,a+1} = √(j(j+1) − μ_{a+1}(μ_{a+1}+1))`.
fn raising_entries(n: usize) -> Vec<f64> {
    let j = (n as f64 - 1.0) / 2.0;
    (0..n - 1)
        .map(|a| {
            let mu = j - (a + 1) as f64;
            (j * (j + 1.0) - mu * (mu + 1.0)).sqrt()
        })
        .collect()
}

/// One diagonal band of `Δ_N` as a symmetric tridiagonal matrix, with an
/// `LDLᵀ` factorization of the (possibly reduced) system.
#[derive(Debug, Clone)]
struct Band {
    offset: isize,
    start_row: usize,
    diag: Vec<f64>,
    off: Vec<f64>,
    /// Index of the first unknown in the factored system: 1 on band 0, where
    /// `ψ_00` is pinned to remove the kernel spanned by the identity.
    skip: usize,
    inv_pivots: Vec<f64>,
    multipliers: Vec<f64>,
}

impl Band {
    fn new(n: usize, offset: isize, raise: &[f64]) -> Self {
        let j = (n as f64 - 1.0) / 2.0;
        let len = n - offset.unsigned_abs();
        let start_row = if offset < 0 { offset.unsigned_abs() } else { 0 };
        let mu = |a: usize| j - a as f64;
        let diag: Vec<f64> = (0..len)
            .map(|k| {
                let a = start_row + k;
                let b = (a as isize + offset) as usize;
                2.0 * mu(a) * mu(b) - 2.0 * j * (j + 1.0)
            })
            .collect();
        let off: Vec<f64> = (0..len.saturating_sub(1))
            .map(|k| {
                let a = start_row + k;
                let b = (a as isize + offset) as usize;
                raise[a] * raise[b]
            })
            .collect();
        let skip = usize::from(offset == 0);
        let mut band = Self {
            offset,
            start_row,
            diag,
            off,
            skip,
            inv_pivots: Vec::new(),
            multipliers: Vec::new(),
        };
        band.factor();
        band
    }

    fn len(&self) -> usize {
        self.diag.len()
    }

    fn factor(&mut self) {
        let len = self.len();
        let mut pivots = Vec::with_capacity(len);
        let mut multipliers = Vec::with_capacity(len);
        for k in self.skip..len {
            let mut p = self.diag[k];
            if k > self.skip {
                let l = self.off[k - 1] / pivots[pivots.len() - 1];
                p -= l * self.off[k - 1];
                multipliers.push(l);
            }
            pivots.push(p);
        }
        self.inv_pivots = pivots.iter().map(|p| 1.0 / p).collect();
        self.multipliers = multipliers;
    }

    #[inline]
    fn index(&self, n: usize, k: usize) -> usize {
        let a = self.start_row + k;
        let b = (a as isize + self.offset) as usize;
        a * n + b
    }

    fn apply(&self, n: usize, src: &[Complex64], dst: &mut [Complex64]) {
        let len = self.len();
        for k in 0..len {
            let mut v = src[self.index(n, k)] * self.diag[k];
            if k > 0 {
                v += src[self.index(n, k - 1)] * self.off[k - 1];
            }
            if k + 1 < len {
                v += src[self.index(n, k + 1)] * self.off[k];
            }
            dst[self.index(n, k)] = v;
        }
    }

    fn solve(&self, n: usize, rhs: &[Complex64], out: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        let len = self.len();
        // Consecutive band entries are n + 1 apart in row-major storage.
        let stride = n + 1;
        let base = self.index(n, 0);
        scratch.clear();
        scratch.extend((self.skip..len).map(|k| rhs[base + k * stride]));
        // forward: L y = r
        for i in 1..scratch.len() {
            let prev = scratch[i - 1];
            scratch[i] -= prev * self.multipliers[i - 1];
        }
        // D z = y, Lᵀ x = z
        let m = scratch.len();
        if m > 0 {
            scratch[m - 1] *= self.inv_pivots[m - 1];
        }
        for i in (0..m.saturating_sub(1)).rev() {
            let next = scratch[i + 1];
            scratch[i] = scratch[i] * self.inv_pivots[i] - next * self.multipliers[i];
        }
        if self.skip == 1 {
            // Pin ψ_00 = 0, then shift along the kernel to make ψ trace-free.
            let mean = scratch.iter().sum::<Complex64>() / len as f64;
            out[base] = -mean;
            for (k, v) in scratch.iter().enumerate() {
                out[base + (k + 1) * stride] = v - mean;
            }
        } else {
            for (k, v) in scratch.iter().enumerate() {
                out[base + k * stride] = *v;
            }
        }
    }

    fn dense(&self) -> DMatrix<f64> {
        let len = self.len();
        DMatrix::from_fn(len, len, |r, c| {
            if r == c {
                self.diag[r]
            } else if r + 1 == c {
                self.off[r]
            } else if c + 1 == r {
                self.off[c]
            } else {
                0.0
            }
        })
    }
}

/// Frobenius-normalized matrix harmonic `T_{l,m}` on diagonal offset `m`.
#[derive(Debug, Clone)]
pub struct HarmonicMode {
    pub l: usize,
    pub m: isize,
    pub matrix: CMat,
}

#[derive(Debug, Clone)]
pub struct ZeitlinModel {
    n: usize,
    generators: [CMat; 3],
    bands: Vec<Band>,
    structure: Arc<QuadraticStructure>,
}

impl ZeitlinModel {
    pub fn new(n: usize) -> Result<Self> {
        let generators = spin_generators(n)?;
        let raise = raising_entries(n);
        let bands = (-(n as isize - 1)..=(n as isize - 1))
            .map(|m| Band::new(n, m, &raise))
            .collect();
        Ok(Self {
            n,
            generators,
            bands,
            structure: QuadraticStructure::identity(n).into_shared(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `j = (N−1)/2`
    pub fn spin(&self) -> f64 {
        (self.n as f64 - 1.0) / 2.0
    }

    pub fn generators(&self) -> &[CMat; 3] {
        &self.generators
    }

    fn band(&self, m: isize) -> &Band {
        &self.bands[(m + self.n as isize - 1) as usize]
    }

    /// `Δ_N W`, band by band in O(N²).
    pub fn laplacian_apply(&self, w: &CMat) -> Result<CMat> {
        self.structure.j().check_same_dim(w)?;
        let mut out = CMat::zeros(self.n);
        for band in &self.bands {
            band.apply(self.n, w.as_slice(), out.as_mut_slice());
        }
        Ok(out)
    }

    /// The unique trace-free `ψ` with `Δ_N ψ = W`. `W` must be trace-free
    /// to 1e-12 relative.
    pub fn laplacian_solve(&self, w: &CMat) -> Result<CMat> {
        self.structure.j().check_same_dim(w)?;
        let tr = w.trace().norm();
        let tolerance = 1e-12 * w.frobenius_norm();
        if tr > tolerance {
            return Err(Error::Membership {
                what: "trace (Δ_N is singular on multiples of I)",
                residual: tr,
                tolerance,
            });
        }
        Ok(self.solve_unchecked(w))
    }

    fn solve_unchecked(&self, w: &CMat) -> CMat {
        let mut out = CMat::zeros(self.n);
        let mut scratch = Vec::with_capacity(self.n);
        for band in &self.bands {
            band.solve(self.n, w.as_slice(), out.as_mut_slice(), &mut scratch);
        }
        out
    }

    /// Δ_N⁻¹ applied to the trace-free part of `W`.
    pub fn stream_matrix(&self, w: &CMat) -> Result<CMat> {
        self.structure.j().check_same_dim(w)?;
        let mut traceless = w.clone();
        traceless.add_to_diagonal(-w.trace() / self.n as f64);
        Ok(self.solve_unchecked(&traceless))
    }

    /// `½ Re⟨W, Δ_N⁻¹W⟩`.
    pub fn energy(&self, w: &CMat) -> Result<f64> {
        let psi = self.stream_matrix(w)?;
        Ok(0.5 * w.frobenius_inner(&psi)?.re)
    }

    /// Eigenvector of the band-`m` restriction of `Δ_N` for `−l(l+1)`,
    /// embedded on offset `m`, with its first nonzero entry real positive.
    /// Negative `m` follows `T_{l,−m} = (−1)^m T_{l,m}†`.
    pub fn harmonic(&self, l: usize, m: isize) -> Result<HarmonicMode> {
        if l < 1 || l > self.n - 1 || m.unsigned_abs() > l {
            return Err(Error::invalid(format!(
                "harmonic (l={l}, m={m}) out of range for N={}",
                self.n
            )));
        }
        if m < 0 {
            let pos = self.harmonic(l, -m)?;
            let sign = if m.unsigned_abs() % 2 == 0 { 1.0 } else { -1.0 };
            return Ok(HarmonicMode {
                l,
                m,
                matrix: pos.matrix.adjoint().scale_real(sign),
            });
        }
        let band = self.band(m);
        let eig = SymmetricEigen::new(band.dense());
        let target = -((l * (l + 1)) as f64);
        let (idx, value) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .min_by(|x, y| (x.1 - target).abs().total_cmp(&(y.1 - target).abs()))
            .expect("band is nonempty");
        if (value - target).abs() > 1e-8 {
            return Err(Error::invalid(format!(
                "band {m} has no eigenvalue near {target} (closest {value})"
            )));
        }
        let mut v: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let max = v.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
        let first = v
            .iter()
            .copied()
            .find(|x| x.abs() > 1e-12 * max)
            .expect("eigenvector is nonzero");
        let scale = first.signum() / norm;
        v.iter_mut().for_each(|x| *x *= scale);
        let mut t = CMat::zeros(self.n);
        for (k, x) in v.iter().enumerate() {
            t.as_mut_slice()[band.index(self.n, k)] = Complex64::new(*x, 0.0);
        }
        Ok(HarmonicMode { l, m, matrix: t })
    }

    /// Initial vorticity from harmonic coefficients `c_{l,m}` (1 ≤ l ≤ 4,
    /// 0 ≤ m ≤ l). With `F = Σ c_{l,m}·i·T_{l,m}` the result is the
    /// trace-free skew-Hermitian part of `F`, scaled to unit spectral norm.
    pub fn initial_vorticity(&self, coefficients: &[(usize, isize, Complex64)]) -> Result<AlgebraElement> {
        if coefficients.iter().all(|c| c.2 == ZERO) {
            return Err(Error::invalid("all initial coefficients are zero"));
        }
        let mut f = CMat::zeros(self.n);
        for &(l, m, c) in coefficients {
            if !(1..=MAX_INITIAL_DEGREE).contains(&l) || m < 0 || m as usize > l {
                return Err(Error::invalid(format!(
                    "initial mode (l={l}, m={m}) outside 1 <= l <= {MAX_INITIAL_DEGREE}, 0 <= m <= l"
                )));
            }
            if c == ZERO {
                continue;
            }
            let t = self.harmonic(l, m)?;
            f.add_scaled(c * I, &t.matrix);
        }
        let mut w = &f - &f.adjoint();
        w = w.scale_real(0.5);
        w.add_to_diagonal(-w.trace() / self.n as f64);
        let norm = w.spectral_norm();
        if norm == 0.0 {
            return Err(Error::invalid("initial coefficients have no skew-Hermitian part"));
        }
        AlgebraElement::new(self.structure.clone(), w.scale_real(1.0 / norm))
    }
}

impl IsospectralModel for ZeitlinModel {
    fn name(&self) -> &str {
        "zeitlin"
    }

    fn structure(&self) -> &Arc<QuadraticStructure> {
        &self.structure
    }

    fn stream(&self, w: &CMat) -> Result<CMat> {
        self.stream_matrix(w)
    }

    fn hamiltonian(&self, w: &CMat) -> Option<f64> {
        self.energy(w).ok()
    }
}
