//! Butcher tableaux and the Gauss–Legendre family.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Consistency tolerance for row sums and weight sums.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-14;
/// Maximum symplecticity defect accepted by the integrators.
pub const SYMPLECTIC_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct Tableau {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
    order: usize,
}

impl Tableau {
    /// Validates shape, `c_i = Σ_j a_ij` and `Σ b_i = 1`.
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>, c: Vec<f64>, order: usize) -> Result<Self> {
        let s = b.len();
        if s == 0 {
            return Err(Error::invalid("tableau needs at least one stage"));
        }
        if a.len() != s || c.len() != s || a.iter().any(|row| row.len() != s) {
            return Err(Error::invalid(format!(
                "tableau arrays must be {s}x{s}, {s} and {s}"
            )));
        }
        let finite = a.iter().flatten().chain(&b).chain(&c).all(|x| x.is_finite());
        if !finite {
            return Err(Error::NonFinite { context: "tableau" });
        }
        for (i, row) in a.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            if (sum - c[i]).abs() > CONSISTENCY_TOLERANCE {
                return Err(Error::invalid(format!(
                    "row {i}: c_i = {} but Σ_j a_ij = {sum}",
                    c[i]
                )));
            }
        }
        let bsum: f64 = b.iter().sum();
        if (bsum - 1.0).abs() > CONSISTENCY_TOLERANCE {
            return Err(Error::invalid(format!("Σ b_i = {bsum}, expected 1")));
        }
        Ok(Self { a, b, c, order })
    }

    /// s-stage Gauss–Legendre collocation method of order 2s.
    ///
    /// Nodes are the roots of the shifted Legendre polynomial of degree `s`
    /// (Newton iteration from Chebyshev-like guesses); `b` and `A` solve the
    /// collocation Vandermonde systems `Σ_j b_j c_j^{k-1} = 1/k` and
    /// `Σ_j a_ij c_j^{k-1} = c_i^k / k`.
    pub fn gauss(s: usize) -> Result<Self> {
        if s == 0 {
            return Err(Error::invalid("Gauss method needs s >= 1"));
        }
        let c = shifted_legendre_roots(s);
        let vander = DMatrix::from_fn(s, s, |k, j| c[j].powi(k as i32));
        let lu = vander.lu();
        let rhs_b = DVector::from_fn(s, |k, _| 1.0 / (k + 1) as f64);
        let b = lu
            .solve(&rhs_b)
            .ok_or_else(|| Error::invalid("singular collocation system"))?;
        let mut a = Vec::with_capacity(s);
        for &ci in &c {
            let rhs = DVector::from_fn(s, |k, _| ci.powi(k as i32 + 1) / (k + 1) as f64);
            let row = lu
                .solve(&rhs)
                .ok_or_else(|| Error::invalid("singular collocation system"))?;
            a.push(row.iter().copied().collect());
        }
        let mut t = Self {
            a,
            b: b.iter().copied().collect(),
            c,
            order: 2 * s,
        };
        // Remove the last ulp of drift between c and the row sums.
        for (row, ci) in t.a.iter().zip(t.c.iter_mut()) {
            *ci = row.iter().sum();
        }
        Self::new(t.a, t.b, t.c, t.order)
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `max_ij |b_i a_ij + b_j a_ji − b_i b_j|`.
    pub fn symplecticity_defect(&self) -> f64 {
        let s = self.stages();
        let mut worst: f64 = 0.0;
        for i in 0..s {
            for j in 0..s {
                let m = self.b[i] * self.a[i][j] + self.b[j] * self.a[j][i] - self.b[i] * self.b[j];
                worst = worst.max(m.abs());
            }
        }
        worst
    }

    pub fn is_symplectic(&self) -> bool {
        self.symplecticity_defect() <= SYMPLECTIC_TOLERANCE
    }

    /// Largest `p ≤ max_order` (capped at 12) with `Σ b_i c_i^{k-1} = 1/k`
    /// to 1e-12 for every `k ≤ p`.
    pub fn quadrature_order(&self, max_order: usize) -> usize {
        let max_order = max_order.min(12);
        let mut p = 0;
        for k in 1..=max_order {
            let moment: f64 = self
                .b
                .iter()
                .zip(&self.c)
                .map(|(b, c)| b * c.powi(k as i32 - 1))
                .sum();
            if (moment - 1.0 / k as f64).abs() > 1e-12 {
                break;
            }
            p = k;
        }
        p
    }
}

/// Roots of `P_s(1 - 2x)` on (0, 1), ascending.
fn shifted_legendre_roots(s: usize) -> Vec<f64> {
    let mut roots: Vec<f64> = (1..=s)
        .map(|k| {
            let mut x = (std::f64::consts::PI * (k as f64 - 0.25) / (s as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(s, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            0.5 * (1.0 - x)
        })
        .collect();
    roots.sort_by(f64::total_cmp);
    roots
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let dp = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}
