//! Structural verification suite behind the `check` subcommand.

use std::fmt;

use anyhow::Result;
use isoflow::dense::Lu;
use isoflow::integrators::integrate;
use isoflow::models::{default_initial_coefficients, spin_generators};
use isoflow::{
    AlgebraElement, CMat, Complex64, QuadraticStructure, Scheme, StepConfig, Tableau, ZeitlinModel,
};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            passed: value <= threshold,
        }
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict}  {:<48} {:.3e} (limit {:.1e})", self.name, self.value, self.threshold)
    }
}

/// Basis of su(n): `E_ab − E_ba`, `i(E_ab + E_ba)` for a < b and
/// `i(E_aa − E_{a+1,a+1})`.
pub fn su_basis(n: usize) -> Vec<CMat> {
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    let mut basis = Vec::with_capacity(n * n - 1);
    for a in 0..n {
        for b in a + 1..n {
            let mut real = CMat::zeros(n);
            real[(a, b)] = one;
            real[(b, a)] = -one;
            basis.push(real);
            let mut imag = CMat::zeros(n);
            imag[(a, b)] = i;
            imag[(b, a)] = i;
            basis.push(imag);
        }
    }
    for a in 0..n - 1 {
        let mut d = CMat::zeros(n);
        d[(a, a)] = i;
        d[(a + 1, a + 1)] = -i;
        basis.push(d);
    }
    basis
}

/// Real skew-symmetric basis of so(n).
pub fn so_basis(n: usize) -> Vec<CMat> {
    let one = Complex64::new(1.0, 0.0);
    let mut basis = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let mut e = CMat::zeros(n);
            e[(a, b)] = one;
            e[(b, a)] = -one;
            basis.push(e);
        }
    }
    basis
}

/// `−Σ_a [S_a, [S_a, W]]` straight from the spin generators.
pub fn laplacian_by_commutators(generators: &[CMat; 3], w: &CMat) -> Result<CMat> {
    let mut out = CMat::zeros(w.dim());
    for s in generators {
        let inner = s.commutator(w)?;
        out.add_scaled_real(-1.0, &s.commutator(&inner)?);
    }
    Ok(out)
}

/// The `N² × N²` matrix of the Laplacian in the basis `E_ij`, index `iN + j`.
pub fn dense_laplacian(n: usize) -> Result<CMat> {
    let generators = spin_generators(n)?;
    let size = n * n;
    let mut op = CMat::zeros(size);
    for q in 0..size {
        let mut e = CMat::zeros(n);
        e[(q / n, q % n)] = Complex64::new(1.0, 0.0);
        let image = laplacian_by_commutators(&generators, &e)?;
        for (p, v) in image.as_slice().iter().enumerate() {
            op[(p, q)] = *v;
        }
    }
    Ok(op)
}

/// `{0} ∪ {−l(l+1)}` with multiplicity `2l+1`, ascending.
pub fn expected_laplacian_spectrum(n: usize) -> Vec<f64> {
    let mut out = vec![0.0];
    for l in 1..n {
        let value = -((l * (l + 1)) as f64);
        out.extend(std::iter::repeat(value).take(2 * l + 1));
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Largest deviation between the dense operator's spectrum and
/// [`expected_laplacian_spectrum`]. The zero eigenvalue belongs to `I`; the
/// rest is the spectrum on trace-free matrices.
pub fn laplacian_spectrum_error(n: usize) -> Result<f64> {
    let op = dense_laplacian(n)?;
    let eig = op.eigenvalues()?;
    let imag = eig.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let mut re: Vec<f64> = eig.iter().map(|z| z.re).collect();
    re.sort_by(f64::total_cmp);
    let expected = expected_laplacian_spectrum(n);
    let real = re.iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(real.max(imag))
}

/// Relative difference between the banded solver and a dense solve of
/// `(L + P) x = w`, where `P x = tr(x) I / N` pins the trace.
pub fn laplacian_solve_error(model: &ZeitlinModel, w: &CMat) -> Result<f64> {
    let n = model.n();
    let mut op = dense_laplacian(n)?;
    for a in 0..n {
        for c in 0..n {
            op[(a * n + a, c * n + c)] += Complex64::new(1.0 / n as f64, 0.0);
        }
    }
    let mut rhs = CMat::zeros(n * n);
    for (p, v) in w.as_slice().iter().enumerate() {
        rhs[(p, 0)] = *v;
    }
    let x = Lu::factor(&op)?.solve(&rhs)?;
    let dense = CMat::from_fn(n, |i, j| x[(i * n + j, 0)]);
    let banded = model.laplacian_solve(w)?;
    Ok(banded.distance(&dense) / dense.frobenius_norm())
}

fn structure_residual(n: usize, basis: Vec<CMat>) -> Result<f64> {
    let structure = QuadraticStructure::identity(n).into_shared();
    let elements = basis
        .into_iter()
        .map(|m| AlgebraElement::new(structure.clone(), m))
        .collect::<isoflow::Result<Vec<_>>>()?;
    Ok(structure.verify_structure(&elements).max_residual())
}

/// Runs every structural check. Slow-ish items are still well under a second.
pub fn run_checks() -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for s in 1..=3 {
        let tableau = Tableau::gauss(s)?;
        out.push(CheckOutcome::at_most(
            format!("gauss({s}) symplecticity defect"),
            tableau.symplecticity_defect(),
            1e-14,
        ));
        let order = tableau.quadrature_order(12);
        out.push(CheckOutcome {
            name: format!("gauss({s}) quadrature order = {}", 2 * s),
            value: order as f64,
            threshold: (2 * s) as f64,
            passed: order == 2 * s,
        });
    }
    out.push(CheckOutcome::at_most("su(17) structure residual", structure_residual(17, su_basis(17))?, 1e-12));
    out.push(CheckOutcome::at_most("so(3) structure residual", structure_residual(3, so_basis(3))?, 1e-12));
    for n in [2, 5, 9] {
        out.push(CheckOutcome::at_most(
            format!("Laplacian spectrum N={n}"),
            laplacian_spectrum_error(n)?,
            1e-10,
        ));
    }
    let model = ZeitlinModel::new(17)?;
    let w0 = model.initial_vorticity(&default_initial_coefficients())?;
    out.push(CheckOutcome::at_most(
        "Laplacian banded vs dense solve N=17",
        laplacian_solve_error(&model, w0.matrix())?,
        1e-11,
    ));
    for s in 1..=3 {
        let cfg = StepConfig::gauss(s, 0.1)?;
        let mut worst = 0.0f64;
        let mut steps = 0;
        let mut track = |_: usize, _: &AlgebraElement, r: &isoflow::StepReport| {
            steps += 1;
            worst = worst.max(r.group_residual.unwrap_or(f64::INFINITY));
        };
        integrate(&model, Scheme::Reduced, &w0, &cfg, 5.0, &mut [&mut track])?;
        let mut outcome = CheckOutcome::at_most(format!("scheme B group residual, s={s}, 50 steps"), worst, 1e-11);
        outcome.passed &= steps == 50;
        out.push(outcome);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_sizes() {
        assert_eq!(su_basis(4).len(), 15);
        assert_eq!(so_basis(3).len(), 3);
    }

    #[test]
    fn expected_spectrum_counts() {
        let values = expected_laplacian_spectrum(5);
        assert_eq!(values.len(), 25);
        assert_eq!(values.iter().filter(|&&v| v == -20.0).count(), 9);
        assert_eq!(values.iter().filter(|&&v| v == -2.0).count(), 3);
    }

    #[test]
    fn dense_operator_agrees_with_banded() {
        let model = ZeitlinModel::new(6).unwrap();
        let op = dense_laplacian(6).unwrap();
        let w = CMat::from_fn(6, |i, j| Complex64::new((i * 7 + j) as f64 % 5.0, (i as f64) - (j as f64)));
        let banded = model.laplacian_apply(&w).unwrap();
        let dense = CMat::from_fn(6, |i, j| {
            (0..36).map(|q| op[(i * 6 + j, q)] * w.as_slice()[q]).sum()
        });
        assert!(banded.distance(&dense) < 1e-12 * dense.frobenius_norm());
    }
}
