//! Jacobi-style fixed-point iteration over a set of stage matrices.

use crate::dense::CMat;
use crate::error::{Error, Result};

/// Consecutive residual increases that count as divergence.
pub const DIVERGENCE_RUN: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointOptions {
    pub tolerance: f64,
    pub max_iters: usize,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-13,
            max_iters: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointStats {
    pub iterations: usize,
    pub residual: f64,
}

/// Iterates `X ← map(X)` until the largest per-matrix Frobenius update is at
/// most `tolerance`.
///
/// All stages are refreshed simultaneously from the previous iterate. The
/// iteration stops with [`Error::Divergence`] once the residual has grown
/// [`DIVERGENCE_RUN`] times in a row, and with [`Error::MaxIterations`] when
/// the budget runs out.
pub fn fixed_point_solve<F>(
    mut map: F,
    initial: Vec<CMat>,
    options: FixedPointOptions,
) -> Result<(Vec<CMat>, FixedPointStats)>
where
    F: FnMut(&[CMat]) -> Result<Vec<CMat>>,
{
    let mut current = initial;
    let mut previous_residual = f64::INFINITY;
    let mut increases = 0;
    let mut residual = f64::INFINITY;
    for iteration in 1..=options.max_iters {
        let next = map(&current)?;
        if next.len() != current.len() {
            return Err(Error::invalid(format!(
                "stage map returned {} matrices, expected {}",
                next.len(),
                current.len()
            )));
        }
        if next.iter().any(|m| !m.is_finite()) {
            return Err(Error::NonFinite {
                context: "fixed-point stage",
            });
        }
        residual = next
            .iter()
            .zip(&current)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max);
        current = next;
        if residual <= options.tolerance {
            return Ok((
                current,
                FixedPointStats {
                    iterations: iteration,
                    residual,
                },
            ));
        }
        if residual > previous_residual {
            increases += 1;
            if increases >= DIVERGENCE_RUN {
                return Err(Error::Divergence {
                    iterations: iteration,
                    residual,
                });
            }
        } else {
            increases = 0;
        }
        previous_residual = residual;
    }
    Err(Error::MaxIterations {
        iterations: options.max_iters,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn scalar(x: f64) -> CMat {
        CMat::scalar(1, Complex64::new(x, 0.0))
    }

    #[test]
    fn identity_map_converges_immediately() {
        let (x, stats) =
            fixed_point_solve(|s| Ok(s.to_vec()), vec![scalar(3.0)], FixedPointOptions::default()).unwrap();
        assert_eq!(stats.iterations, 1);
        assert_eq!(stats.residual, 0.0);
        assert_eq!(x[0], scalar(3.0));
    }

    #[test]
    fn affine_contraction_converges_to_two() {
        let map = |s: &[CMat]| Ok(vec![scalar(0.5 * s[0][(0, 0)].re + 1.0)]);
        let (x, stats) = fixed_point_solve(map, vec![scalar(0.0)], FixedPointOptions::default()).unwrap();
        assert!((x[0][(0, 0)].re - 2.0).abs() <= 1e-13);
        assert!(stats.iterations <= 45, "{stats:?}");
        assert!(stats.residual <= 1e-13);
    }

    #[test]
    fn expanding_map_is_reported_as_divergent() {
        let map = |s: &[CMat]| Ok(vec![s[0].scale_real(2.0)]);
        let err = fixed_point_solve(map, vec![scalar(1.0)], FixedPointOptions::default()).unwrap_err();
        match err {
            Error::Divergence { iterations, .. } => assert!(iterations < 100),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn slow_contraction_hits_iteration_limit() {
        let map = |s: &[CMat]| Ok(vec![scalar(0.999 * s[0][(0, 0)].re + 1.0)]);
        let options = FixedPointOptions {
            tolerance: 1e-13,
            max_iters: 10,
        };
        let err = fixed_point_solve(map, vec![scalar(0.0)], options).unwrap_err();
        assert!(matches!(err, Error::MaxIterations { iterations: 10, .. }));
    }

    #[test]
    fn non_finite_stage_is_an_error() {
        let map = |_: &[CMat]| Ok(vec![scalar(f64::NAN)]);
        let err = fixed_point_solve(map, vec![scalar(0.0)], FixedPointOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }
}
