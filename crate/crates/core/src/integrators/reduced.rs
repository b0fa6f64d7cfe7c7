//! Scheme B: Gauss methods on `Q̇ = Q B(Q†W₀JQJ⁻¹)†`.

use super::{certify, fixed_point_solve, FixedPointStats, StepConfig, StepReport, Timer};
use crate::dense::CMat;
use crate::error::{Error, Result};
use crate::models::IsospectralModel;
use crate::quadratic::{AlgebraElement, QuadraticStructure};

/// Converged stages `K̄^Q_i`.
#[derive(Debug, Clone)]
pub struct StageSetQ {
    pub kq: Vec<CMat>,
}

/// `K†W₀JKJ⁻¹`; for `J = I` only half of the outer product is formed since
/// `K†W₀K` is skew-Hermitian.
fn stage_argument(structure: &QuadraticStructure, w0: &CMat, k: &CMat) -> CMat {
    if structure.is_identity() {
        k.adjoint_mul_skew(&w0.matmul(k))
    } else {
        let jkj = structure.j().matmul(k).matmul(structure.j_inv());
        k.adjoint_mul(&w0.matmul(&jkj))
    }
}

struct Solved {
    stages: StageSetQ,
    stats: FixedPointStats,
    products: Vec<CMat>,
}

fn solve(model: &dyn IsospectralModel, w: &AlgebraElement, cfg: &StepConfig) -> Result<Solved> {
    let tableau = cfg.tableau();
    let s = tableau.stages();
    let structure = w.structure();
    let w0 = w.matrix();
    let n = w0.dim();
    let h = cfg.h;
    let mut products = Vec::new();
    let map = |kq: &[CMat]| -> Result<Vec<CMat>> {
        let mut qb = Vec::with_capacity(s);
        for k in kq {
            let b = model.stream(&stage_argument(structure, w0, k))?;
            qb.push(k.matmul(&b.adjoint()));
        }
        let next = tableau
            .a()
            .iter()
            .map(|row| {
                let mut k = CMat::identity(n);
                for (aij, prod) in row.iter().zip(&qb) {
                    k.add_scaled_real(h * aij, prod);
                }
                k
            })
            .collect();
        products = qb;
        Ok(next)
    };
    let (kq, stats) = fixed_point_solve(map, vec![CMat::identity(n); s], cfg.fixed_point())?;
    Ok(Solved {
        stages: StageSetQ { kq },
        stats,
        products,
    })
}

/// Solves the `Q`-only stage equations from `Q₀ = I`, `W₀ = Wₙ`.
pub fn solve_stages_reduced(
    model: &dyn IsospectralModel,
    w: &AlgebraElement,
    cfg: &StepConfig,
) -> Result<(StageSetQ, FixedPointStats)> {
    let solved = solve(model, w, cfg)?;
    Ok((solved.stages, solved.stats))
}

pub fn step_reduced(
    model: &dyn IsospectralModel,
    w: &AlgebraElement,
    cfg: &StepConfig,
) -> Result<(AlgebraElement, StepReport)> {
    let timer = Timer::start();
    let structure = w.structure();
    let n = structure.dim();
    let solved = solve(model, w, cfg)?;
    let mut q1 = CMat::identity(n);
    for (bi, prod) in cfg.tableau().b().iter().zip(&solved.products) {
        q1.add_scaled_real(cfg.h * bi, prod);
    }
    let group_residual = structure.group_residual(&q1)?;
    if group_residual > structure.tolerance() {
        return Err(Error::Membership {
            what: "group",
            residual: group_residual,
            tolerance: structure.tolerance(),
        });
    }
    let next = certify(w, stage_argument(structure, w.matrix(), &q1))?;
    let report = StepReport {
        fp_iterations: solved.stats.iterations,
        final_residual: solved.stats.residual,
        stage_count: cfg.tableau().stages(),
        wall_time: timer.seconds(),
        group_residual: Some(group_residual),
    };
    Ok((next, report))
}
