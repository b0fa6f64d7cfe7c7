//! Scheme A: Gauss methods on the lifted `(Q, P)` system.

use super::{certify, fixed_point_solve, FixedPointStats, StepConfig, StepReport, Timer};
use crate::dense::CMat;
use crate::error::Result;
use crate::models::IsospectralModel;
use crate::quadratic::AlgebraElement;

/// Converged stages `K^Q_i`, `K^P_i`.
#[derive(Debug, Clone)]
pub struct StageSetQP {
    pub kq: Vec<CMat>,
    pub kp: Vec<CMat>,
}

struct Solved {
    stages: StageSetQP,
    stats: FixedPointStats,
    /// `K^Q_i B_i†` and `K^P_i B_i` from the last sweep.
    q_products: Vec<CMat>,
    p_products: Vec<CMat>,
}

fn solve(model: &dyn IsospectralModel, w: &CMat, cfg: &StepConfig) -> Result<Solved> {
    let tableau = cfg.tableau();
    let s = tableau.stages();
    let n = w.dim();
    let h = cfg.h;
    let mut q_products = Vec::new();
    let mut p_products = Vec::new();
    let map = |stages: &[CMat]| -> Result<Vec<CMat>> {
        let (kq, kp) = stages.split_at(s);
        let mut qb = Vec::with_capacity(s);
        let mut pb = Vec::with_capacity(s);
        for j in 0..s {
            let x = kq[j].adjoint_mul(&kp[j]);
            let b = model.stream(&x)?;
            qb.push(kq[j].matmul(&b.adjoint()));
            pb.push(kp[j].matmul(&b));
        }
        let mut next = Vec::with_capacity(2 * s);
        for row in tableau.a() {
            let mut k = CMat::identity(n);
            for (aij, prod) in row.iter().zip(&qb) {
                k.add_scaled_real(h * aij, prod);
            }
            next.push(k);
        }
        for row in tableau.a() {
            let mut k = w.clone();
            for (aij, prod) in row.iter().zip(&pb) {
                k.add_scaled_real(-h * aij, prod);
            }
            next.push(k);
        }
        q_products = qb;
        p_products = pb;
        Ok(next)
    };
    let mut initial = vec![CMat::identity(n); s];
    initial.extend(std::iter::repeat(w.clone()).take(s));
    let (mut stages, stats) = fixed_point_solve(map, initial, cfg.fixed_point())?;
    let kp = stages.split_off(s);
    Ok(Solved {
        stages: StageSetQP { kq: stages, kp },
        stats,
        q_products,
        p_products,
    })
}

/// Solves the `(Q, P)` stage equations from `Q₀ = I`, `P₀ = Wₙ`.
pub fn solve_stages_lifted(
    model: &dyn IsospectralModel,
    w: &AlgebraElement,
    cfg: &StepConfig,
) -> Result<(StageSetQP, FixedPointStats)> {
    let solved = solve(model, w.matrix(), cfg)?;
    Ok((solved.stages, solved.stats))
}

pub fn step_lifted(
    model: &dyn IsospectralModel,
    w: &AlgebraElement,
    cfg: &StepConfig,
) -> Result<(AlgebraElement, StepReport)> {
    let timer = Timer::start();
    let wm = w.matrix();
    let n = wm.dim();
    let solved = solve(model, wm, cfg)?;
    let mut q1 = CMat::identity(n);
    let mut p1 = wm.clone();
    for ((bi, qb), pb) in cfg.tableau().b().iter().zip(&solved.q_products).zip(&solved.p_products) {
        q1.add_scaled_real(cfg.h * bi, qb);
        p1.add_scaled_real(-cfg.h * bi, pb);
    }
    let next = certify(w, q1.adjoint_mul(&p1))?;
    let s = cfg.tableau().stages();
    let report = StepReport {
        fp_iterations: solved.stats.iterations,
        final_residual: solved.stats.residual,
        stage_count: 2 * s,
        wall_time: timer.seconds(),
        group_residual: None,
    };
    Ok((next, report))
}
