//! Scheme C: isospectral symplectic Runge–Kutta on the algebra.
//!
//! Eliminating `(Q, P)` from the lifted stage equations through
//! `Uᵢ = Kᵢ^Q†P₀`, `Vⱼ = Q₀†Kⱼ^P` and `Xᵢⱼ = Kᵢ^Q†Kⱼ^P` with `Bₖ = B(Xₖₖ)`:
//!
//! ```text
//! Uᵢ  = W + h Σₖ aᵢₖ Bₖ Uₖ
//! Vⱼ  = W − h Σₗ aⱼₗ Vₗ Bₗ
//! Xᵢⱼ = W + h Σₖ aᵢₖ Bₖ Uₖ − h Σₗ aⱼₗ Vₗ Bₗ − h² Σₖₗ aᵢₖ aⱼₗ Bₖ Xₖₗ Bₗ
//! W₁  = W + h Σᵢ bᵢ Bᵢ Uᵢ − h Σⱼ bⱼ Vⱼ Bⱼ − h² Σᵢⱼ bᵢ bⱼ Bᵢ Xᵢⱼ Bⱼ
//! ```
//!
//! With one stage the midpoint form `(I − h/2 B) X (I + h/2 B) = W`,
//! `W₁ = (I + h/2 B) X (I − h/2 B)` needs the single unknown `X`.

use super::{certify, fixed_point_solve, FixedPointStats, StepConfig, StepReport, Timer};
use crate::dense::CMat;
use crate::error::Result;
use crate::models::IsospectralModel;
use crate::quadratic::AlgebraElement;

/// Converged algebra-level stages. `x[i][j]` plays the role of `Kᵢ^Q†Kⱼ^P`;
/// the diagonal feeds `B`.
#[derive(Debug, Clone)]
pub struct StageSetIso {
    pub u: Vec<CMat>,
    pub v: Vec<CMat>,
    pub x: Vec<Vec<CMat>>,
}

struct GeneralProducts {
    bu: Vec<CMat>,
    vb: Vec<CMat>,
    /// `Bₖ Xₖₗ Bₗ`, row-major in `(k, l)`.
    bxb: Vec<CMat>,
}

fn solve_general(
    model: &dyn IsospectralModel,
    w: &CMat,
    cfg: &StepConfig,
) -> Result<(StageSetIso, FixedPointStats, GeneralProducts)> {
    let tableau = cfg.tableau();
    let a = tableau.a();
    let s = tableau.stages();
    let h = cfg.h;
    let mut last = GeneralProducts {
        bu: Vec::new(),
        vb: Vec::new(),
        bxb: Vec::new(),
    };
    let map = |stages: &[CMat]| -> Result<Vec<CMat>> {
        let (u, rest) = stages.split_at(s);
        let (v, x) = rest.split_at(s);
        let b: Vec<CMat> = (0..s)
            .map(|k| model.stream(&x[k * s + k]))
            .collect::<Result<_>>()?;
        let bu: Vec<CMat> = (0..s).map(|k| b[k].matmul(&u[k])).collect();
        let vb: Vec<CMat> = (0..s).map(|l| v[l].matmul(&b[l])).collect();
        let mut bxb = Vec::with_capacity(s * s);
        for k in 0..s {
            for l in 0..s {
                bxb.push(b[k].matmul(&x[k * s + l]).matmul(&b[l]));
            }
        }
        let mut next = Vec::with_capacity(s * s + 2 * s);
        for row in a {
            let mut ui = w.clone();
            for (aik, p) in row.iter().zip(&bu) {
                ui.add_scaled_real(h * aik, p);
            }
            next.push(ui);
        }
        for row in a {
            let mut vj = w.clone();
            for (ajl, p) in row.iter().zip(&vb) {
                vj.add_scaled_real(-h * ajl, p);
            }
            next.push(vj);
        }
        for i in 0..s {
            for j in 0..s {
                let mut xij = &next[i] + &next[s + j];
                xij -= w;
                for k in 0..s {
                    for l in 0..s {
                        let coeff = a[i][k] * a[j][l];
                        if coeff != 0.0 {
                            xij.add_scaled_real(-h * h * coeff, &bxb[k * s + l]);
                        }
                    }
                }
                next.push(xij);
            }
        }
        last = GeneralProducts { bu, vb, bxb };
        Ok(next)
    };
    let initial = vec![w.clone(); s * s + 2 * s];
    let (mut stages, stats) = fixed_point_solve(map, initial, cfg.fixed_point())?;
    let flat_x = stages.split_off(2 * s);
    let v = stages.split_off(s);
    let mut x = Vec::with_capacity(s);
    let mut flat = flat_x.into_iter();
    for _ in 0..s {
        x.push(flat.by_ref().take(s).collect());
    }
    Ok((StageSetIso { u: stages, v, x }, stats, last))
}

/// Solves the general `s² + 2s` stage system (no midpoint shortcut).
pub fn solve_stages_isospectral(
    model: &dyn IsospectralModel,
    w: &AlgebraElement,
    cfg: &StepConfig,
) -> Result<(StageSetIso, FixedPointStats)> {
    let (stages, stats, _) = solve_general(model, w.matrix(), cfg)?;
    Ok((stages, stats))
}

fn step_general(model: &dyn IsospectralModel, w: &CMat, cfg: &StepConfig) -> Result<(CMat, FixedPointStats)> {
    let (_, stats, products) = solve_general(model, w, cfg)?;
    let b = cfg.tableau().b();
    let s = b.len();
    let h = cfg.h;
    let mut next = w.clone();
    for i in 0..s {
        next.add_scaled_real(h * b[i], &products.bu[i]);
        next.add_scaled_real(-h * b[i], &products.vb[i]);
        for j in 0..s {
            next.add_scaled_real(-h * h * b[i] * b[j], &products.bxb[i * s + j]);
        }
    }
    Ok((next, stats))
}

struct MidpointProducts {
    x: CMat,
    commutator: CMat,
    bxb: CMat,
}

/// One-stage fast path: iterates `X ← W + a[B, X] + a² B X B` with
/// `a = h/2` and `B = B(X)`, the expanded form of
/// `(I − aB) X (I + aB) = W`.
fn step_midpoint(
    model: &dyn IsospectralModel,
    w: &AlgebraElement,
    cfg: &StepConfig,
) -> Result<(CMat, FixedPointStats)> {
    let wm = w.matrix();
    let skew = w.structure().is_identity();
    let half = 0.5 * cfg.h;
    let mut last: Option<MidpointProducts> = None;
    let map = |x: &[CMat]| -> Result<Vec<CMat>> {
        let x = &x[0];
        let b = model.stream(x)?;
        let bx = b.matmul(x);
        // For skew-Hermitian B and X, XB = (BX)† and BXB is skew-Hermitian.
        let (xb, bxb) = if skew {
            (bx.adjoint(), bx.matmul_skew(&b))
        } else {
            (x.matmul(&b), bx.matmul(&b))
        };
        let commutator = &bx - &xb;
        let mut next = wm.clone();
        next.add_scaled_real(half, &commutator);
        next.add_scaled_real(half * half, &bxb);
        last = Some(MidpointProducts {
            x: x.clone(),
            commutator,
            bxb,
        });
        Ok(vec![next])
    };
    let (_, stats) = fixed_point_solve(map, vec![wm.clone()], cfg.fixed_point())?;
    let p = last.expect("at least one sweep ran");
    let mut next = p.x;
    next.add_scaled_real(half, &p.commutator);
    next.add_scaled_real(-half * half, &p.bxb);
    Ok((next, stats))
}

pub fn step_isospectral(
    model: &dyn IsospectralModel,
    w: &AlgebraElement,
    cfg: &StepConfig,
) -> Result<(AlgebraElement, StepReport)> {
    let timer = Timer::start();
    let s = cfg.tableau().stages();
    let fast = s == 1 && cfg.midpoint_fast_path;
    let (next, stats) = if fast {
        step_midpoint(model, w, cfg)?
    } else {
        step_general(model, w.matrix(), cfg)?
    };
    let next = certify(w, next)?;
    let report = StepReport {
        fp_iterations: stats.iterations,
        final_residual: stats.residual,
        stage_count: if fast { 1 } else { s * s + 2 * s },
        wall_time: timer.seconds(),
        group_residual: None,
    };
    Ok((next, report))
}
