//! Symplectic Runge–Kutta integrators for `Ẇ = [B(W), W]`.
//!
//! Three routes to the same discrete flow:
//!
//! * [`Scheme::Lifted`] (A) integrates the lifted system `Q̇ = Q B(Q†P)†`,
//!   `Ṗ = −P B(Q†P)` and returns `Q₁†P₁`.
//! * [`Scheme::Reduced`] (B) integrates the group equation
//!   `Q̇ = Q B(Q†W₀JQJ⁻¹)†` alone and returns `Q₁†W₀JQ₁J⁻¹`.
//! * [`Scheme::Isospectral`] (C) works on the algebra directly with the
//!   `s² + 2s` unknowns `Uᵢ = Kᵢ^Q†P₀`, `Vⱼ = Q₀†Kⱼ^P`, `Xᵢⱼ = Kᵢ^Q†Kⱼ^P`;
//!   for one stage it uses the isospectral midpoint.
//!
//! Every step starts from `Q₀ = I`, `P₀ = Wₙ` and solves the stage
//! equations by fixed-point iteration from a cold start.

mod fixed_point;
mod isospectral;
mod lifted;
mod reduced;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

pub use fixed_point::{fixed_point_solve, FixedPointOptions, FixedPointStats, DIVERGENCE_RUN};
pub use isospectral::{solve_stages_isospectral, step_isospectral, StageSetIso};
pub use lifted::{solve_stages_lifted, step_lifted, StageSetQP};
pub use reduced::{solve_stages_reduced, step_reduced, StageSetQ};

use crate::error::{Error, Result};
use crate::models::IsospectralModel;
use crate::quadratic::AlgebraElement;
use crate::tableau::{Tableau, SYMPLECTIC_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// A: Gauss method on the lifted `(Q, P)` system.
    Lifted,
    /// B: Gauss method on the `Q`-only group equation.
    Reduced,
    /// C: isospectral symplectic Runge–Kutta on the algebra.
    Isospectral,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Lifted, Scheme::Reduced, Scheme::Isospectral];

    pub fn letter(self) -> char {
        match self {
            Scheme::Lifted => 'A',
            Scheme::Reduced => 'B',
            Scheme::Isospectral => 'C',
        }
    }

    /// Number of unknown stage matrices for `s` stages.
    pub fn stage_count(self, s: usize, midpoint_fast_path: bool) -> usize {
        match self {
            Scheme::Lifted => 2 * s,
            Scheme::Reduced => s,
            Scheme::Isospectral if s == 1 && midpoint_fast_path => 1,
            Scheme::Isospectral => s * s + 2 * s,
        }
    }

    pub fn step(
        self,
        model: &dyn IsospectralModel,
        w: &AlgebraElement,
        cfg: &StepConfig,
    ) -> Result<(AlgebraElement, StepReport)> {
        match self {
            Scheme::Lifted => step_lifted(model, w, cfg),
            Scheme::Reduced => step_reduced(model, w, cfg),
            Scheme::Isospectral => step_isospectral(model, w, cfg),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" | "LIFTED" => Ok(Scheme::Lifted),
            "B" | "REDUCED" => Ok(Scheme::Reduced),
            "C" | "ISOSPECTRAL" => Ok(Scheme::Isospectral),
            other => Err(Error::invalid(format!("unknown scheme {other:?} (expected A, B or C)"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct StepConfig {
    pub h: f64,
    pub fp_tolerance: f64,
    pub fp_max_iters: usize,
    tableau: Tableau,
    /// Use the isospectral midpoint for one-stage scheme C.
    pub midpoint_fast_path: bool,
}

impl StepConfig {
    /// Defaults: fixed-point tolerance 1e-13, at most 100 sweeps.
    pub fn new(h: f64, tableau: Tableau) -> Result<Self> {
        let cfg = Self {
            h,
            fp_tolerance: 1e-13,
            fp_max_iters: 100,
            tableau,
            midpoint_fast_path: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn gauss(s: usize, h: f64) -> Result<Self> {
        Self::new(h, Tableau::gauss(s)?)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        self.fp_tolerance = tolerance;
        self.validate()?;
        Ok(self)
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Result<Self> {
        self.fp_max_iters = max_iters;
        self.validate()?;
        Ok(self)
    }

    pub fn with_midpoint_fast_path(mut self, enabled: bool) -> Self {
        self.midpoint_fast_path = enabled;
        self
    }

    pub fn tableau(&self) -> &Tableau {
        &self.tableau
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(Error::invalid(format!("step size h must be positive, got {}", self.h)));
        }
        if !(self.fp_tolerance > 0.0) {
            return Err(Error::invalid(format!(
                "fixed-point tolerance must be positive, got {}",
                self.fp_tolerance
            )));
        }
        if self.fp_max_iters == 0 {
            return Err(Error::invalid("fixed-point iteration limit must be at least 1"));
        }
        let defect = self.tableau.symplecticity_defect();
        if defect > SYMPLECTIC_TOLERANCE {
            return Err(Error::invalid(format!(
                "tableau is not symplectic (defect {defect:.3e})"
            )));
        }
        Ok(())
    }

    pub fn fixed_point(&self) -> FixedPointOptions {
        FixedPointOptions {
            tolerance: self.fp_tolerance,
            max_iters: self.fp_max_iters,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub fp_iterations: usize,
    pub final_residual: f64,
    pub stage_count: usize,
    /// Seconds spent in the step.
    pub wall_time: f64,
    /// `‖Q₁†JQ₁ − J‖_F`, reported by scheme B.
    pub group_residual: Option<f64>,
}

/// Hooks called by [`integrate`] outside the timed stepping region.
pub trait Observer {
    fn initial(&mut self, _w0: &AlgebraElement) {}

    fn after_step(&mut self, step: usize, state: &AlgebraElement, report: &StepReport);
}

impl<F> Observer for F
where
    F: FnMut(usize, &AlgebraElement, &StepReport),
{
    fn after_step(&mut self, step: usize, state: &AlgebraElement, report: &StepReport) {
        self(step, state, report)
    }
}

#[derive(Debug, Clone)]
pub struct TrajectorySummary {
    pub steps: usize,
    pub final_state: AlgebraElement,
    /// Sum of the per-step wall times; observers are excluded.
    pub stepping_time: f64,
    pub fp_iterations_total: usize,
    pub fp_iterations_max: usize,
    pub max_final_residual: f64,
    pub max_group_residual: Option<f64>,
    pub stage_count: usize,
}

impl TrajectorySummary {
    pub fn fp_iterations_mean(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.fp_iterations_total as f64 / self.steps as f64
        }
    }
}

/// Number of steps of size `h` covering `[0, t_end]`: `t_end/h` when that is
/// a whole number up to round-off, its ceiling otherwise.
pub fn step_count(t_end: f64, h: f64) -> Result<usize> {
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::invalid(format!("t_end must be positive, got {t_end}")));
    }
    if !(h > 0.0) {
        return Err(Error::invalid(format!("step size h must be positive, got {h}")));
    }
    let ratio = t_end / h;
    let rounded = ratio.round();
    if (ratio - rounded).abs() <= 1e-9 * rounded.max(1.0) {
        Ok(rounded as usize)
    } else {
        Ok(ratio.ceil() as usize)
    }
}

/// Steps from `w0` up to `t_end`, calling each observer after every step.
pub fn integrate(
    model: &dyn IsospectralModel,
    scheme: Scheme,
    w0: &AlgebraElement,
    cfg: &StepConfig,
    t_end: f64,
    observers: &mut [&mut dyn Observer],
) -> Result<TrajectorySummary> {
    cfg.validate()?;
    let steps = step_count(t_end, cfg.h)?;
    for obs in observers.iter_mut() {
        obs.initial(w0);
    }
    let mut state = w0.clone();
    let mut summary = TrajectorySummary {
        steps,
        final_state: w0.clone(),
        stepping_time: 0.0,
        fp_iterations_total: 0,
        fp_iterations_max: 0,
        max_final_residual: 0.0,
        max_group_residual: None,
        stage_count: scheme.stage_count(cfg.tableau().stages(), cfg.midpoint_fast_path),
    };
    for step in 1..=steps {
        let (next, report) = scheme.step(model, &state, cfg).map_err(|e| Error::Step {
            step,
            cause: Box::new(e),
        })?;
        summary.stepping_time += report.wall_time;
        summary.fp_iterations_total += report.fp_iterations;
        summary.fp_iterations_max = summary.fp_iterations_max.max(report.fp_iterations);
        summary.max_final_residual = summary.max_final_residual.max(report.final_residual);
        if let Some(g) = report.group_residual {
            summary.max_group_residual = Some(summary.max_group_residual.unwrap_or(0.0).max(g));
        }
        state = next;
        for obs in observers.iter_mut() {
            obs.after_step(step, &state, &report);
        }
    }
    summary.final_state = state;
    Ok(summary)
}

pub(crate) struct Timer(Instant);

impl Timer {
    pub(crate) fn start() -> Self {
        Timer(Instant::now())
    }

    pub(crate) fn seconds(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

/// Output membership check shared by all schemes.
pub(crate) fn certify(w: &AlgebraElement, next: crate::dense::CMat) -> Result<AlgebraElement> {
    AlgebraElement::new(w.structure().clone(), next)
}
