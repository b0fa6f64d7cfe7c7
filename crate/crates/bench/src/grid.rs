//! Benchmark grid execution.

use std::sync::Mutex;

use anyhow::{Context, Result};
use isoflow::integrators::{integrate, step_count, Observer};
use isoflow::models::default_momentum;
use isoflow::{
    AlgebraElement, CMat, Complex64, IsospectralModel, NullModel, RigidBodyModel, Scheme, StepConfig,
    StepReport, TrajectorySummary, ZeitlinModel,
};
use serde::{Deserialize, Serialize};

use crate::config::{BenchConfig, ModelKind};
use crate::diagnostics::{diagnostics_report, DriftMetrics};
use crate::ic::{load_coefficients, Coefficients};

/// Serializes every timed run in the process.
static TIMING_LOCK: Mutex<()> = Mutex::new(());

pub const STATUS_OK: &str = "ok";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub model: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub scheme: String,
    pub s: usize,
    pub h: f64,
    pub steps: usize,
    /// Median stepping time over the timed repetitions.
    #[serde(rename = "wall_time_s")]
    pub wall_time: f64,
    #[serde(rename = "fp_iters_mean")]
    pub fp_iterations_mean: f64,
    #[serde(rename = "fp_iters_max")]
    pub fp_iterations_max: usize,
    pub spectrum_drift: f64,
    pub casimir2_drift: f64,
    pub casimir3_drift: f64,
    #[serde(rename = "ham_drift")]
    pub hamiltonian_relative_drift: Option<f64>,
    #[serde(rename = "group_residual")]
    pub group_residual_max: Option<f64>,
    pub status: String,
}

impl RunRecord {
    pub fn is_ok(&self) -> bool {
        self.status == STATUS_OK
    }
}

pub type CellSetup = (Box<dyn IsospectralModel>, AlgebraElement);

/// Builds the model and initial state for one matrix size.
pub type ModelFactory<'a> = dyn Fn(ModelKind, usize) -> Result<CellSetup> + Sync + 'a;

/// Everything produced by one cell.
#[derive(Debug)]
pub struct CellOutcome {
    pub record: RunRecord,
    pub metrics: Option<DriftMetrics>,
    /// States of the final timed run, `W₀` first.
    pub frames: Vec<CMat>,
}

/// Default models: Zeitlin from `coefficients`, rigid body from the default
/// momentum, and `B ≡ 0` with a fixed diagonal state.
pub fn default_setup(kind: ModelKind, n: usize, coefficients: &Coefficients) -> Result<CellSetup> {
    Ok(match kind {
        ModelKind::Zeitlin => {
            let model = ZeitlinModel::new(n)?;
            let w0 = model.initial_vorticity(coefficients)?;
            (Box::new(model), w0)
        }
        ModelKind::RigidBody => {
            let model = RigidBodyModel::default();
            let w0 = model.element(default_momentum())?;
            (Box::new(model), w0)
        }
        ModelKind::Null => {
            let model = NullModel::new(n);
            let centre = (n as f64 - 1.0) / 2.0;
            let diag: Vec<Complex64> = (0..n).map(|k| Complex64::new(0.0, k as f64 - centre)).collect();
            let w0 = AlgebraElement::new(model.structure().clone(), CMat::diag(&diag))?;
            (Box::new(model), w0)
        }
    })
}

/// Matrix sizes actually run: the rigid body is always 3×3.
pub fn effective_sizes(cfg: &BenchConfig) -> Vec<usize> {
    match cfg.model {
        ModelKind::RigidBody => vec![3],
        _ => cfg.n_values.clone(),
    }
}

struct Recorder {
    frames: Vec<CMat>,
    group_residuals: Vec<f64>,
}

impl Observer for Recorder {
    fn initial(&mut self, w0: &AlgebraElement) {
        self.frames.push(w0.matrix().clone());
    }

    fn after_step(&mut self, _step: usize, state: &AlgebraElement, report: &StepReport) {
        self.frames.push(state.matrix().clone());
        if let Some(g) = report.group_residual {
            self.group_residuals.push(g);
        }
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

fn failed_record(cfg: &BenchConfig, n: usize, s: usize, scheme: Scheme, err: &anyhow::Error) -> RunRecord {
    RunRecord {
        model: cfg.model.name().to_string(),
        n,
        scheme: scheme.letter().to_string(),
        s,
        h: cfg.h,
        steps: step_count(cfg.t_end, cfg.h).unwrap_or(0),
        wall_time: f64::NAN,
        fp_iterations_mean: f64::NAN,
        fp_iterations_max: 0,
        spectrum_drift: f64::NAN,
        casimir2_drift: f64::NAN,
        casimir3_drift: f64::NAN,
        hamiltonian_relative_drift: None,
        group_residual_max: None,
        status: format!("failed: {}", format!("{err:#}").replace(['\n', '\r'], " ")),
    }
}

/// A cell ready to be timed.
struct Prepared {
    scheme: Scheme,
    s: usize,
    model: Box<dyn IsospectralModel>,
    w0: AlgebraElement,
    step_cfg: StepConfig,
    times: Vec<f64>,
    last: Option<TrajectorySummary>,
    recorder: Recorder,
}

fn prepare(cfg: &BenchConfig, factory: &ModelFactory<'_>, n: usize, s: usize, scheme: Scheme) -> Result<Prepared> {
    let (model, w0) = factory(cfg.model, n).with_context(|| format!("building {} N={n}", cfg.model))?;
    let step_cfg = StepConfig::gauss(s, cfg.h)?
        .with_tolerance(cfg.fp_tolerance)?
        .with_max_iters(cfg.fp_max_iters)?;
    Ok(Prepared {
        scheme,
        s,
        model,
        w0,
        step_cfg,
        times: Vec::with_capacity(cfg.repetitions),
        last: None,
        recorder: Recorder {
            frames: Vec::new(),
            group_residuals: Vec::new(),
        },
    })
}

impl Prepared {
    fn warm_up(&self, cfg: &BenchConfig) -> Result<()> {
        let _lock = TIMING_LOCK.lock().unwrap_or_else(|poisoned| poisoned.into_inner());
        integrate(self.model.as_ref(), self.scheme, &self.w0, &self.step_cfg, cfg.t_end, &mut [])
            .context("warm-up run")?;
        Ok(())
    }

    /// One timed run; the final one records frames for the diagnostics.
    fn timed(&mut self, cfg: &BenchConfig) -> Result<()> {
        let rep = self.times.len() + 1;
        let record = rep == cfg.repetitions;
        let _lock = TIMING_LOCK.lock().unwrap_or_else(|poisoned| poisoned.into_inner());
        let summary = if record {
            integrate(self.model.as_ref(), self.scheme, &self.w0, &self.step_cfg, cfg.t_end, &mut [&mut self.recorder])
        } else {
            integrate(self.model.as_ref(), self.scheme, &self.w0, &self.step_cfg, cfg.t_end, &mut [])
        }
        .with_context(|| format!("timed run {rep}"))?;
        self.times.push(summary.stepping_time);
        self.last = Some(summary);
        Ok(())
    }

    fn finish(mut self, cfg: &BenchConfig) -> Result<CellOutcome> {
        let summary = self.last.take().context("no timed run completed")?;
        let metrics =
            diagnostics_report(&self.recorder.frames, self.model.as_ref(), &self.recorder.group_residuals)?;
        let record = RunRecord {
            model: cfg.model.name().to_string(),
            n: self.model.dim(),
            scheme: self.scheme.letter().to_string(),
            s: self.s,
            h: cfg.h,
            steps: summary.steps,
            wall_time: median(&mut self.times),
            fp_iterations_mean: summary.fp_iterations_mean(),
            fp_iterations_max: summary.fp_iterations_max,
            spectrum_drift: metrics.spectrum_drift,
            casimir2_drift: metrics.casimir2_drift,
            casimir3_drift: metrics.casimir3_drift,
            hamiltonian_relative_drift: metrics.hamiltonian_relative_drift,
            group_residual_max: metrics.group_residual_max,
            status: STATUS_OK.to_string(),
        };
        Ok(CellOutcome {
            record,
            metrics: Some(metrics),
            frames: self.recorder.frames,
        })
    }
}

fn failed_outcome(cfg: &BenchConfig, n: usize, s: usize, scheme: Scheme, err: &anyhow::Error) -> CellOutcome {
    CellOutcome {
        record: failed_record(cfg, n, s, scheme, err),
        metrics: None,
        frames: Vec::new(),
    }
}

/// Runs every scheme of one `(N, s)` group. Each scheme gets an untimed
/// warm-up, then the timed repetitions go round-robin over the schemes so
/// that slow phases of the machine affect all of them alike.
pub fn run_group(
    cfg: &BenchConfig,
    factory: &ModelFactory<'_>,
    n: usize,
    s: usize,
    schemes: &[Scheme],
) -> Vec<CellOutcome> {
    let mut slots: Vec<std::result::Result<Prepared, CellOutcome>> = schemes
        .iter()
        .map(|&scheme| {
            prepare(cfg, factory, n, s, scheme)
                .and_then(|p| p.warm_up(cfg).map(|_| p))
                .map_err(|err| failed_outcome(cfg, n, s, scheme, &err))
        })
        .collect();
    for _ in 0..cfg.repetitions {
        for slot in slots.iter_mut() {
            if let Ok(prepared) = slot {
                if let Err(err) = prepared.timed(cfg) {
                    *slot = Err(failed_outcome(cfg, n, s, prepared.scheme, &err));
                }
            }
        }
    }
    slots
        .into_iter()
        .zip(schemes)
        .map(|(slot, &scheme)| match slot {
            Ok(prepared) => prepared
                .finish(cfg)
                .unwrap_or_else(|err| failed_outcome(cfg, n, s, scheme, &err)),
            Err(outcome) => outcome,
        })
        .collect()
}

/// Runs one cell: an untimed warm-up, then `cfg.repetitions` timed runs.
/// Errors become a failed record.
pub fn run_cell(cfg: &BenchConfig, factory: &ModelFactory<'_>, n: usize, s: usize, scheme: Scheme) -> CellOutcome {
    run_group(cfg, factory, n, s, &[scheme]).pop().expect("one scheme")
}

/// Every `(N, s, scheme)` cell in that nesting order.
pub fn run_grid_with(cfg: &BenchConfig, factory: &ModelFactory<'_>) -> Vec<RunRecord> {
    let mut records = Vec::new();
    for n in effective_sizes(cfg) {
        for &s in &cfg.s_values {
            records.extend(run_group(cfg, factory, n, s, &cfg.schemes).into_iter().map(|o| o.record));
        }
    }
    records
}

pub fn run_grid(cfg: &BenchConfig) -> Result<Vec<RunRecord>> {
    let coefficients = load_coefficients(cfg.ic_path.as_deref())?;
    let factory = move |kind: ModelKind, n: usize| default_setup(kind, n, &coefficients);
    Ok(run_grid_with(cfg, &factory))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
