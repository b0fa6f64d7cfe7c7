use std::sync::Arc;
use std::time::Duration;

use anyhow::bail;
use isoflow::{AlgebraElement, CMat, IsospectralModel, QuadraticStructure, Result as CoreResult, Scheme};
use isoflow_bench::grid::{default_setup, run_cell, run_grid_with, CellSetup};
use isoflow_bench::{diagnostics_report, load_config, ConfigOverrides, ModelKind};

fn config(model: &str, n: Vec<usize>, s: Vec<usize>, reps: usize) -> isoflow_bench::BenchConfig {
    let overrides = ConfigOverrides {
        model: Some(model.into()),
        n_values: Some(n),
        s_values: Some(s),
        repetitions: Some(reps),
        ..Default::default()
    };
    load_config(None, &overrides).unwrap()
}

fn default_factory(kind: ModelKind, n: usize) -> anyhow::Result<CellSetup> {
    default_setup(kind, n, &isoflow::models::default_initial_coefficients())
}

#[test]
fn null_model_cell_has_zero_drift() {
    let cfg = config("null", vec![6], vec![1], 3);
    let records = run_grid_with(&cfg, &default_factory);
    assert_eq!(records.len(), 3);
    for r in &records {
        assert!(r.is_ok(), "{}", r.status);
        assert_eq!(r.steps, 50);
        assert!(r.wall_time > 0.0);
        assert_eq!(r.spectrum_drift, 0.0);
        assert_eq!(r.casimir2_drift, 0.0);
        assert_eq!(r.casimir3_drift, 0.0);
        assert_eq!(r.hamiltonian_relative_drift, None);
    }
    assert_eq!(records[1].group_residual_max, Some(0.0));
}

#[test]
fn records_follow_grid_order() {
    let cfg = config("null", vec![4, 3], vec![2, 1], 1);
    let records = run_grid_with(&cfg, &default_factory);
    let keys: Vec<(usize, usize, String)> = records.iter().map(|r| (r.n, r.s, r.scheme.clone())).collect();
    let mut expected = Vec::new();
    for n in [4, 3] {
        for s in [2, 1] {
            for scheme in ["A", "B", "C"] {
                expected.push((n, s, scheme.to_string()));
            }
        }
    }
    assert_eq!(keys, expected);
}

#[test]
fn construction_time_is_not_timed() {
    let cfg = config("null", vec![8], vec![1], 3);
    let slow = |kind: ModelKind, n: usize| {
        std::thread::sleep(Duration::from_millis(200));
        default_factory(kind, n)
    };
    let fast_time = run_cell(&cfg, &default_factory, 8, 1, Scheme::Reduced).record.wall_time;
    let slow_time = run_cell(&cfg, &slow, 8, 1, Scheme::Reduced).record.wall_time;
    assert!(slow_time < 0.05, "slow construction leaked into timing: {slow_time}");
    assert!(slow_time < fast_time + 0.02, "{slow_time} vs {fast_time}");
}

/// `B(W) = cW`: harmless for the flow but the stage iteration diverges for
/// large `c h ‖W‖`.
#[derive(Debug)]
struct Stiff {
    structure: Arc<QuadraticStructure>,
    c: f64,
}

impl IsospectralModel for Stiff {
    fn name(&self) -> &str {
        "stiff"
    }

    fn structure(&self) -> &Arc<QuadraticStructure> {
        &self.structure
    }

    fn stream(&self, w: &CMat) -> CoreResult<CMat> {
        Ok(w.scale_real(self.c))
    }

    fn hamiltonian(&self, _w: &CMat) -> Option<f64> {
        None
    }
}

#[test]
fn failing_cells_do_not_abort_the_grid() {
    let cfg = config("null", vec![3, 4, 5], vec![1], 1);
    let factory = |kind: ModelKind, n: usize| -> anyhow::Result<CellSetup> {
        match n {
            4 => bail!("no model for N=4"),
            5 => {
                let structure = QuadraticStructure::identity(5).into_shared();
                let (_, w0) = default_factory(kind, 5)?;
                let w0 = AlgebraElement::new(structure.clone(), w0.into_matrix())?;
                Ok((Box::new(Stiff { structure, c: 500.0 }), w0))
            }
            _ => default_factory(kind, n),
        }
    };
    let records = run_grid_with(&cfg, &factory);
    assert_eq!(records.len(), 9);
    assert!(records[..3].iter().all(|r| r.is_ok()));
    for r in &records[3..] {
        assert!(r.status.starts_with("failed"), "{}", r.status);
    }
    assert!(records[3].status.contains("no model for N=4"));
    let reason = &records[6].status;
    assert!(reason.contains("diverge") || reason.contains("finite"), "{reason}");
}

#[test]
fn diagnostics_are_deterministic() {
    let cfg = config("zeitlin", vec![9], vec![2], 1);
    let a = run_grid_with(&cfg, &default_factory);
    let b = run_grid_with(&cfg, &default_factory);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.spectrum_drift.to_bits(), y.spectrum_drift.to_bits());
        assert_eq!(x.casimir2_drift.to_bits(), y.casimir2_drift.to_bits());
        assert_eq!(x.casimir3_drift.to_bits(), y.casimir3_drift.to_bits());
        assert_eq!(x.hamiltonian_relative_drift, y.hamiltonian_relative_drift);
        assert_eq!(x.group_residual_max, y.group_residual_max);
        assert_eq!(x.fp_iterations_mean, y.fp_iterations_mean);
    }
}

#[test]
fn zeitlin_reduced_spectrum_drift_is_small() {
    let cfg = config("zeitlin", vec![17], vec![2], 1);
    let outcome = run_cell(&cfg, &default_factory, 17, 2, Scheme::Reduced);
    assert!(outcome.record.is_ok());
    assert_eq!(outcome.frames.len(), 51);
    assert!(outcome.record.spectrum_drift <= 1e-9);
    let (model, _) = default_factory(ModelKind::Zeitlin, 17).unwrap();
    let again = diagnostics_report(&outcome.frames, model.as_ref(), &[]).unwrap();
    assert_eq!(again.spectrum_drift, outcome.record.spectrum_drift);
}

#[test]
fn rigid_body_ignores_size_list() {
    let cfg = config("rigidbody", vec![17, 33], vec![2], 1);
    let records = run_grid_with(&cfg, &default_factory);
    assert_eq!(records.len(), 3);
    assert!(records.iter().all(|r| r.n == 3 && r.is_ok()));
    assert!(records.iter().all(|r| r.hamiltonian_relative_drift.unwrap() < 1e-6));
}
