//! Conservation diagnostics over a stored trajectory.

use isoflow::{CMat, Complex64, IsospectralModel, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DriftMetrics {
    /// Max over frames of the largest sorted-eigenvalue deviation from frame 0.
    pub spectrum_drift: f64,
    pub casimir2_drift: f64,
    pub casimir3_drift: f64,
    /// `max |H_n − H_0| / |H_0|`; `None` when the model has no Hamiltonian.
    pub hamiltonian_relative_drift: Option<f64>,
    /// Per-frame relative Hamiltonian deviation, frame 0 included.
    pub hamiltonian_history: Vec<f64>,
    pub group_residual_max: Option<f64>,
}

fn casimirs(w: &CMat) -> (Complex64, Complex64) {
    let w2 = w.matmul(w);
    let c2 = w2.trace();
    (c2, w2.matmul(w).trace())
}

/// Drift metrics of `frames` (frame 0 is the reference). `group_residuals`
/// holds one entry per step for scheme B and is empty otherwise.
pub fn diagnostics_report(
    frames: &[CMat],
    model: &dyn IsospectralModel,
    group_residuals: &[f64],
) -> Result<DriftMetrics> {
    let mut metrics = DriftMetrics {
        spectrum_drift: 0.0,
        casimir2_drift: 0.0,
        casimir3_drift: 0.0,
        hamiltonian_relative_drift: None,
        hamiltonian_history: Vec::new(),
        group_residual_max: group_residuals.iter().copied().reduce(f64::max),
    };
    let Some(first) = frames.first() else {
        return Ok(metrics);
    };
    let spectrum0 = first.eigenvalues()?;
    let (c20, c30) = casimirs(first);
    let h0 = model.hamiltonian(first);
    for frame in frames {
        let spectrum = frame.eigenvalues()?;
        let deviation = spectrum
            .iter()
            .zip(&spectrum0)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        metrics.spectrum_drift = metrics.spectrum_drift.max(deviation);
        let (c2, c3) = casimirs(frame);
        metrics.casimir2_drift = metrics.casimir2_drift.max((c2 - c20).norm());
        metrics.casimir3_drift = metrics.casimir3_drift.max((c3 - c30).norm());
        if let (Some(h0), Some(h)) = (h0, model.hamiltonian(frame)) {
            let scale = if h0 == 0.0 { 1.0 } else { h0.abs() };
            metrics.hamiltonian_history.push((h - h0).abs() / scale);
        }
    }
    metrics.hamiltonian_relative_drift = metrics.hamiltonian_history.iter().copied().reduce(f64::max);
    Ok(metrics)
}
