//! CSV and markdown output.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};

use crate::grid::RunRecord;

pub const CSV_HEADER: [&str; 15] = [
    "model",
    "N",
    "scheme",
    "s",
    "h",
    "steps",
    "wall_time_s",
    "fp_iters_mean",
    "fp_iters_max",
    "spectrum_drift",
    "casimir2_drift",
    "casimir3_drift",
    "ham_drift",
    "group_residual",
    "status",
];

/// 17 significant digits.
fn real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn optional(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

pub fn write_csv<W: std::io::Write>(records: &[RunRecord], out: W) -> Result<()> {
    if records.is_empty() {
        bail!("no records to write");
    }
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for r in records {
        writer.write_record([
            r.model.clone(),
            r.n.to_string(),
            r.scheme.clone(),
            r.s.to_string(),
            real(r.h),
            r.steps.to_string(),
            real(r.wall_time),
            real(r.fp_iterations_mean),
            r.fp_iterations_max.to_string(),
            real(r.spectrum_drift),
            real(r.casimir2_drift),
            real(r.casimir3_drift),
            optional(r.hamiltonian_relative_drift),
            optional(r.group_residual_max),
            r.status.clone(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn emit_csv(records: &[RunRecord], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_csv(records, file).with_context(|| format!("writing {}", path.display()))
}

pub fn read_csv(path: &Path) -> Result<Vec<RunRecord>> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    reader
        .deserialize()
        .collect::<Result<Vec<RunRecord>, _>>()
        .with_context(|| format!("parsing {}", path.display()))
}

fn push_unique<T: PartialEq + Copy>(list: &mut Vec<T>, value: T) {
    if !list.contains(&value) {
        list.push(value);
    }
}

/// One table per model; rows grouped by N with one row per scheme, one
/// column per s. The fastest scheme of each (N, s) cell is in bold.
pub fn markdown_table(records: &[RunRecord]) -> Result<String> {
    if records.is_empty() {
        bail!("no records to tabulate");
    }
    let mut models: Vec<&str> = Vec::new();
    for r in records {
        push_unique(&mut models, r.model.as_str());
    }
    let mut out = String::new();
    for model in models {
        let rows: Vec<&RunRecord> = records.iter().filter(|r| r.model == model).collect();
        let mut sizes = Vec::new();
        let mut stages = Vec::new();
        let mut schemes: Vec<&str> = Vec::new();
        for r in &rows {
            push_unique(&mut sizes, r.n);
            push_unique(&mut stages, r.s);
            push_unique(&mut schemes, r.scheme.as_str());
        }
        stages.sort_unstable();
        schemes.sort_unstable();

        writeln!(out, "### {model}: median wall time [s]\n")?;
        write!(out, "| N | scheme |")?;
        for s in &stages {
            write!(out, " s={s} |")?;
        }
        write!(out, "\n|---|---|")?;
        for _ in &stages {
            write!(out, "---:|")?;
        }
        writeln!(out)?;

        let mut winners = Vec::new();
        for &n in &sizes {
            let cell = |scheme: &str, s: usize| {
                rows.iter()
                    .find(|r| r.n == n && r.s == s && r.scheme == scheme)
                    .copied()
            };
            let fastest: Vec<Option<&str>> = stages
                .iter()
                .map(|&s| {
                    schemes
                        .iter()
                        .filter_map(|&sc| cell(sc, s).filter(|r| r.is_ok()).map(|r| (sc, r.wall_time)))
                        .min_by(|a, b| a.1.total_cmp(&b.1))
                        .map(|(sc, _)| sc)
                })
                .collect();
            for (k, &scheme) in schemes.iter().enumerate() {
                let label = if k == 0 { n.to_string() } else { String::new() };
                write!(out, "| {label} | {scheme} |")?;
                for (&s, win) in stages.iter().zip(&fastest) {
                    let text = match cell(scheme, s) {
                        None => "".to_string(),
                        Some(r) if !r.is_ok() => "failed".to_string(),
                        Some(r) if *win == Some(scheme) => format!("**{:.6}**", r.wall_time),
                        Some(r) => format!("{:.6}", r.wall_time),
                    };
                    write!(out, " {text} |")?;
                }
                writeln!(out)?;
            }
            winners.push((n, fastest));
        }
        writeln!(out, "\nFastest scheme per cell:\n")?;
        for (n, fastest) in winners {
            let cells: Vec<String> = stages
                .iter()
                .zip(&fastest)
                .map(|(s, w)| format!("s={s}: {}", w.unwrap_or("-")))
                .collect();
            writeln!(out, "- N={n}: {}", cells.join(", "))?;
        }
        writeln!(out)?;
    }
    Ok(out)
}

pub fn emit_markdown_table(records: &[RunRecord], path: &Path) -> Result<()> {
    let text = markdown_table(records)?;
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(scheme: &str, s: usize, time: f64) -> RunRecord {
        RunRecord {
            model: "zeitlin".into(),
            n: 17,
            scheme: scheme.into(),
            s,
            h: 0.1,
            steps: 50,
            wall_time: time,
            fp_iterations_mean: 6.52,
            fp_iterations_max: 8,
            spectrum_drift: 1.0 / 3.0 * 1e-12,
            casimir2_drift: 2.0f64.sqrt() * 1e-14,
            casimir3_drift: 0.0,
            hamiltonian_relative_drift: Some(std::f64::consts::PI * 1e-9),
            group_residual_max: if scheme == "B" { Some(1e-15 / 7.0) } else { None },
            status: "ok".into(),
        }
    }

    #[test]
    fn three_schemes_give_three_rows() {
        let records = vec![record("A", 1, 0.3), record("B", 1, 0.2), record("C", 1, 0.1)];
        let md = markdown_table(&records).unwrap();
        let rows: Vec<&str> = md.lines().filter(|l| l.starts_with("| ") && !l.starts_with("| N")).collect();
        assert_eq!(rows.len(), 3, "{md}");
        assert!(rows[2].contains("**0.100000**"));
        assert!(md.contains("N=17: s=1: C"));
    }

    #[test]
    fn empty_records_are_an_error() {
        assert!(markdown_table(&[]).is_err());
        assert!(write_csv(&[], Vec::new()).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let mut failed = record("C", 2, f64::NAN);
        failed.status = "failed: fixed-point iteration diverged, residual 3".into();
        let records = vec![record("A", 1, 0.1 + 0.2), record("B", 1, 1e-3 / 3.0), failed];
        emit_csv(&records, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(&CSV_HEADER.join(",")));
        let back = read_csv(&path).unwrap();
        assert_eq!(back[..2], records[..2]);
        assert!(back[2].wall_time.is_nan());
        assert_eq!(back[2].status, records[2].status);
    }
}
