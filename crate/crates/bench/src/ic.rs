//! Initial-condition coefficient files: one `l m re im` line per mode.

use std::path::Path;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;

/// Coefficients shipped with the repository.
pub const DEFAULT_IC: &str = include_str!("../../../config/initial_conditions.txt");

pub type Coefficients = Vec<(usize, isize, Complex64)>;

pub fn parse_coefficients(text: &str) -> Result<Coefficients> {
    let mut out = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            bail!("line {}: expected \"l m re im\", got {line:?}", index + 1);
        }
        let l: usize = fields[0].parse().with_context(|| format!("line {}: bad l", index + 1))?;
        let m: isize = fields[1].parse().with_context(|| format!("line {}: bad m", index + 1))?;
        let re: f64 = fields[2].parse().with_context(|| format!("line {}: bad re", index + 1))?;
        let im: f64 = fields[3].parse().with_context(|| format!("line {}: bad im", index + 1))?;
        out.push((l, m, Complex64::new(re, im)));
    }
    Ok(out)
}

pub fn load_coefficients(path: Option<&Path>) -> Result<Coefficients> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading initial conditions {}", p.display()))?;
            parse_coefficients(&text).with_context(|| format!("parsing {}", p.display()))
        }
        None => parse_coefficients(DEFAULT_IC),
    }
}
