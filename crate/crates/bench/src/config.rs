//! Benchmark configuration: a flat JSON file, CLI overrides, defaults.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use isoflow::Scheme;
use serde::Deserialize;
use thiserror::Error;

/// Environment variable overriding the default output directory.
pub const OUT_ENV: &str = "ISOFLOW_OUT";
pub const DEFAULT_OUT_DIR: &str = "results";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config {path}: parse error at line {line}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid value for \"{field}\": {reason}")]
    Invalid { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field,
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Zeitlin,
    RigidBody,
    Null,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Zeitlin => "zeitlin",
            ModelKind::RigidBody => "rigidbody",
            ModelKind::Null => "null",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "zeitlin" | "euler-zeitlin" => Ok(ModelKind::Zeitlin),
            "rigidbody" | "rigid-body" | "rigid_body" => Ok(ModelKind::RigidBody),
            "null" | "zero" => Ok(ModelKind::Null),
            other => Err(invalid("model", format!("unknown model {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub model: ModelKind,
    pub n_values: Vec<usize>,
    pub s_values: Vec<usize>,
    pub schemes: Vec<Scheme>,
    pub h: f64,
    pub t_end: f64,
    pub fp_tolerance: f64,
    pub fp_max_iters: usize,
    pub repetitions: usize,
    pub out_dir: PathBuf,
    pub dump_frames: bool,
    /// `None` selects the shipped default coefficients.
    pub ic_path: Option<PathBuf>,
}

/// Fields as they appear in the JSON file. Every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: Option<String>,
    #[serde(rename = "N")]
    n: Option<Vec<usize>>,
    s: Option<Vec<usize>>,
    schemes: Option<Vec<String>>,
    h: Option<f64>,
    t_end: Option<f64>,
    fp_tolerance: Option<f64>,
    fp_max_iters: Option<usize>,
    repetitions: Option<usize>,
    out_dir: Option<PathBuf>,
    dump_frames: Option<bool>,
    ic_path: Option<PathBuf>,
}

/// Values given on the command line; they take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct ConfigOverrides {
    pub model: Option<String>,
    pub n_values: Option<Vec<usize>>,
    pub s_values: Option<Vec<usize>>,
    pub schemes: Option<Vec<String>>,
    pub h: Option<f64>,
    pub t_end: Option<f64>,
    pub fp_tolerance: Option<f64>,
    pub fp_max_iters: Option<usize>,
    pub repetitions: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub dump_frames: bool,
    pub ic_path: Option<PathBuf>,
}

pub fn parse_config_str(text: &str, path: &Path) -> Result<BenchConfigBuilder, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Ok(BenchConfigBuilder { raw })
}

/// Parsed but not yet validated configuration.
#[derive(Debug, Default)]
pub struct BenchConfigBuilder {
    raw: RawConfig,
}

impl BenchConfigBuilder {
    pub fn build(self, overrides: &ConfigOverrides) -> Result<BenchConfig, ConfigError> {
        let raw = self.raw;
        let model = overrides
            .model
            .clone()
            .or(raw.model)
            .map(|m| m.parse())
            .transpose()?
            .unwrap_or(ModelKind::Zeitlin);
        let n_values = overrides.n_values.clone().or(raw.n).unwrap_or_else(|| vec![17]);
        let s_values = overrides.s_values.clone().or(raw.s).unwrap_or_else(|| vec![1]);
        let schemes = match overrides.schemes.clone().or(raw.schemes) {
            Some(list) => list
                .iter()
                .map(|s| s.parse::<Scheme>().map_err(|e| invalid("schemes", e.to_string())))
                .collect::<Result<Vec<_>, _>>()?,
            None => Scheme::ALL.to_vec(),
        };
        let out_dir = overrides
            .out_dir
            .clone()
            .or(raw.out_dir)
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
        let cfg = BenchConfig {
            model,
            n_values,
            s_values,
            schemes,
            h: overrides.h.or(raw.h).unwrap_or(0.1),
            t_end: overrides.t_end.or(raw.t_end).unwrap_or(5.0),
            fp_tolerance: overrides.fp_tolerance.or(raw.fp_tolerance).unwrap_or(1e-13),
            fp_max_iters: overrides.fp_max_iters.or(raw.fp_max_iters).unwrap_or(100),
            repetitions: overrides.repetitions.or(raw.repetitions).unwrap_or(3),
            out_dir,
            dump_frames: overrides.dump_frames || raw.dump_frames.unwrap_or(false),
            ic_path: overrides.ic_path.clone().or(raw.ic_path),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_values.is_empty() {
            return Err(invalid("N", "list must not be empty"));
        }
        if let Some(n) = self.n_values.iter().find(|&&n| n < 2) {
            return Err(invalid("N", format!("matrix size must be at least 2, got {n}")));
        }
        if self.s_values.is_empty() {
            return Err(invalid("s", "list must not be empty"));
        }
        if self.s_values.contains(&0) {
            return Err(invalid("s", "stage count must be at least 1"));
        }
        if self.schemes.is_empty() {
            return Err(invalid("schemes", "list must not be empty"));
        }
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(invalid("h", format!("must be positive, got {}", self.h)));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(invalid("t_end", format!("must be positive, got {}", self.t_end)));
        }
        if !(self.fp_tolerance > 0.0) {
            return Err(invalid(
                "fp_tolerance",
                format!("must be positive, got {}", self.fp_tolerance),
            ));
        }
        if self.fp_max_iters == 0 {
            return Err(invalid("fp_max_iters", "must be at least 1"));
        }
        if self.repetitions == 0 {
            return Err(invalid("repetitions", "must be at least 1"));
        }
        Ok(())
    }
}

/// Reads `path` (if given), applies `overrides`, fills defaults, validates.
pub fn load_config(path: Option<&Path>, overrides: &ConfigOverrides) -> Result<BenchConfig, ConfigError> {
    let builder = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Io {
                path: p.to_path_buf(),
                source,
            })?;
            parse_config_str(&text, p)?
        }
        None => BenchConfigBuilder::default(),
    };
    builder.build(overrides)
}
