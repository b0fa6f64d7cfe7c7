//! `ISOFLOW1` binary trajectories.
//!
//! Layout: the magic `ISOFLOW1`, a `u32` little-endian byte length followed by
//! that many bytes of UTF-8 JSON metadata, a `u64` little-endian frame count,
//! then each frame as `N²` row-major entries of two little-endian `f64`
//! (real, imaginary).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use isoflow::{CMat, Complex64};
use serde::{Deserialize, Serialize};

pub const MAGIC: &[u8; 8] = b"ISOFLOW1";
pub const CONVENTIONS_VERSION: &str = "v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMetadata {
    pub model: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub scheme: String,
    pub s: usize,
    pub h: f64,
    pub conventions: String,
}

pub fn write_trajectory(frames: &[CMat], metadata: &TrajectoryMetadata, path: &Path) -> Result<()> {
    if let Some(bad) = frames.iter().position(|f| f.dim() != metadata.n) {
        bail!(
            "frame {bad} has size {} but metadata declares N = {}",
            frames[bad].dim(),
            metadata.n
        );
    }
    let json = serde_json::to_vec(metadata)?;
    let len = u32::try_from(json.len()).context("metadata too large")?;
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    let io = |r: std::io::Result<()>| r.with_context(|| format!("writing {}", path.display()));
    io(out.write_all(MAGIC))?;
    io(out.write_all(&len.to_le_bytes()))?;
    io(out.write_all(&json))?;
    io(out.write_all(&(frames.len() as u64).to_le_bytes()))?;
    for frame in frames {
        for z in frame.as_slice() {
            io(out.write_all(&z.re.to_le_bytes()))?;
            io(out.write_all(&z.im.to_le_bytes()))?;
        }
    }
    io(out.flush())
}

pub fn read_trajectory(path: &Path) -> Result<(TrajectoryMetadata, Vec<CMat>)> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut input = BufReader::new(file);
    let ctx = || format!("reading {}", path.display());
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic).with_context(ctx)?;
    ensure!(&magic == MAGIC, "{}: not an ISOFLOW1 file", path.display());
    let mut word = [0u8; 4];
    input.read_exact(&mut word).with_context(ctx)?;
    let mut json = vec![0u8; u32::from_le_bytes(word) as usize];
    input.read_exact(&mut json).with_context(ctx)?;
    let metadata: TrajectoryMetadata =
        serde_json::from_slice(&json).with_context(|| format!("{}: bad metadata", path.display()))?;
    let mut long = [0u8; 8];
    input.read_exact(&mut long).with_context(ctx)?;
    let count = u64::from_le_bytes(long);
    let n = metadata.n;
    let mut frames = Vec::new();
    for _ in 0..count {
        let mut data = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            input.read_exact(&mut long).with_context(ctx)?;
            let re = f64::from_le_bytes(long);
            input.read_exact(&mut long).with_context(ctx)?;
            let im = f64::from_le_bytes(long);
            data.push(Complex64::new(re, im));
        }
        frames.push(CMat::from_fn(n, |i, j| data[i * n + j]));
    }
    let mut rest = Vec::new();
    input.read_to_end(&mut rest).with_context(ctx)?;
    ensure!(rest.is_empty(), "{}: {} trailing bytes", path.display(), rest.len());
    Ok((metadata, frames))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta(n: usize) -> TrajectoryMetadata {
        TrajectoryMetadata {
            model: "zeitlin".into(),
            n,
            scheme: "B".into(),
            s: 2,
            h: 0.1,
            conventions: CONVENTIONS_VERSION.into(),
        }
    }

    #[test]
    fn identity_frame_file_size() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.bin");
        write_trajectory(&[CMat::identity(2)], &meta(2), &path).unwrap();
        let json_len = serde_json::to_vec(&meta(2)).unwrap().len() as u64;
        let size = std::fs::metadata(&path).unwrap().len();
        assert_eq!(size, 8 + 4 + json_len + 8 + 64);
    }

    #[test]
    fn empty_and_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.bin");
        write_trajectory(&[], &meta(3), &path).unwrap();
        let (m, frames) = read_trajectory(&path).unwrap();
        assert_eq!(m, meta(3));
        assert!(frames.is_empty());

        let frames: Vec<CMat> = (0..4)
            .map(|k| CMat::from_fn(3, |i, j| Complex64::new((i + k) as f64 / 7.0, -(j as f64).sqrt() / 3.0)))
            .collect();
        let path = dir.path().join("full.bin");
        write_trajectory(&frames, &meta(3), &path).unwrap();
        let (_, back) = read_trajectory(&path).unwrap();
        for (a, b) in frames.iter().zip(&back) {
            for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
                assert_eq!(x.re.to_bits(), y.re.to_bits());
                assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
        }
    }

    #[test]
    fn inconsistent_frames_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.bin");
        let err = write_trajectory(&[CMat::identity(2), CMat::identity(3)], &meta(2), &path).unwrap_err();
        assert!(err.to_string().contains("frame 1"));
        assert!(read_trajectory(&dir.path().join("missing.bin")).is_err());
    }
}
