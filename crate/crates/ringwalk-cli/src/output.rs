//! Deterministic CSV, JSON and PGM writers.
//!
//! Every CSV and PGM starts with a comment line pointing at the manifest
//! that produced it; JSON documents carry a `manifest` field. Re-running a
//! command with the same parameters reproduces these files byte for byte.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub const MANIFEST_NAME: &str = "manifest.json";

pub fn csv_writer(dir: &Path, name: &str, header: &str) -> anyhow::Result<(BufWriter<File>, PathBuf)> {
    let path = dir.join(name);
    let mut w = BufWriter::new(File::create(&path)?);
    writeln!(w, "# manifest: {MANIFEST_NAME}")?;
    writeln!(w, "{header}")?;
    Ok((w, path))
}

pub fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> anyhow::Result<PathBuf> {
    let path = dir.join(name);
    let mut doc = value.clone();
    if let serde_json::Value::Object(map) = &mut doc {
        map.insert(
            "manifest".to_string(),
            serde_json::Value::String(MANIFEST_NAME.to_string()),
        );
    }
    let mut w = BufWriter::new(File::create(&path)?);
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)?;
    Ok(path)
}

/// 8-bit grayscale PGM. `rows × cols` values in [0, 1] are mapped linearly
/// to 0..=255; values are expected to be pre-scaled.
pub fn write_pgm(
    dir: &Path,
    name: &str,
    rows: usize,
    cols: usize,
    values: impl Iterator<Item = f64>,
) -> anyhow::Result<PathBuf> {
    let path = dir.join(name);
    let mut w = BufWriter::new(File::create(&path)?);
    writeln!(w, "P5")?;
    writeln!(w, "# manifest: {MANIFEST_NAME}")?;
    writeln!(w, "{cols} {rows}")?;
    writeln!(w, "255")?;
    let mut buf = Vec::with_capacity(rows * cols);
    for v in values {
        let clamped = v.clamp(0.0, 1.0);
        buf.push((clamped * 255.0).round() as u8);
    }
    anyhow::ensure!(buf.len() == rows * cols, "pgm size mismatch");
    w.write_all(&buf)?;
    Ok(path)
}

/// Scale factor that saturates the top percentile of an intensity map, for
/// readable heatmaps of spectra with bright injection peaks.
pub fn saturation_scale(values: &[f64], percentile: f64) -> f64 {
    let mut positive: Vec<f64> = values.iter().copied().filter(|v| *v > 0.0).collect();
    if positive.is_empty() {
        return 1.0;
    }
    positive.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let idx = ((positive.len() - 1) as f64 * percentile).round() as usize;
    let v = positive[idx.min(positive.len() - 1)];
    if v > 0.0 {
        v
    } else {
        1.0
    }
}
