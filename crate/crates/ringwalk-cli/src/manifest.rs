//! Run manifests: every command records its resolved parameters, the
//! configuration it ran on, the pinned tolerances and the files it wrote.

use ringwalk::config::RawConfig;
use ringwalk::tol;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Serialize)]
pub struct Tolerances {
    pub unitarity: f64,
    pub det_one: f64,
    pub norm_drift: f64,
    pub chern_residue: f64,
    pub winding_residue: f64,
    pub gap_closure: f64,
    pub localization_threshold: f64,
    pub degeneracy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            unitarity: tol::UNITARITY,
            det_one: tol::DET_ONE,
            norm_drift: tol::NORM_DRIFT,
            chern_residue: tol::CHERN_RESIDUE,
            winding_residue: tol::WINDING_RESIDUE,
            gap_closure: tol::GAP_CLOSURE,
            localization_threshold: tol::LOCALIZATION_THRESHOLD,
            degeneracy: tol::DEGENERACY,
        }
    }
}

#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub threads: usize,
    /// Seed for randomized runs; none of the shipped commands randomize.
    pub seed: Option<u64>,
    pub params: serde_json::Value,
    pub config: Option<RawConfig>,
    pub tolerances: Tolerances,
    pub outputs: Vec<String>,
    pub wall_clock_seconds: f64,
}

pub struct ManifestBuilder {
    manifest: RunManifest,
    started: Instant,
}

impl ManifestBuilder {
    pub fn new(command: &str, params: serde_json::Value, config: Option<RawConfig>) -> Self {
        ManifestBuilder {
            manifest: RunManifest {
                command: command.to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                threads: rayon::current_num_threads(),
                seed: None,
                params,
                config,
                tolerances: Tolerances::default(),
                outputs: Vec::new(),
                wall_clock_seconds: 0.0,
            },
            started: Instant::now(),
        }
    }

    pub fn add_output(&mut self, path: &Path) {
        if let Some(name) = path.file_name() {
            self.manifest.outputs.push(name.to_string_lossy().into_owned());
        }
    }

    pub fn add_outputs(&mut self, paths: &[PathBuf]) {
        for p in paths {
            self.add_output(p);
        }
    }

    pub fn write(mut self, dir: &Path) -> anyhow::Result<PathBuf> {
        self.manifest.wall_clock_seconds = self.started.elapsed().as_secs_f64();
        let path = dir.join(crate::output::MANIFEST_NAME);
        let file = std::fs::File::create(&path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), &self.manifest)?;
        Ok(path)
    }
}
