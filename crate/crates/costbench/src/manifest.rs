//! Run manifests: which datasets and approaches to benchmark, with which settings.
//!
//! ```json
//! {"datasets": ["data/aeeem/manifest.json"], "roster": "roster.json",
//!  "config": {"seed": 1}, "output_dir": "out"}
//! ```
//!
//! Relative paths are resolved against the manifest's directory.

use std::fs;
use std::path::{Path, PathBuf};

use costbench_core::approaches::{validate_roster, ApproachSpec};
use costbench_core::dataset::DEFAULT_MIN_DEFECTIVE;
use costbench_core::runner::BenchmarkConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

fn default_min_defective() -> usize {
    DEFAULT_MIN_DEFECTIVE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub datasets: Vec<PathBuf>,
    pub roster: PathBuf,
    #[serde(default)]
    pub config: BenchmarkConfig,
    pub output_dir: PathBuf,
    /// Products with fewer defective instances are left out of the benchmark.
    #[serde(default = "default_min_defective")]
    pub min_defective: usize,
}

/// A run manifest with paths resolved and the roster read and checked.
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub datasets: Vec<PathBuf>,
    pub roster: Vec<ApproachSpec>,
    pub roster_bytes: Vec<u8>,
    pub config: BenchmarkConfig,
    pub output_dir: PathBuf,
    pub min_defective: usize,
}

pub fn read_run_manifest(path: &Path) -> Result<ResolvedRun, CliError> {
    let bad = |msg: String| CliError::Manifest(format!("{}: {msg}", path.display()));
    let bytes = fs::read(path).map_err(|e| bad(e.to_string()))?;
    let manifest: RunManifest = serde_json::from_slice(&bytes).map_err(|e| bad(e.to_string()))?;
    if manifest.datasets.is_empty() {
        return Err(bad("no datasets listed".into()));
    }
    manifest.config.validate().map_err(|e| bad(e.to_string()))?;

    let base = path.parent().unwrap_or(Path::new("."));
    let roster_path = base.join(&manifest.roster);
    let roster_bytes = fs::read(&roster_path).map_err(|e| bad(format!("roster `{}`: {e}", roster_path.display())))?;
    let roster: Vec<ApproachSpec> =
        serde_json::from_slice(&roster_bytes).map_err(|e| bad(format!("roster `{}`: {e}", roster_path.display())))?;
    validate_roster(&roster).map_err(|e| bad(format!("roster `{}`: {e}", roster_path.display())))?;

    Ok(ResolvedRun {
        datasets: manifest.datasets.iter().map(|d| base.join(d)).collect(),
        roster,
        roster_bytes,
        config: manifest.config,
        output_dir: base.join(&manifest.output_dir),
        min_defective: manifest.min_defective,
    })
}
