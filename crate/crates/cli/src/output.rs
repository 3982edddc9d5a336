//! Writing result directories and replaying recorded runs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Task};
use crate::error::{CliError, Result};
use crate::experiment::{run_experiment, ExperimentOutput, RunOptions, SeedRecord};
use crate::table::ResultTable;

pub const RESULTS_FILE: &str = "results.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Sidecar describing how a result directory was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub task: Task,
    pub experiment_id: String,
    pub config_hash: String,
    pub master_seed: u64,
    /// Canonical TOML of the configuration.
    pub config: String,
    pub seeds: Vec<SeedRecord>,
    pub parallel: bool,
    pub override_qubit_ceiling: bool,
    pub files: Vec<String>,
    pub wall_time_seconds: f64,
}

impl Manifest {
    pub fn new(cfg: &ExperimentConfig, out: &ExperimentOutput, opts: &RunOptions, wall_time_seconds: f64) -> Self {
        let mut files = vec![RESULTS_FILE.to_string()];
        files.extend(out.artifacts.iter().map(|a| a.name.clone()));
        Manifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            task: out.task,
            experiment_id: out.experiment_id.clone(),
            config_hash: out.config_hash.clone(),
            master_seed: cfg.seed,
            config: cfg.canonical(),
            seeds: out.seeds.clone(),
            parallel: qbnsl::exec::is_parallel(),
            override_qubit_ceiling: opts.override_qubit_ceiling,
            files,
            wall_time_seconds,
        }
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Writes the table, artifacts and manifest under `dir`.
pub fn write_outputs(dir: &Path, out: &ExperimentOutput, manifest: &Manifest) -> Result<()> {
    write_file(&dir.join(RESULTS_FILE), out.table.to_csv_string()?.as_bytes())?;
    for a in &out.artifacts {
        write_file(&dir.join(&a.name), a.contents.as_bytes())?;
    }
    let json = serde_json::to_string_pretty(manifest).expect("manifest serialises");
    write_file(&dir.join(MANIFEST_FILE), json.as_bytes())
}

/// Output directory: `--out`, else the config's `out`, else `results/<id>`.
pub fn output_dir(cfg: &ExperimentConfig, task: Task, cli_out: Option<&Path>) -> PathBuf {
    match (cli_out, &cfg.out) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(p)) => cfg.resolve(p),
        (None, None) => PathBuf::from("results").join(cfg.experiment_id(task)),
    }
}

/// Reruns `cfg` and checks it reproduces `recorded` byte for byte.
///
/// A table whose config hash differs from the config's is rejected before
/// anything runs.
pub fn replay(cfg: &ExperimentConfig, task: Task, opts: &RunOptions, recorded: &Path) -> Result<ExperimentOutput> {
    let text = std::fs::read_to_string(recorded).map_err(|e| CliError::io(recorded, e))?;
    let table = ResultTable::read_csv(text.as_bytes()).map_err(|e| CliError::data(recorded, e))?;
    let hash = cfg.hash();
    if let Some(h) = table.config_hash() {
        if h != hash {
            return Err(CliError::Replay(format!(
                "{} was produced by config {h}, not {hash}",
                recorded.display()
            )));
        }
    }
    let out = run_experiment(cfg, task, opts)?;
    if out.table.to_csv_string()? != text {
        return Err(CliError::Replay(format!("rerun differs from {}", recorded.display())));
    }
    Ok(out)
}
