//! Declarative experiment configuration.
//!
//! One experiment per TOML file. Grids are explicit lists. A minimal file:
//!
//! ```toml
//! task = "learn"
//! seed = 7
//!
//! [input]
//! network = "../data/cancer_like.toml"
//! rows = 10000
//! columns = ["Pollution", "Smoker", "Cancer", "Xray"]
//!
//! [qaoa]
//! layers = [3]
//! alpha = [0.3]
//! ```
//!
//! Relative paths are resolved against the directory holding the file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qbnsl::baselines::SA_LABEL;
use qbnsl::bn::ScoreKind;
use qbnsl::qaoa::CobylaConfig;
use qbnsl::sim::NoiseKind;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Score,
    Learn,
    Sample,
    SweepPa,
    SweepNoise,
    Compare,
}

impl Task {
    pub const ALL: [Task; 6] = [
        Task::Score,
        Task::Learn,
        Task::Sample,
        Task::SweepPa,
        Task::SweepNoise,
        Task::Compare,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Task::Score => "score",
            Task::Learn => "learn",
            Task::Sample => "sample",
            Task::SweepPa => "sweep-pa",
            Task::SweepNoise => "sweep-noise",
            Task::Compare => "compare",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Task {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Task::ALL
            .into_iter()
            .find(|t| t.label() == s)
            .ok_or_else(|| CliError::config("task", format!("unknown task `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Exhaustive,
    BruteForce,
    HillClimbing,
    Tabu,
    Sa,
    Qaoa,
}

impl Algorithm {
    /// Name written to result tables.
    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Exhaustive => "Exhaustive",
            Algorithm::BruteForce => "QUBO brute force",
            Algorithm::HillClimbing => "HC",
            Algorithm::Tabu => "Tabu",
            Algorithm::Sa => SA_LABEL,
            Algorithm::Qaoa => "QAOA",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreName {
    Bic,
    Bdeu,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomNetworkConfig {
    pub nodes: usize,
    #[serde(default = "defaults::max_parents")]
    pub max_parents: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputConfig {
    /// CSV with a header row of variable names.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset: Option<PathBuf>,
    /// Network file to forward-sample from and to measure SHD against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<PathBuf>,
    /// Generated binary network, used in place of `network`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_network: Option<RandomNetworkConfig>,
    /// Rows drawn when sampling from a network.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    /// Forward-sampling seed; derived from the master seed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_seed: Option<u64>,
    /// Subset of variables to keep, by name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub columns: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreConfig {
    #[serde(default = "defaults::score")]
    pub kind: ScoreName,
    #[serde(default = "defaults::ess")]
    pub ess: f64,
    #[serde(default = "defaults::max_parents")]
    pub max_parents: usize,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        ScoreConfig {
            kind: defaults::score(),
            ess: defaults::ess(),
            max_parents: defaults::max_parents(),
        }
    }
}

impl ScoreConfig {
    pub fn score_kind(&self) -> ScoreKind {
        match self.kind {
            ScoreName::Bic => ScoreKind::Bic,
            ScoreName::Bdeu => ScoreKind::BDeu { ess: self.ess },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    /// Transitivity penalty; the dominance bound when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_trans: Option<f64>,
    /// Order-consistency penalty; the dominance bound when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_consist: Option<f64>,
    /// In-degree penalty weight; the dominance bound when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_max: Option<f64>,
    /// Scale the Ising coefficients to unit maximum before building the ansatz.
    #[serde(default = "defaults::yes")]
    pub normalize_angles: bool,
}

impl Default for HamiltonianConfig {
    fn default() -> Self {
        HamiltonianConfig {
            delta_trans: None,
            delta_consist: None,
            delta_max: None,
            normalize_angles: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QaoaConfig {
    #[serde(default = "defaults::layers")]
    pub layers: Vec<usize>,
    #[serde(default = "defaults::alpha")]
    pub alpha: Vec<f64>,
    #[serde(default = "defaults::shots")]
    pub shots: u64,
    #[serde(default = "defaults::restarts")]
    pub restarts: usize,
    #[serde(default = "defaults::rhobeg")]
    pub rhobeg: f64,
    #[serde(default = "defaults::rhoend")]
    pub rhoend: f64,
    #[serde(default = "defaults::maxfun")]
    pub maxfun: usize,
}

impl Default for QaoaConfig {
    fn default() -> Self {
        QaoaConfig {
            layers: defaults::layers(),
            alpha: defaults::alpha(),
            shots: defaults::shots(),
            restarts: defaults::restarts(),
            rhobeg: defaults::rhobeg(),
            rhoend: defaults::rhoend(),
            maxfun: defaults::maxfun(),
        }
    }
}

impl QaoaConfig {
    pub fn cobyla(&self) -> CobylaConfig {
        CobylaConfig {
            rhobeg: self.rhobeg,
            rhoend: self.rhoend,
            maxfun: self.maxfun,
        }
    }
}

/// Noise channels and strengths. A sweep takes the full grid; other tasks
/// accept at most one kind and one strength.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    #[serde(default)]
    pub kinds: Vec<NoiseKind>,
    #[serde(default)]
    pub omegas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineConfig {
    #[serde(default = "defaults::algorithms")]
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "defaults::tenure")]
    pub tabu_tenure: usize,
    #[serde(default = "defaults::max_stall")]
    pub max_stall: usize,
    #[serde(default = "defaults::sa_steps")]
    pub sa_steps: usize,
    #[serde(default = "defaults::restarts")]
    pub sa_restarts: usize,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            algorithms: defaults::algorithms(),
            tabu_tenure: defaults::tenure(),
            max_stall: defaults::max_stall(),
            sa_steps: defaults::sa_steps(),
            sa_restarts: defaults::restarts(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<Task>,
    /// Label for the `experiment_id` column; the task name when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default)]
    pub seed: u64,
    /// Output directory; `--out` takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub input: InputConfig,
    #[serde(default)]
    pub score: ScoreConfig,
    #[serde(default)]
    pub hamiltonian: HamiltonianConfig,
    #[serde(default)]
    pub qaoa: QaoaConfig,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub baselines: BaselineConfig,
    /// Directory relative paths are resolved against. Not serialised.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let field = e.span().map_or_else(|| "<root>".to_string(), |s| locate(text, s.start));
            CliError::config(field, e.message().to_string())
        })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn experiment_id(&self, task: Task) -> String {
        self.id.clone().unwrap_or_else(|| task.label().to_string())
    }

    /// Canonical TOML of the settings that determine the results.
    pub fn canonical(&self) -> String {
        let mut c = self.clone();
        c.out = None;
        toml::to_string(&c).expect("config serialises")
    }

    /// First 16 hex digits of the SHA-256 of [`Self::canonical`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Checks the invariants `task` relies on, reporting the offending field.
    pub fn validate(&self, task: Task) -> Result<()> {
        if let Some(t) = self.task {
            if t != task {
                return Err(CliError::config("task", format!("file declares `{t}` but `{task}` was requested")));
            }
        }
        let input = &self.input;
        let sources = [input.dataset.is_some(), input.network.is_some(), input.random_network.is_some()]
            .iter()
            .filter(|&&b| b)
            .count();
        if sources != 1 {
            return Err(CliError::config(
                "input",
                "exactly one of `dataset`, `network` and `random_network` is required",
            ));
        }
        if task == Task::Sample && input.dataset.is_some() {
            return Err(CliError::config("input.dataset", "sampling needs a network"));
        }
        for (field, path) in [("input.dataset", &input.dataset), ("input.network", &input.network)] {
            if let Some(p) = path {
                if !self.resolve(p).is_file() {
                    return Err(CliError::config(field, format!("file {} does not exist", p.display())));
                }
            }
        }
        if input.dataset.is_none() {
            match input.rows {
                None => return Err(CliError::config("input.rows", "required when sampling from a network")),
                Some(0) => return Err(CliError::config("input.rows", "must be at least 1")),
                _ => {}
            }
        } else if input.rows.is_some() || input.sample_seed.is_some() {
            return Err(CliError::config("input.rows", "only meaningful when sampling from a network"));
        }
        if let Some(r) = &input.random_network {
            if r.nodes == 0 {
                return Err(CliError::config("input.random_network.nodes", "must be at least 1"));
            }
        }
        if let Some(cols) = &input.columns {
            if cols.is_empty() {
                return Err(CliError::config("input.columns", "must not be empty"));
            }
        }
        if self.score.kind == ScoreName::Bdeu && !(self.score.ess > 0.0) {
            return Err(CliError::config("score.ess", "must be positive"));
        }
        let h = &self.hamiltonian;
        for (field, v) in [
            ("hamiltonian.delta_trans", h.delta_trans),
            ("hamiltonian.delta_consist", h.delta_consist),
            ("hamiltonian.delta_max", h.delta_max),
        ] {
            if let Some(d) = v {
                if !(d.is_finite() && d > 0.0) {
                    return Err(CliError::config(field, "must be finite and positive"));
                }
            }
        }
        let q = &self.qaoa;
        if q.layers.is_empty() {
            return Err(CliError::config("qaoa.layers", "grid must not be empty"));
        }
        if q.layers.contains(&0) {
            return Err(CliError::config("qaoa.layers", "layer counts must be at least 1"));
        }
        if q.alpha.is_empty() {
            return Err(CliError::config("qaoa.alpha", "grid must not be empty"));
        }
        if q.alpha.iter().any(|&a| !(a > 0.0 && a <= 1.0)) {
            return Err(CliError::config("qaoa.alpha", "values must lie in (0, 1]"));
        }
        if q.shots == 0 {
            return Err(CliError::config("qaoa.shots", "must be at least 1"));
        }
        if q.restarts == 0 {
            return Err(CliError::config("qaoa.restarts", "must be at least 1"));
        }
        if !(q.rhobeg > 0.0 && q.rhoend > 0.0 && q.rhoend <= q.rhobeg) {
            return Err(CliError::config("qaoa.rhoend", "need 0 < rhoend <= rhobeg"));
        }
        if q.maxfun == 0 {
            return Err(CliError::config("qaoa.maxfun", "must be at least 1"));
        }
        let n = &self.noise;
        if n.omegas.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return Err(CliError::config("noise.omegas", "strengths must lie in [0, 1]"));
        }
        if n.kinds.is_empty() != n.omegas.is_empty() {
            return Err(CliError::config("noise", "`kinds` and `omegas` must both be set or both be empty"));
        }
        let single_cell = matches!(task, Task::Learn);
        if single_cell && (q.layers.len() != 1 || q.alpha.len() != 1) {
            return Err(CliError::config("qaoa", "`learn` takes a single layer count and alpha"));
        }
        match task {
            Task::SweepNoise => {
                if n.kinds.is_empty() {
                    return Err(CliError::config("noise.kinds", "grid must not be empty"));
                }
                if q.layers.len() != 1 || q.alpha.len() != 1 {
                    return Err(CliError::config("qaoa", "`sweep-noise` takes a single layer count and alpha"));
                }
            }
            _ => {
                if n.kinds.len() > 1 || n.omegas.len() > 1 {
                    return Err(CliError::config("noise", "only `sweep-noise` accepts more than one channel or strength"));
                }
            }
        }
        let b = &self.baselines;
        if task == Task::Compare && b.algorithms.is_empty() {
            return Err(CliError::config("baselines.algorithms", "must not be empty"));
        }
        if b.sa_restarts == 0 {
            return Err(CliError::config("baselines.sa_restarts", "must be at least 1"));
        }
        if b.sa_steps == 0 {
            return Err(CliError::config("baselines.sa_steps", "must be at least 1"));
        }
        if b.max_stall == 0 {
            return Err(CliError::config("baselines.max_stall", "must be at least 1"));
        }
        Ok(())
    }
}

/// Dotted `section.key` path of the entry spanning byte `offset`.
fn locate(text: &str, offset: usize) -> String {
    let mut section = String::new();
    let mut key = String::new();
    let mut pos = 0;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim();
        if trimmed.starts_with('[') {
            section = trimmed.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            key.clear();
        } else if let Some((k, _)) = trimmed.split_once('=') {
            key = k.trim().to_string();
        }
        pos += line.len();
        if pos > offset {
            break;
        }
    }
    match (section.is_empty(), key.is_empty()) {
        (true, true) => "<root>".to_string(),
        (true, false) => key,
        (false, true) => section,
        (false, false) => format!("{section}.{key}"),
    }
}

mod defaults {
    use super::{Algorithm, ScoreName};

    pub fn score() -> ScoreName {
        ScoreName::Bic
    }
    pub fn ess() -> f64 {
        qbnsl::bn::DEFAULT_BDEU_ESS
    }
    pub fn max_parents() -> usize {
        2
    }
    pub fn yes() -> bool {
        true
    }
    pub fn layers() -> Vec<usize> {
        vec![3]
    }
    pub fn alpha() -> Vec<f64> {
        vec![0.3]
    }
    pub fn shots() -> u64 {
        1024
    }
    pub fn restarts() -> usize {
        10
    }
    pub fn rhobeg() -> f64 {
        0.5
    }
    pub fn rhoend() -> f64 {
        1e-3
    }
    pub fn maxfun() -> usize {
        500
    }
    pub fn algorithms() -> Vec<Algorithm> {
        vec![
            Algorithm::Exhaustive,
            Algorithm::HillClimbing,
            Algorithm::Tabu,
            Algorithm::Sa,
            Algorithm::Qaoa,
        ]
    }
    pub fn tenure() -> usize {
        qbnsl::baselines::DEFAULT_TENURE
    }
    pub fn max_stall() -> usize {
        qbnsl::baselines::DEFAULT_MAX_STALL
    }
    pub fn sa_steps() -> usize {
        20_000
    }
}
