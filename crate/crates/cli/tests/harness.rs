use std::path::Path;
use std::process::Command;

use proptest::prelude::*;
use qbnsl::qaoa::{optimize, AnsatzTemplate, CobylaConfig, ObjectiveConfig, PenalizedCost, QaoaResult};
use qbnsl::sim::{NoiseModel, QubitCeiling, ShotHistogram};
use qbnsl::Bitstring;
use qbnsl_cli::experiment::{compile, load_input, Compiled};
use qbnsl_cli::histogram::{histogram_rows, write_histogram};
use qbnsl_cli::{emit_histogram, read_histogram, read_histogram_path, run_experiment, ExperimentConfig, RunOptions, Task};

const TINY: &str = r#"
seed = 3
[input]
random_network = { nodes = 3, max_parents = 2, seed = 4 }
rows = 300
[qaoa]
layers = [1]
alpha = [0.5]
shots = 64
restarts = 2
maxfun = 40
[baselines]
algorithms = ["exhaustive", "brute-force", "hill-climbing", "tabu", "sa", "qaoa"]
sa_steps = 2000
sa_restarts = 3
"#;

fn tiny() -> ExperimentConfig {
    ExperimentConfig::from_toml_str(TINY).unwrap()
}

fn tiny_compiled() -> Compiled {
    let cfg = tiny();
    let (input, _) = load_input(&cfg).unwrap();
    compile(&cfg, &input.data).unwrap()
}

fn tiny_result() -> (QaoaResult, PenalizedCost) {
    let c = tiny_compiled();
    let template = AnsatzTemplate::new(c.ising.clone(), 1, QubitCeiling::default()).unwrap();
    let obj = ObjectiveConfig {
        alpha: 0.5,
        shots: 64,
        max_indegree: 2,
        delta_max: c.delta_max,
    };
    let opt = CobylaConfig {
        maxfun: 30,
        ..CobylaConfig::default()
    };
    let r = optimize(&template, &obj, &c.cost, &NoiseModel::noiseless(), &opt, 1).unwrap();
    (r, c.cost)
}

fn qbnsl(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qbnsl")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn emitted_histogram_reads_back_exactly() {
    let (result, cost) = tiny_result();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.csv");
    emit_histogram(&result, &cost, &path).unwrap();
    let back = read_histogram_path(&path).unwrap();
    assert_eq!(back, result.final_histogram);
    assert_eq!(back.total(), 64);
    let rows = histogram_rows(&result.final_histogram, &cost).unwrap();
    assert!(rows.windows(2).all(|w| w[0].count >= w[1].count));
    assert_eq!(rows.iter().map(|r| r.count).sum::<u64>(), 64);
}

#[test]
fn point_mass_histogram_is_one_row() {
    let cost = tiny_compiled().cost;
    let bits = Bitstring::new(9, 0b1_0000_0011).unwrap();
    let hist = ShotHistogram::from_counts(9, [(bits, 128)]).unwrap();
    let mut buf = Vec::new();
    write_histogram(&hist, &cost, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().contains(",128,"));
    assert_eq!(read_histogram(text.as_bytes()).unwrap(), hist);
}

#[test]
fn unwritable_histogram_path_is_an_io_error() {
    let (result, cost) = tiny_result();
    let err = emit_histogram(&result, &cost, "/nonexistent-dir/h.csv").unwrap_err();
    assert_eq!(err.exit_code(), 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn histogram_round_trip(counts in proptest::collection::btree_map(0u64..512, 1u64..1000, 1..40)) {
        let cost = tiny_compiled().cost;
        let hist = ShotHistogram::from_counts(9, counts.iter().map(|(&x, &k)| (Bitstring::new(9, x).unwrap(), k))).unwrap();
        let mut buf = Vec::new();
        write_histogram(&hist, &cost, &mut buf).unwrap();
        prop_assert_eq!(read_histogram(buf.as_slice()).unwrap(), hist);
    }
}

#[test]
fn compare_reports_every_algorithm() {
    let out = run_experiment(&tiny(), Task::Compare, &RunOptions::default()).unwrap();
    let algs: Vec<&str> = out.table.rows.iter().map(|r| r.algorithm.as_str()).collect();
    assert_eq!(
        algs,
        [
            "Exhaustive",
            "QUBO brute force",
            "HC",
            "Tabu",
            "SA (classical substitute)",
            "QAOA",
            "QAOA (tuned)"
        ]
    );
    let opt = out.table.rows[0].min_best_cost;
    for r in &out.table.rows {
        assert!(r.min_best_cost >= opt - 1e-9 * (1.0 + opt.abs()), "{} below the optimum", r.algorithm);
        assert_eq!(r.config_hash, out.config_hash);
    }
    assert_eq!(out.table.rows[1].optimum_hits, Some(1));
}

#[test]
fn sweep_tables_have_one_row_per_cell() {
    let mut cfg = tiny();
    cfg.qaoa.layers = vec![1, 2];
    cfg.qaoa.alpha = vec![0.2, 1.0];
    let out = run_experiment(&cfg, Task::SweepPa, &RunOptions::default()).unwrap();
    assert_eq!(out.table.rows.len(), 4);
    assert_eq!(out.artifacts.len(), 4);
    let mut cfg = tiny();
    cfg.noise.kinds = vec![qbnsl::sim::NoiseKind::AmplitudeDamping, qbnsl::sim::NoiseKind::Depolarizing];
    cfg.noise.omegas = vec![0.0, 0.5];
    cfg.qaoa.shots = 8;
    cfg.qaoa.maxfun = 10;
    let out = run_experiment(&cfg, Task::SweepNoise, &RunOptions::default()).unwrap();
    let cells: Vec<(Option<String>, Option<f64>)> = out.table.rows.iter().map(|r| (r.noise.clone(), r.omega)).collect();
    assert_eq!(
        cells,
        [
            (Some("amplitude-damping".into()), Some(0.0)),
            (Some("amplitude-damping".into()), Some(0.5)),
            (Some("depolarizing".into()), Some(0.0)),
            (Some("depolarizing".into()), Some(0.5)),
        ]
    );
}

#[test]
fn sampled_dataset_feeds_a_score_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let sample = write(
        d,
        "sample.toml",
        "seed = 5\n[input]\nrandom_network = { nodes = 3, seed = 8 }\nrows = 200\n",
    );
    let out = qbnsl(&["sample", "--config", &sample, "--out", d.join("s").to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(d.join("s/manifest.json").is_file());
    let score = write(d, "score.toml", "[input]\ndataset = \"s/dataset.csv\"\n");
    let out = qbnsl(&["score", "--config", &score, "--out", d.join("sc").to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let scores = std::fs::read_to_string(d.join("sc/local_scores.csv")).unwrap();
    assert_eq!(scores.lines().count(), 1 + 3 * 4);
    let results = std::fs::read_to_string(d.join("sc/results.csv")).unwrap();
    assert!(results.lines().nth(1).unwrap().contains("Exhaustive"));
}

#[test]
fn exit_codes_follow_the_failure_class() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = qbnsl(&["learn", "--config", d.join("absent.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    let bad = write(d, "bad.toml", "[qaoa]\nrestarts = \"many\"\n");
    let out = qbnsl(&["learn", "--config", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("qaoa.restarts"));

    let zero = write(
        d,
        "zero.toml",
        "[input]\nrandom_network = { nodes = 3, seed = 1 }\nrows = 50\n[qaoa]\nrestarts = 0\n",
    );
    let out = qbnsl(&["learn", "--config", &zero]);
    assert_eq!(out.status.code(), Some(2));

    let big = write(
        d,
        "big.toml",
        "[input]\nrandom_network = { nodes = 5, seed = 1 }\nrows = 50\n[qaoa]\nrestarts = 1\n",
    );
    let out = qbnsl(&["learn", "--config", &big, "--out", d.join("big").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn replay_accepts_reruns_and_rejects_other_configs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cfg = write(d, "learn.toml", TINY);
    let out_dir = d.join("run");
    let out = qbnsl(&["learn", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = out_dir.join("results.csv");
    let out = qbnsl(&["learn", "--config", &cfg, "--replay", table.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = qbnsl(&["learn", "--config", &cfg, "--seed", "99", "--replay", table.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("replay mismatch"));
}
