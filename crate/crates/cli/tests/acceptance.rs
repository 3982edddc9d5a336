//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if a criterion fails that is not listed in
//! `KNOWN_SHORTFALLS`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use qbnsl::baselines::hill_climb;
use qbnsl::bn::{
    build_score_table, count_dags, exhaustive_best_dag, markov_equivalent, random_network, shd, DiscreteDataset,
    ScoreKind,
};
use qbnsl::qaoa::cvar;
use qbnsl::qubo::{build_hamiltonian, build_hamiltonian_parts, default_penalty, QubitLayout};
use qbnsl::seed;
use qbnsl::sim::{Complex64 as C, GateOp, NoiseChannel, NoiseKind, QubitCeiling, ShotHistogram, StateVector};
use qbnsl::Bitstring;
use qbnsl_cli::experiment::{compile, load_input, TUNED_QAOA_LABEL};
use qbnsl_cli::output::{replay, write_outputs, RESULTS_FILE};
use qbnsl_cli::{run_experiment, Algorithm, CliError, ExperimentConfig, Manifest, ResultTable, RunOptions, Task};
use rand::Rng;

/// Criteria expected to fail at desk scale; see the project notes.
const KNOWN_SHORTFALLS: &[usize] = &[11];

struct Verdict {
    id: usize,
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn run(id: usize, name: &'static str, budget: Duration, f: impl FnOnce() -> (bool, String)) -> Verdict {
    let start = Instant::now();
    let (ok, detail) = f();
    let elapsed = start.elapsed();
    let in_budget = elapsed <= budget;
    let detail = if in_budget {
        detail
    } else {
        format!("{detail}; over the {budget:?} budget")
    };
    let v = Verdict {
        id,
        name,
        pass: ok && in_budget,
        detail,
        elapsed,
    };
    println!(
        "{} criterion {:>2} {} ({:.1?}): {}",
        if v.pass { "PASS" } else { "FAIL" },
        v.id,
        v.name,
        v.elapsed,
        v.detail
    );
    v
}

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

fn repo_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn config(text: &str) -> ExperimentConfig {
    ExperimentConfig::from_toml_str(text).expect("acceptance config parses")
}

// ---------------------------------------------------------------- oracles

/// Acyclicity by repeatedly removing sinks of a dense adjacency matrix.
fn acyclic(adj: &[Vec<bool>]) -> bool {
    let n = adj.len();
    let mut alive = vec![true; n];
    for _ in 0..n {
        let sink = (0..n).find(|&i| alive[i] && (0..n).all(|j| !alive[j] || !adj[i][j]));
        match sink {
            Some(i) => alive[i] = false,
            None => return false,
        }
    }
    true
}

fn adjacency_from_mask(n: usize, mask: u64) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    let mut k = 0;
    for (i, row) in adj.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            if i != j {
                *cell = mask >> k & 1 == 1;
                k += 1;
            }
        }
    }
    adj
}

fn brute_force_dag_count(n: usize) -> u64 {
    let arcs = n * (n - 1);
    (0..1u64 << arcs).filter(|&m| acyclic(&adjacency_from_mask(n, m))).count() as u64
}

fn a_index(n: usize, i: usize, j: usize) -> usize {
    i * (n - 1) + if j < i { j } else { j - 1 }
}

fn r_index(n: usize, i: usize, j: usize) -> usize {
    n * (n - 1) + i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// BIC from raw counts, with all parent configurations counted.
fn bic(data: &DiscreteDataset, node: usize, parents: &[usize]) -> f64 {
    let rows = data.num_rows();
    let mut joint: HashMap<(Vec<usize>, usize), f64> = HashMap::new();
    let mut marg: HashMap<Vec<usize>, f64> = HashMap::new();
    for r in 0..rows {
        let cfg: Vec<usize> = parents.iter().map(|&p| data.value(r, p)).collect();
        *joint.entry((cfg.clone(), data.value(r, node))).or_default() += 1.0;
        *marg.entry(cfg).or_default() += 1.0;
    }
    let ll: f64 = joint.iter().map(|((cfg, _), &nk)| nk * (nk / marg[cfg]).ln()).sum();
    let q: usize = parents.iter().map(|&p| data.cardinality(p)).product();
    let free = q * (data.cardinality(node) - 1);
    ll - 0.5 * (rows as f64).ln() * free as f64
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

fn random_state(q: usize, rng: &mut impl Rng) -> StateVector {
    let amps: Vec<C> = (0..1 << q)
        .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let mut s = StateVector::from_amplitudes(amps).unwrap();
    s.normalize();
    s
}

fn max_amp_diff(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

type M2 = [[C; 2]; 2];

fn reference_kraus(kind: NoiseKind, w: f64) -> Vec<M2> {
    let z = c(0.0);
    match kind {
        NoiseKind::AmplitudeDamping => vec![
            [[c(1.0), z], [z, c((1.0 - w).sqrt())]],
            [[z, c(w.sqrt())], [z, z]],
        ],
        NoiseKind::PhaseDamping => vec![
            [[c(1.0), z], [z, c((1.0 - w).sqrt())]],
            [[z, z], [z, c(w.sqrt())]],
        ],
        NoiseKind::Depolarizing => {
            let s = (w / 3.0).sqrt();
            vec![
                [[c((1.0 - w).sqrt()), z], [z, c((1.0 - w).sqrt())]],
                [[z, c(s)], [c(s), z]],
                [[z, C::new(0.0, -s)], [C::new(0.0, s), z]],
                [[c(s), z], [z, c(-s)]],
            ]
        }
    }
}

fn channel_map(ops: &[M2], rho: M2) -> M2 {
    let mut out = [[c(0.0); 2]; 2];
    for k in ops {
        for i in 0..2 {
            for j in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        out[i][j] += k[i][a] * rho[a][b] * k[j][b].conj();
                    }
                }
            }
        }
    }
    out
}

fn within_three_sigma(xs: &[f64], expected: f64) -> bool {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m - expected).abs() <= 3.0 * (var / n).sqrt() + 1e-12
}

// ---------------------------------------------------------------- criteria

fn dag_counts() -> (bool, String) {
    let want = [1u64, 3, 25, 543, 29281];
    let mut ok = true;
    let mut got = Vec::new();
    for (k, &w) in want.iter().enumerate() {
        let n = k + 1;
        let v: u64 = count_dags(n).unwrap().try_into().unwrap();
        ok &= v == w;
        if n <= 4 {
            ok &= brute_force_dag_count(n) == v;
        }
        got.push(v.to_string());
    }
    (ok, format!("counts {} (n <= 4 cross-checked by enumeration)", got.join(", ")))
}

fn qubit_budget() -> (bool, String) {
    let mut ok = true;
    let mut got = Vec::new();
    for (n, want) in [(3, 9), (4, 18), (5, 30)] {
        let v = QubitLayout::new(n).unwrap().num_qubits();
        ok &= v == want && v == n * (n - 1) + n * (n - 1) / 2;
        got.push(format!("n={n}: {v}"));
    }
    (ok, got.join(", "))
}

fn score_fidelity() -> (bool, String) {
    let n = 4;
    let data = random_network(n, 2, 3).unwrap().forward_sample(1000, 4).unwrap();
    let table = build_score_table(&data, ScoreKind::Bic, 2).unwrap();
    let delta = default_penalty(&table);
    let poly = build_hamiltonian(&table, delta, delta).unwrap();
    let orders = permutations(n);
    let (mut dags, mut pairs, mut worst) = (0, 0, 0.0f64);
    for mask in 0..1u64 << (n * (n - 1)) {
        let adj = adjacency_from_mask(n, mask);
        if !acyclic(&adj) || (0..n).any(|j| (0..n).filter(|&i| adj[i][j]).count() > 2) {
            continue;
        }
        dags += 1;
        let want: f64 = -(0..n)
            .map(|j| bic(&data, j, &(0..n).filter(|&i| adj[i][j]).collect::<Vec<_>>()))
            .sum::<f64>();
        for order in &orders {
            let pos = |v: usize| order.iter().position(|&x| x == v).unwrap();
            if (0..n).any(|i| (0..n).any(|j| adj[i][j] && pos(i) > pos(j))) {
                continue;
            }
            let mut bits = vec![false; 3 * n * (n - 1) / 2];
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        bits[a_index(n, i, j)] = adj[i][j];
                    }
                    if i < j {
                        bits[r_index(n, i, j)] = pos(i) < pos(j);
                    }
                }
            }
            let got = poly.evaluate(Bitstring::from_bools(&bits).unwrap()).unwrap();
            worst = worst.max((got - want).abs());
            pairs += 1;
        }
    }
    (
        dags == 443 && worst <= 1e-9,
        format!("{dags} in-degree<=2 DAGs, {pairs} (DAG, order) pairs, max |H - (-score)| = {worst:.2e}"),
    )
}

fn encoding_soundness() -> (bool, String) {
    let n = 3;
    let data = random_network(n, 2, 5).unwrap().forward_sample(300, 6).unwrap();
    let table = build_score_table(&data, ScoreKind::Bic, 2).unwrap();
    let delta = default_penalty(&table);
    let penalty = build_hamiltonian_parts(&table, delta, delta).unwrap().penalty();
    let (mut false_accept, mut false_reject, mut feasible) = (0, 0, 0);
    for x in 0..1u64 << 9 {
        let bits = Bitstring::new(9, x).unwrap();
        let before = |i: usize, j: usize| {
            if i < j {
                bits.get(r_index(n, i, j))
            } else {
                !bits.get(r_index(n, j, i))
            }
        };
        let transitive = (0..n).all(|i| {
            (0..n).all(|j| (0..n).all(|k| i == j || j == k || i == k || !(before(i, j) && before(j, k)) || before(i, k)))
        });
        let mut adj = vec![vec![false; n]; n];
        let mut consistent = true;
        for i in 0..n {
            for j in 0..n {
                if i != j && bits.get(a_index(n, i, j)) {
                    adj[i][j] = true;
                    consistent &= before(i, j);
                }
            }
        }
        let expect_zero = transitive && consistent && acyclic(&adj);
        let zero = penalty.evaluate(bits).unwrap().abs() < 1e-9 * delta;
        feasible += zero as usize;
        false_accept += (zero && !expect_zero) as usize;
        false_reject += (!zero && expect_zero) as usize;
    }
    (
        false_accept == 0 && false_reject == 0,
        format!("{feasible} zero-penalty states of 512, {false_accept} false accepts, {false_reject} false rejects"),
    )
}

fn oracle_agreement() -> (bool, String) {
    let (mut agree, mut exact, mut value_match) = (0, 0, 0);
    for s in 0..20u64 {
        let data = random_network(3, 2, 100 + s)
            .unwrap()
            .forward_sample(500, seed::derive(s, seed::stream::SAMPLE, 0))
            .unwrap();
        let table = build_score_table(&data, ScoreKind::Bic, 2).unwrap();
        let delta = default_penalty(&table);
        let poly = build_hamiltonian(&table, delta, delta).unwrap();
        let (bits, value) = poly.brute_force_minimum().unwrap();
        let (best, score) = exhaustive_best_dag(&table).unwrap();
        let layout = QubitLayout::new(3).unwrap();
        let Ok(dag) = layout.decode(bits).and_then(|d| d.to_dag()) else {
            continue;
        };
        let same_value = (value + score).abs() <= 1e-9 * (1.0 + score.abs());
        value_match += same_value as usize;
        exact += (dag == best) as usize;
        agree += (same_value && (dag == best || markov_equivalent(&dag, &best))) as usize;
    }
    (
        agree == 20,
        format!(
            "{agree}/20 agree up to Markov equivalence ({exact}/20 identical graphs, {value_match}/20 equal optimal values)"
        ),
    )
}

fn cvar_identity() -> (bool, String) {
    let mut rng = seed::rng(606);
    let alphas: Vec<f64> = (1..=20).map(|k| k as f64 / 20.0).collect();
    let (mut worst, mut monotone) = (0.0f64, 0);
    for _ in 0..1000 {
        let q = rng.gen_range(1..=8);
        let costs: Vec<f64> = (0..1 << q).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let mut hist = ShotHistogram::new(q);
        for _ in 0..rng.gen_range(1..40) {
            let x = rng.gen_range(0..1u64 << q);
            hist.record(Bitstring::new(q, x).unwrap(), rng.gen_range(1..50)).unwrap();
        }
        let f = |b: Bitstring| costs[b.index() as usize];
        let total = hist.total() as f64;
        let mean: f64 = hist.iter().map(|(b, k)| k as f64 * f(b)).sum::<f64>() / total;
        worst = worst.max((cvar(&hist, f, 1.0).unwrap() - mean).abs());
        let vals: Vec<f64> = alphas.iter().map(|&a| cvar(&hist, f, a).unwrap()).collect();
        monotone += vals.windows(2).all(|w| w[0] <= w[1] + 1e-12) as usize;
    }
    (
        worst <= 1e-12 && monotone == 1000,
        format!("max |CVaR_1 - mean| = {worst:.2e}, monotone in alpha on {monotone}/1000"),
    )
}

fn gate_algebra() -> (bool, String) {
    let mut rng = seed::rng(707);
    let mut worst_fid = 1.0f64;
    let mut worst_inv = 0.0f64;
    for _ in 0..100 {
        let start = random_state(3, &mut rng);
        let theta = rng.gen_range(-2.0 * PI..2.0 * PI);
        let (a, b) = [(0, 1), (1, 0), (0, 2), (2, 1)][rng.gen_range(0..4)];
        let mut direct = start.clone();
        direct.apply(&GateOp::ZZRot(theta, a, b)).unwrap();
        let mut via = start.clone();
        for g in GateOp::zz_decomposition(theta, a, b) {
            via.apply(&g).unwrap();
        }
        worst_fid = worst_fid.min(direct.fidelity(&via));

        let t = rng.gen_range(-10.0..10.0);
        let gates = [
            GateOp::Hadamard(a),
            GateOp::RotX(t, a),
            GateOp::RotZ(t, b),
            GateOp::CNot { control: a, target: b },
            GateOp::ZZRot(t, a, b),
        ];
        for g in gates {
            let mut s = start.clone();
            s.apply(&g).unwrap();
            s.apply(&g.inverse()).unwrap();
            worst_inv = worst_inv.max(max_amp_diff(&s, &start));
        }
        for g in [GateOp::Hadamard(b), GateOp::CNot { control: b, target: a }] {
            let mut s = start.clone();
            s.apply(&g).unwrap();
            s.apply(&g).unwrap();
            worst_inv = worst_inv.max(max_amp_diff(&s, &start));
        }
    }
    (
        worst_fid >= 1.0 - 1e-12 && worst_inv <= 1e-9,
        format!("min ZZ fidelity 1 - {:.1e}, max inverse residual {worst_inv:.1e}", 1.0 - worst_fid),
    )
}

fn noise_statistics() -> (bool, String) {
    let mut prep = StateVector::zero(1, QubitCeiling::default()).unwrap();
    for g in [GateOp::Hadamard(0), GateOp::RotZ(1.1, 0), GateOp::RotX(0.5, 0)] {
        prep.apply(&g).unwrap();
    }
    let (a0, a1) = (prep.amplitudes()[0], prep.amplitudes()[1]);
    let rho = [[a0 * a0.conj(), a0 * a1.conj()], [a1 * a0.conj(), a1 * a1.conj()]];
    let (mut matched, mut complete, mut cases) = (0, 0, 0);
    for kind in NoiseKind::ALL {
        for w in [0.1, 0.5, 0.9] {
            cases += 1;
            let ch = NoiseChannel::new(kind, w).unwrap();
            complete += (ch.completeness_error() <= 1e-12) as usize;
            let want = channel_map(&reference_kraus(kind, w), rho);
            let mut rng = seed::rng(seed::derive(808, kind as u64, (w * 10.0) as u64));
            let (mut p0, mut re, mut im) = (Vec::new(), Vec::new(), Vec::new());
            for _ in 0..10_000 {
                let mut s = prep.clone();
                ch.apply(&mut s, 0, &mut rng);
                let (b0, b1) = (s.amplitudes()[0], s.amplitudes()[1]);
                p0.push(b0.norm_sqr());
                let coh = b0 * b1.conj();
                re.push(coh.re);
                im.push(coh.im);
            }
            matched += (within_three_sigma(&p0, want[0][0].re)
                && within_three_sigma(&re, want[0][1].re)
                && within_three_sigma(&im, want[0][1].im)) as usize;
        }
    }
    (
        matched == cases && complete == cases,
        format!("{matched}/{cases} channel cases within 3 sigma at 1e4 trajectories, {complete}/{cases} complete to 1e-12"),
    )
}

const INSTANCE: &str = r#"
[input]
random_network = { nodes = 3, max_parents = 2, seed = 26 }
rows = 500
sample_seed = 27
"#;

fn entropy_config() -> ExperimentConfig {
    config(&format!(
        "id = \"entropy\"\nseed = 9\n{INSTANCE}\n[qaoa]\nlayers = [2, 8]\nalpha = [1.0]\nshots = 1024\nrestarts = 10\n"
    ))
}

fn recovery_config() -> ExperimentConfig {
    config(&format!(
        "id = \"recovery\"\nseed = 10\n{INSTANCE}\n[qaoa]\nlayers = [6]\nalpha = [0.3]\nshots = 1024\nrestarts = 20\n"
    ))
}

fn noise_config(omegas: &str, shots: u64, restarts: usize) -> ExperimentConfig {
    config(&format!(
        "id = \"noise\"\nseed = 11\n{INSTANCE}\n[qaoa]\nlayers = [3]\nalpha = [0.3]\nshots = {shots}\nrestarts = {restarts}\n\
         [noise]\nkinds = [\"phase-damping\", \"depolarizing\"]\nomegas = [{omegas}]\n"
    ))
}

/// The shipped compare config, optionally narrowed for quick reruns.
fn cancer_config(narrow: bool) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::from_path(repo_path("configs/compare_cancer.toml")).unwrap();
    if narrow {
        cfg.qaoa.alpha.truncate(1);
        cfg.qaoa.restarts = 2;
    }
    cfg
}

fn table_of(cfg: &ExperimentConfig, task: Task) -> ResultTable {
    run_experiment(cfg, task, &RunOptions::default()).unwrap().table
}

fn entropy_trend() -> (bool, String) {
    let t = table_of(&entropy_config(), Task::SweepPa);
    let h = |p| t.rows.iter().find(|r| r.p == Some(p)).unwrap().mean_entropy.unwrap();
    let (h2, h8) = (h(2), h(8));
    (h8 < h2, format!("mean entropy {h2:.3} bits at p=2, {h8:.3} bits at p=8 (alpha=1, 10 restarts)"))
}

fn qaoa_recovery() -> (bool, String) {
    let t = table_of(&recovery_config(), Task::Learn);
    let r = &t.rows[0];
    let hits = r.optimum_hits.unwrap();
    (
        hits >= 1,
        format!("{hits}/20 restarts reach the exhaustive optimum cost {:.4}", r.optimum_cost.unwrap()),
    )
}

fn noise_trend() -> (bool, String) {
    let cfg = noise_config("1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0", 64, 20);
    let (input, _) = load_input(&cfg).unwrap();
    let range = compile(&cfg, &input.data).unwrap().table.score_range();
    let t = table_of(&cfg, Task::SweepNoise);
    let mut ok = true;
    let mut parts = Vec::new();
    for kind in ["phase-damping", "depolarizing"] {
        let rows: Vec<_> = t.rows.iter().filter(|r| r.noise.as_deref() == Some(kind)).collect();
        let at = |w: f64| rows.iter().find(|r| r.omega == Some(w)).unwrap();
        let (lo, hi) = (at(1e-5), at(1.0));
        let worse = hi.mean_best_cost > lo.mean_best_cost;
        let flat: Vec<f64> = rows
            .iter()
            .filter(|r| r.omega.unwrap() <= 1e-2)
            .map(|r| r.mean_best_cost)
            .collect();
        let spread = flat.iter().cloned().fold(f64::MIN, f64::max) - flat.iter().cloned().fold(f64::MAX, f64::min);
        ok &= worse && spread < range;
        parts.push(format!(
            "{kind}: best cost {:.3} at 1e-5 vs {:.3} at 1 ({}), spread {spread:.3} < range {range:.1} over omega <= 1e-2 ({}); CVaR objective {:.1} -> {:.1}",
            lo.mean_best_cost,
            hi.mean_best_cost,
            if worse { "worse" } else { "not worse" },
            if spread < range { "flat" } else { "not flat" },
            lo.mean_objective.unwrap(),
            hi.mean_objective.unwrap()
        ));
    }
    (ok, parts.join("; "))
}

fn cancer_recovery() -> (bool, String) {
    let cfg = cancer_config(false);
    let t = table_of(&cfg, Task::Compare);
    let row_shd = |alg: &str| t.find(alg).next().and_then(|r| r.shd);
    let (ex, hc, tabu, sa, qaoa) = (
        row_shd(Algorithm::Exhaustive.label()),
        row_shd(Algorithm::HillClimbing.label()),
        row_shd(Algorithm::Tabu.label()),
        row_shd(Algorithm::Sa.label()),
        row_shd(TUNED_QAOA_LABEL),
    );
    let tuned = t.find(TUNED_QAOA_LABEL).next().unwrap();
    let (input, _) = load_input(&cfg).unwrap();
    let table = compile(&cfg, &input.data).unwrap().table;
    let truth = input.truth.unwrap();
    let hc_rate = (0..100)
        .filter(|&s| shd(&hill_climb(&table, 2, s).unwrap().dag, &truth).unwrap() == 0)
        .count();
    (
        ex == Some(0) && hc == Some(0) && qaoa.is_some_and(|d| d <= 1),
        format!(
            "SHD exhaustive {ex:?}, HC {hc:?}, tabu {tabu:?}, SA {sa:?}, QAOA {qaoa:?} (p={}, alpha={}); \
             HC reaches SHD 0 for {hc_rate}/100 tie-break seeds",
            tuned.p.unwrap(),
            tuned.alpha.unwrap()
        ),
    )
}

fn determinism() -> (bool, String) {
    let runs: Vec<(ExperimentConfig, Task)> = vec![
        (entropy_config(), Task::SweepPa),
        (recovery_config(), Task::Learn),
        (noise_config("1e-3, 1.0", 16, 3), Task::SweepNoise),
        (cancer_config(true), Task::Compare),
    ];
    let dir = tempfile::tempdir().unwrap();
    let opts = RunOptions::default();
    let mut identical = 0;
    for (k, (cfg, task)) in runs.iter().enumerate() {
        let mut files = Vec::new();
        for rep in 0..2 {
            let out = run_experiment(cfg, *task, &opts).unwrap();
            let path = dir.path().join(format!("{k}-{rep}"));
            write_outputs(&path, &out, &Manifest::new(cfg, &out, &opts, 0.0)).unwrap();
            files.push(std::fs::read(path.join(RESULTS_FILE)).unwrap());
        }
        identical += (files[0] == files[1]) as usize;
    }
    let recorded = dir.path().join("1-0").join(RESULTS_FILE);
    let (cfg, task) = &runs[1];
    let replay_ok = replay(cfg, *task, &opts, &recorded).is_ok();
    let mut other = cfg.clone();
    other.seed += 1;
    let mismatch_caught = matches!(replay(&other, *task, &opts, &recorded), Err(CliError::Replay(_)));
    (
        identical == runs.len() && replay_ok && mismatch_caught,
        format!(
            "{identical}/{} result tables byte-identical on rerun, replay {}, config mismatch {}",
            runs.len(),
            if replay_ok { "reproduced" } else { "failed" },
            if mismatch_caught { "detected" } else { "missed" }
        ),
    )
}

fn main() {
    let secs = Duration::from_secs;
    let verdicts = vec![
        run(1, "DAG-count exactness", secs(1), dag_counts),
        run(2, "qubit-budget arithmetic", secs(1), qubit_budget),
        run(3, "Hamiltonian score fidelity", secs(30), score_fidelity),
        run(4, "encoding soundness", secs(1), encoding_soundness),
        run(5, "oracle agreement", secs(60), oracle_agreement),
        run(6, "CVaR identity", secs(60), cvar_identity),
        run(7, "gate algebra", secs(60), gate_algebra),
        run(8, "noise-channel statistics", secs(60), noise_statistics),
        run(9, "uncertainty-reduction trend", secs(600), entropy_trend),
        run(10, "QAOA recovery", secs(900), qaoa_recovery),
        run(11, "noise-resilience trend", secs(3600), noise_trend),
        run(12, "cancer-style recovery", secs(1800), cancer_recovery),
        run(13, "determinism", secs(1800), determinism),
    ];
    let passed = verdicts.iter().filter(|v| v.pass).count();
    println!("{passed}/{} criteria passed", verdicts.len());
    let unexpected: Vec<usize> = verdicts
        .iter()
        .filter(|v| !v.pass && !KNOWN_SHORTFALLS.contains(&v.id))
        .map(|v| v.id)
        .collect();
    for v in verdicts.iter().filter(|v| !v.pass && KNOWN_SHORTFALLS.contains(&v.id)) {
        println!("criterion {} failed as documented", v.id);
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
