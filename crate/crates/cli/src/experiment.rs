//! Task pipelines: data loading, compilation, solver runs and aggregation.
//!
//! Seeds fan out from the master seed by counters. QAOA cell `c` (in grid
//! order) uses `derive(seed, CELL, c)` as its restart master; baseline `k`
//! (its position in `baselines.algorithms`) uses
//! `derive(seed, CELL, BASELINE_OFFSET + k)`. Forward sampling, unless
//! `input.sample_seed` is given, uses `derive(seed, SAMPLE, 0)`.

use qbnsl::baselines::{anneal_restarts, hill_climb, tabu_search, AnnealSchedule};
use qbnsl::bn::{
    build_score_table, exhaustive_best_dag, random_network, shd, BayesianNetwork, Dag, DiscreteDataset,
    LocalScoreTable, MAX_EXHAUSTIVE_NODES,
};
use qbnsl::qaoa::{
    optimize_restarts, solution_entropy, AnsatzTemplate, ObjectiveConfig, PenalizedCost, QaoaResult, RestartSummary,
};
use qbnsl::qubo::{build_hamiltonian, default_penalty, to_ising, IsingCoefficients, MAX_BRUTE_FORCE_VARS};
use qbnsl::seed::{self, stream};
use qbnsl::sim::{NoiseChannel, NoiseModel, QubitCeiling};
use qbnsl::{exec, Bitstring};
use serde::{Deserialize, Serialize};

use crate::config::{Algorithm, ExperimentConfig, Task};
use crate::error::{CliError, Result};
use crate::histogram::write_histogram;
use crate::table::{format_arcs, ResultRow, ResultTable};

pub const BASELINE_OFFSET: u64 = 1 << 32;

/// Label of the best QAOA cell in a `compare` table.
pub const TUNED_QAOA_LABEL: &str = "QAOA (tuned)";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Allow registers above the default qubit ceiling.
    pub override_qubit_ceiling: bool,
}

/// A named seed recorded in the manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub label: String,
    pub seed: u64,
}

/// A secondary output file, held in memory until written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    /// Path relative to the output directory.
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub task: Task,
    pub experiment_id: String,
    pub config_hash: String,
    pub table: ResultTable,
    pub artifacts: Vec<Artifact>,
    pub seeds: Vec<SeedRecord>,
}

/// Dataset plus the generating structure when it is known.
#[derive(Debug, Clone)]
pub struct Input {
    pub data: DiscreteDataset,
    pub truth: Option<Dag>,
}

pub fn load_input(cfg: &ExperimentConfig) -> Result<(Input, Vec<SeedRecord>)> {
    let input = &cfg.input;
    let mut seeds = Vec::new();
    let (data, truth) = if let Some(path) = &input.dataset {
        let path = cfg.resolve(path);
        let data = DiscreteDataset::from_csv_path(&path).map_err(|e| CliError::data(&path, e))?;
        (data, None)
    } else {
        let network = match (&input.network, &input.random_network) {
            (Some(path), _) => {
                let path = cfg.resolve(path);
                BayesianNetwork::from_path(&path).map_err(|e| CliError::data(&path, e))?
            }
            (None, Some(r)) => random_network(r.nodes, r.max_parents, r.seed)?,
            (None, None) => return Err(CliError::config("input", "no data source")),
        };
        let sample_seed = input
            .sample_seed
            .unwrap_or_else(|| seed::derive(cfg.seed, stream::SAMPLE, 0));
        seeds.push(SeedRecord {
            label: "forward-sample".into(),
            seed: sample_seed,
        });
        let rows = input.rows.ok_or_else(|| CliError::config("input.rows", "required"))?;
        (network.forward_sample(rows, sample_seed)?, Some(network.dag().clone()))
    };
    let Some(columns) = &input.columns else {
        return Ok((Input { data, truth }, seeds));
    };
    let idx = columns
        .iter()
        .map(|name| {
            data.index_of(name)
                .ok_or_else(|| CliError::config("input.columns", format!("no variable named `{name}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    let truth = truth.map(|g| g.induced(&idx)).transpose()?;
    Ok((
        Input {
            data: data.select(&idx)?,
            truth,
        },
        seeds,
    ))
}

/// The penalised cost of a scored dataset and everything derived from it.
#[derive(Debug, Clone)]
pub struct Compiled {
    pub table: LocalScoreTable,
    pub cost: PenalizedCost,
    /// Ising form handed to the ansatz (unit-normalised when configured).
    pub ising: IsingCoefficients,
    pub delta_trans: f64,
    pub delta_consist: f64,
    pub delta_max: f64,
    /// Exhaustive optimum and its cost, for up to five nodes.
    pub optimum: Option<(Dag, f64)>,
}

pub fn compile(cfg: &ExperimentConfig, data: &DiscreteDataset) -> Result<Compiled> {
    let m = cfg.score.max_parents;
    let table = build_score_table(data, cfg.score.score_kind(), m)?;
    let bound = default_penalty(&table);
    let h = &cfg.hamiltonian;
    let delta_trans = h.delta_trans.unwrap_or(bound);
    let delta_consist = h.delta_consist.unwrap_or(bound);
    let delta_max = h.delta_max.unwrap_or(bound);
    let poly = build_hamiltonian(&table, delta_trans, delta_consist)?;
    let ising = to_ising(&poly)?;
    let scale = ising.max_abs_coefficient();
    let ising = if h.normalize_angles && scale > 0.0 {
        ising.scaled(1.0 / scale)
    } else {
        ising
    };
    let cost = PenalizedCost::new(poly, m, delta_max)?;
    let optimum = if table.num_nodes() <= MAX_EXHAUSTIVE_NODES {
        let (dag, score) = exhaustive_best_dag(&table)?;
        Some((dag, -score))
    } else {
        None
    };
    Ok(Compiled {
        table,
        cost,
        ising,
        delta_trans,
        delta_consist,
        delta_max,
        optimum,
    })
}

struct Context<'a> {
    cfg: &'a ExperimentConfig,
    id: String,
    hash: String,
    truth: Option<Dag>,
    compiled: Compiled,
    ceiling: QubitCeiling,
}

impl Context<'_> {
    fn blank_row(&self, algorithm: &str) -> ResultRow {
        ResultRow {
            experiment_id: self.id.clone(),
            algorithm: algorithm.to_string(),
            optimum_cost: self.compiled.optimum.as_ref().map(|o| o.1),
            config_hash: self.hash.clone(),
            ..Default::default()
        }
    }

    fn hits(&self, costs: &[f64]) -> Option<usize> {
        let (_, opt) = self.compiled.optimum.as_ref()?;
        let tol = 1e-9 * (1.0 + opt.abs());
        Some(costs.iter().filter(|&&c| c <= opt + tol).count())
    }

    fn shd_to_truth(&self, dag: Option<&Dag>) -> Result<Option<usize>> {
        match (&self.truth, dag) {
            (Some(t), Some(g)) => Ok(Some(shd(g, t)?)),
            _ => Ok(None),
        }
    }

    fn noise_model(&self) -> Result<NoiseModel> {
        let n = &self.cfg.noise;
        match (n.kinds.first(), n.omegas.first()) {
            (Some(&k), Some(&w)) => Ok(NoiseModel::single(NoiseChannel::new(k, w)?)),
            _ => Ok(NoiseModel::noiseless()),
        }
    }

    /// Runs one QAOA grid cell and aggregates its restarts.
    fn qaoa_cell(&self, p: usize, alpha: f64, noise: &NoiseModel, cell_seed: u64) -> Result<(ResultRow, Vec<QaoaResult>)> {
        let q = &self.cfg.qaoa;
        let c = &self.compiled;
        let template = AnsatzTemplate::new(c.ising.clone(), p, self.ceiling)?;
        let obj = ObjectiveConfig {
            alpha,
            shots: q.shots,
            max_indegree: self.cfg.score.max_parents,
            delta_max: c.delta_max,
        };
        let runs = optimize_restarts(&template, &obj, &c.cost, noise, &q.cobyla(), q.restarts, cell_seed)?;
        let s = RestartSummary::from_results(&runs)?;
        let best = &runs[s.best_restart];
        let costs: Vec<f64> = runs.iter().map(|r| r.best_cost).collect();
        let k = runs.len() as f64;
        let channel = noise.channels.first();
        let row = ResultRow {
            p: Some(p),
            alpha: Some(alpha),
            shots: Some(q.shots),
            noise: channel.map(|ch| ch.kind.label().to_string()),
            omega: channel.map(|ch| ch.omega),
            restarts: s.restarts,
            mean_best_cost: s.mean_best_cost,
            std_best_cost: s.std_best_cost,
            min_best_cost: s.min_best_cost,
            mean_iterations: s.mean_iterations,
            std_iterations: s.std_iterations,
            mean_entropy: Some(runs.iter().map(|r| solution_entropy(&r.final_histogram)).sum::<f64>() / k),
            mean_objective: Some(runs.iter().map(|r| r.optimal_objective).sum::<f64>() / k),
            optimum_hits: self.hits(&costs),
            shd: self.shd_to_truth(best.best_dag.as_ref())?,
            best_arcs: format_arcs(&best.best_arcs),
            ..self.blank_row(Algorithm::Qaoa.label())
        };
        Ok((row, runs))
    }

    fn qaoa_grid(&self, noise: &NoiseModel, seeds: &mut Vec<SeedRecord>) -> Result<Vec<(ResultRow, Vec<QaoaResult>)>> {
        let q = &self.cfg.qaoa;
        let cells: Vec<(usize, f64)> = q
            .layers
            .iter()
            .flat_map(|&p| q.alpha.iter().map(move |&a| (p, a)))
            .collect();
        for (c, &(p, a)) in cells.iter().enumerate() {
            seeds.push(SeedRecord {
                label: format!("qaoa p={p} alpha={a}"),
                seed: seed::derive(self.cfg.seed, stream::CELL, c as u64),
            });
        }
        exec::map_indexed(cells.len(), |c| {
            let (p, a) = cells[c];
            self.qaoa_cell(p, a, noise, seed::derive(self.cfg.seed, stream::CELL, c as u64))
        })
        .into_iter()
        .collect()
    }

    fn baseline(&self, alg: Algorithm, seed: u64) -> Result<ResultRow> {
        let c = &self.compiled;
        let m = self.cfg.score.max_parents;
        let b = &self.cfg.baselines;
        let row = self.blank_row(alg.label());
        match alg {
            Algorithm::Exhaustive => {
                let (dag, cost) = c
                    .optimum
                    .clone()
                    .ok_or_else(|| CliError::Resource(format!("exhaustive search is limited to {MAX_EXHAUSTIVE_NODES} nodes")))?;
                Ok(ResultRow {
                    restarts: 1,
                    mean_best_cost: cost,
                    min_best_cost: cost,
                    optimum_hits: Some(1),
                    shd: self.shd_to_truth(Some(&dag))?,
                    best_arcs: format_arcs(&dag.arcs()),
                    ..row
                })
            }
            Algorithm::BruteForce => {
                let v = c.cost.layout().num_qubits();
                if v > MAX_BRUTE_FORCE_VARS {
                    return Err(CliError::Resource(format!(
                        "brute force over {v} variables exceeds the {MAX_BRUTE_FORCE_VARS}-variable limit"
                    )));
                }
                let (x, cost) = (0..1u64 << v)
                    .map(|x| (x, c.cost.cost(x)))
                    .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
                    .expect("non-empty");
                let decoded = c.cost.layout().decode(Bitstring::new(v, x)?)?;
                let dag = decoded.to_dag().ok();
                Ok(ResultRow {
                    restarts: 1,
                    mean_best_cost: cost,
                    min_best_cost: cost,
                    mean_iterations: (1u64 << v) as f64,
                    optimum_hits: self.hits(&[cost]),
                    shd: self.shd_to_truth(dag.as_ref())?,
                    best_arcs: format_arcs(&decoded.arcs()),
                    ..row
                })
            }
            Algorithm::HillClimbing | Algorithm::Tabu => {
                let out = if alg == Algorithm::Tabu {
                    tabu_search(&c.table, m, b.tabu_tenure, b.max_stall, seed)?
                } else {
                    hill_climb(&c.table, m, seed)?
                };
                let cost = -out.score;
                Ok(ResultRow {
                    restarts: 1,
                    mean_best_cost: cost,
                    min_best_cost: cost,
                    mean_iterations: out.moves.len() as f64,
                    optimum_hits: self.hits(&[cost]),
                    shd: self.shd_to_truth(Some(&out.dag))?,
                    best_arcs: format_arcs(&out.dag.arcs()),
                    ..row
                })
            }
            Algorithm::Sa => {
                let schedule = AnnealSchedule::for_cost(&c.cost, b.sa_steps)?;
                let runs = anneal_restarts(&c.cost, &schedule, b.sa_restarts, seed)?;
                let costs: Vec<f64> = runs.iter().map(|r| r.best_cost).collect();
                let (mean, std) = mean_std(&costs);
                let best = (0..runs.len())
                    .min_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b)))
                    .expect("at least one restart");
                let decoded = c.cost.layout().decode(runs[best].best_bits)?;
                let dag = decoded.to_dag().ok();
                Ok(ResultRow {
                    restarts: runs.len(),
                    mean_best_cost: mean,
                    std_best_cost: std,
                    min_best_cost: costs[best],
                    mean_iterations: b.sa_steps as f64,
                    optimum_hits: self.hits(&costs),
                    shd: self.shd_to_truth(dag.as_ref())?,
                    best_arcs: format_arcs(&decoded.arcs()),
                    ..row
                })
            }
            Algorithm::Qaoa => unreachable!("QAOA runs through the grid"),
        }
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    (mean, (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt())
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

/// Dispatches `task` and aggregates its results.
pub fn run_experiment(cfg: &ExperimentConfig, task: Task, opts: &RunOptions) -> Result<ExperimentOutput> {
    cfg.validate(task)?;
    let (input, mut seeds) = load_input(cfg)?;
    let id = cfg.experiment_id(task);
    let hash = cfg.hash();
    let mut out = ExperimentOutput {
        task,
        experiment_id: id.clone(),
        config_hash: hash.clone(),
        table: ResultTable::default(),
        artifacts: Vec::new(),
        seeds: Vec::new(),
    };

    if task == Task::Sample {
        let mut buf = Vec::new();
        input.data.write_csv(&mut buf)?;
        out.artifacts.push(Artifact {
            name: "dataset.csv".into(),
            contents: String::from_utf8(buf).expect("csv output is utf-8"),
        });
        out.seeds = seeds;
        return Ok(out);
    }

    let compiled = compile(cfg, &input.data)?;
    let ctx = Context {
        cfg,
        id,
        hash,
        truth: input.truth,
        compiled,
        ceiling: QubitCeiling::new(opts.override_qubit_ceiling),
    };
    let needs_qaoa = match task {
        Task::Learn | Task::SweepPa | Task::SweepNoise => true,
        Task::Compare => cfg.baselines.algorithms.contains(&Algorithm::Qaoa),
        _ => false,
    };
    if needs_qaoa {
        ctx.ceiling.check(ctx.compiled.cost.layout().num_qubits()).map_err(|e| CliError::Resource(e.to_string()))?;
    }

    match task {
        Task::Sample => unreachable!(),
        Task::Score => {
            out.artifacts.push(Artifact {
                name: "local_scores.csv".into(),
                contents: local_scores_csv(&ctx.compiled.table, &input.data)?,
            });
            if ctx.compiled.optimum.is_some() {
                out.table.rows.push(ctx.baseline(Algorithm::Exhaustive, 0)?);
            }
        }
        Task::Learn | Task::SweepPa => {
            let noise = ctx.noise_model()?;
            for (row, runs) in ctx.qaoa_grid(&noise, &mut seeds)? {
                let best = &runs[RestartSummary::from_results(&runs)?.best_restart];
                let mut buf = Vec::new();
                write_histogram(&best.final_histogram, &ctx.compiled.cost, &mut buf)?;
                let name = match task {
                    Task::Learn => "histogram.csv".to_string(),
                    _ => format!(
                        "histograms/p{}_alpha{}.csv",
                        row.p.unwrap_or_default(),
                        fmt_num(row.alpha.unwrap_or_default())
                    ),
                };
                out.artifacts.push(Artifact {
                    name,
                    contents: String::from_utf8(buf).expect("csv output is utf-8"),
                });
                out.table.rows.push(row);
            }
        }
        Task::SweepNoise => {
            let n = &cfg.noise;
            let (p, alpha) = (cfg.qaoa.layers[0], cfg.qaoa.alpha[0]);
            let cells: Vec<NoiseModel> = n
                .kinds
                .iter()
                .flat_map(|&k| n.omegas.iter().map(move |&w| (k, w)))
                .map(|(k, w)| Ok(NoiseModel::single(NoiseChannel::new(k, w)?)))
                .collect::<Result<_>>()?;
            for (c, model) in cells.iter().enumerate() {
                let ch = model.channels[0];
                seeds.push(SeedRecord {
                    label: format!("qaoa {} omega={}", ch.kind.label(), fmt_num(ch.omega)),
                    seed: seed::derive(cfg.seed, stream::CELL, c as u64),
                });
            }
            let rows = exec::map_indexed(cells.len(), |c| {
                ctx.qaoa_cell(p, alpha, &cells[c], seed::derive(cfg.seed, stream::CELL, c as u64))
                    .map(|(row, _)| row)
            });
            for row in rows {
                out.table.rows.push(row?);
            }
        }
        Task::Compare => {
            let noise = ctx.noise_model()?;
            for (k, &alg) in cfg.baselines.algorithms.iter().enumerate() {
                if alg == Algorithm::Qaoa {
                    let cells: Vec<ResultRow> = ctx.qaoa_grid(&noise, &mut seeds)?.into_iter().map(|(r, _)| r).collect();
                    let tuned = cells
                        .iter()
                        .enumerate()
                        .min_by(|(i, a), (j, b)| {
                            a.min_best_cost
                                .total_cmp(&b.min_best_cost)
                                .then(a.mean_best_cost.total_cmp(&b.mean_best_cost))
                                .then(i.cmp(j))
                        })
                        .map(|(_, r)| ResultRow {
                            algorithm: TUNED_QAOA_LABEL.to_string(),
                            ..r.clone()
                        })
                        .expect("non-empty grid");
                    out.table.rows.extend(cells);
                    out.table.rows.push(tuned);
                } else {
                    let s = seed::derive(cfg.seed, stream::CELL, BASELINE_OFFSET + k as u64);
                    seeds.push(SeedRecord {
                        label: alg.label().to_string(),
                        seed: s,
                    });
                    out.table.rows.push(ctx.baseline(alg, s)?);
                }
            }
        }
    }
    out.seeds = seeds;
    Ok(out)
}

/// `node,parents,score` with parents as `;`-separated variable names.
fn local_scores_csv(table: &LocalScoreTable, data: &DiscreteDataset) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let names: Vec<&str> = data.variables().iter().map(|v| v.name.as_str()).collect();
    w.write_record(["node", "parents", "score"]).map_err(|e| CliError::data("<scores>", e))?;
    for (node, parents, score) in table.iter() {
        let ps: Vec<&str> = parents.iter().map(|j| names[j]).collect();
        w.write_record([names[node], &ps.join(";"), &fmt_num(score)])
            .map_err(|e| CliError::data("<scores>", e))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::data("<scores>", e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
