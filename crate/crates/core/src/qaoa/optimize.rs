use std::f64::consts::TAU;

use rand::Rng;

use super::ansatz::{AnsatzTemplate, QaoaParams};
use super::cobyla::{self, CobylaConfig};
use super::objective::{evaluate_objective, sample_circuit, ObjectiveConfig, PenalizedCost};
use crate::bn::Dag;
use crate::seed::{self, stream};
use crate::sim::{NoiseModel, ShotHistogram};
use crate::{exec, Bitstring, Error, Result};

/// Outcome of one variational run.
#[derive(Debug, Clone, PartialEq)]
pub struct QaoaResult {
    /// Lowest-cost bitstring measured in any evaluation.
    pub best_bits: Bitstring,
    pub best_cost: f64,
    /// Arcs of the adjacency block of `best_bits`.
    pub best_arcs: Vec<(usize, usize)>,
    /// The decoded graph, or `None` when it contains a cycle.
    pub best_dag: Option<Dag>,
    /// Optimiser's final parameters, wrapped into `[0, 2π)`.
    pub params: QaoaParams,
    pub optimal_objective: f64,
    /// Objective evaluations performed.
    pub iterations: usize,
    pub converged: bool,
    /// CVaR of every evaluation, in order.
    pub trace: Vec<f64>,
    /// Best measured cost after every evaluation.
    pub best_trace: Vec<f64>,
    /// Fresh sample at the final parameters.
    pub final_histogram: ShotHistogram,
    pub seed: u64,
}

/// COBYLA over `[γ, β]` from a uniform random start in `[0, 2π)^{2p}`.
///
/// Seeds: the start point uses `derive(seed, INIT, 0)`, evaluation `k`
/// samples with `derive(seed, EVALUATION, k)` and the final histogram with
/// `derive(seed, FINAL, 0)`.
pub fn optimize(
    template: &AnsatzTemplate,
    cfg: &ObjectiveConfig,
    cost: &PenalizedCost,
    noise: &NoiseModel,
    opt: &CobylaConfig,
    seed: u64,
) -> Result<QaoaResult> {
    cfg.validate()?;
    if cost.layout().num_qubits() != template.num_qubits() {
        return Err(Error::domain("cost and ansatz act on different qubit counts"));
    }
    if !(opt.rhobeg > 0.0 && opt.rhoend > 0.0 && opt.rhoend <= opt.rhobeg) {
        return Err(Error::domain("need 0 < rhoend <= rhobeg"));
    }

    let mut init = seed::rng(seed::derive(seed, stream::INIT, 0));
    let x0: Vec<f64> = (0..template.num_params()).map(|_| init.gen_range(0.0..TAU)).collect();

    let mut best: Option<(f64, Bitstring)> = None;
    let mut trace = Vec::new();
    let mut best_trace = Vec::new();
    let mut failure: Option<Error> = None;
    let mut k = 0u64;
    let outcome = cobyla::minimize(
        |x| {
            let eval_seed = seed::derive(seed, stream::EVALUATION, k);
            k += 1;
            let ev = QaoaParams::from_flat(x)
                .and_then(|p| evaluate_objective(&p.wrapped(), template, cfg, cost, noise, eval_seed));
            match ev {
                Ok(ev) => {
                    for (b, _) in ev.histogram.iter() {
                        let c = cost.cost(b.index());
                        let better = match best {
                            None => true,
                            Some((bc, bb)) => c < bc || (c == bc && b < bb),
                        };
                        if better {
                            best = Some((c, b));
                        }
                    }
                    trace.push(ev.objective);
                    best_trace.push(best.map(|(c, _)| c).unwrap_or(f64::INFINITY));
                    ev.objective
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::INFINITY
                }
            }
        },
        &x0,
        opt,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let (best_cost, best_bits) = best.ok_or_else(|| Error::domain("no evaluation was performed"))?;
    let params = QaoaParams::from_flat(&outcome.x)?.wrapped();
    let final_histogram = sample_circuit(&params, template, cfg.shots, noise, seed::derive(seed, stream::FINAL, 0))?;
    let decoded = cost.layout().decode(best_bits)?;
    Ok(QaoaResult {
        best_bits,
        best_cost,
        best_arcs: decoded.arcs(),
        best_dag: decoded.to_dag().ok(),
        params,
        optimal_objective: outcome.f,
        iterations: outcome.evaluations,
        converged: outcome.converged,
        trace,
        best_trace,
        final_histogram,
        seed,
    })
}

/// Independent runs seeded `derive(master, RESTART, r)`, executed in parallel.
pub fn optimize_restarts(
    template: &AnsatzTemplate,
    cfg: &ObjectiveConfig,
    cost: &PenalizedCost,
    noise: &NoiseModel,
    opt: &CobylaConfig,
    restarts: usize,
    master_seed: u64,
) -> Result<Vec<QaoaResult>> {
    if restarts == 0 {
        return Err(Error::domain("at least one restart is required"));
    }
    exec::map_indexed(restarts, |r| {
        optimize(template, cfg, cost, noise, opt, seed::derive(master_seed, stream::RESTART, r as u64))
    })
    .into_iter()
    .collect()
}

/// Mean, spread and minimum over a set of restarts.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartSummary {
    pub restarts: usize,
    pub mean_best_cost: f64,
    /// Sample standard deviation (zero for a single restart).
    pub std_best_cost: f64,
    pub min_best_cost: f64,
    pub mean_iterations: f64,
    pub std_iterations: f64,
    pub converged: usize,
    /// Index of the restart with the lowest best cost (first on ties).
    pub best_restart: usize,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

impl RestartSummary {
    pub fn from_results(results: &[QaoaResult]) -> Result<Self> {
        if results.is_empty() {
            return Err(Error::domain("no restarts to summarise"));
        }
        let costs: Vec<f64> = results.iter().map(|r| r.best_cost).collect();
        let iters: Vec<f64> = results.iter().map(|r| r.iterations as f64).collect();
        let (mean_best_cost, std_best_cost) = mean_std(&costs);
        let (mean_iterations, std_iterations) = mean_std(&iters);
        let best_restart = (0..costs.len())
            .min_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b)))
            .expect("non-empty");
        Ok(RestartSummary {
            restarts: results.len(),
            mean_best_cost,
            std_best_cost,
            min_best_cost: costs[best_restart],
            mean_iterations,
            std_iterations,
            converged: results.iter().filter(|r| r.converged).count(),
            best_restart,
        })
    }
}
