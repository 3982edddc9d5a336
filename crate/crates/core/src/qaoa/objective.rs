use serde::{Deserialize, Serialize};

use super::ansatz::{AnsatzTemplate, QaoaParams};
use crate::qubo::{CompiledPolynomial, PseudoBooleanPolynomial, QubitLayout};
use crate::seed::{self, stream};
use crate::sim::{run_noisy_trajectory, NoiseModel, ShotHistogram};
use crate::{exec, Bitstring, Error, Result};

/// Sampling and penalty settings shared by every evaluation of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveConfig {
    /// CVaR fraction in `(0, 1]`.
    pub alpha: f64,
    /// Shots per evaluation.
    pub shots: u64,
    /// In-degree bound `m`.
    pub max_indegree: usize,
    /// Weight of the squared in-degree excess.
    pub delta_max: f64,
}

impl ObjectiveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::domain(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if self.shots == 0 {
            return Err(Error::domain("at least one shot per evaluation is required"));
        }
        if !(self.delta_max > 0.0 && self.delta_max.is_finite()) {
            return Err(Error::domain("delta_max must be positive and finite"));
        }
        Ok(())
    }
}

/// Hamiltonian value plus the classical in-degree penalty, for repeated use.
#[derive(Debug, Clone)]
pub struct PenalizedCost {
    poly: PseudoBooleanPolynomial,
    compiled: CompiledPolynomial,
    layout: QubitLayout,
    max_indegree: usize,
    delta_max: f64,
}

fn layout_for(num_vars: usize) -> Result<QubitLayout> {
    // v = 3n(n-1)/2
    (2..=7)
        .find(|n| 3 * n * (n - 1) / 2 == num_vars)
        .map(QubitLayout::new)
        .unwrap_or_else(|| Err(Error::domain(format!("{num_vars} variables do not form a structure layout"))))
}

impl PenalizedCost {
    pub fn new(poly: PseudoBooleanPolynomial, max_indegree: usize, delta_max: f64) -> Result<Self> {
        if !(delta_max > 0.0 && delta_max.is_finite()) {
            return Err(Error::domain("delta_max must be positive and finite"));
        }
        let layout = layout_for(poly.num_vars())?;
        Ok(PenalizedCost {
            compiled: poly.compile(),
            poly,
            layout,
            max_indegree,
            delta_max,
        })
    }

    pub fn polynomial(&self) -> &PseudoBooleanPolynomial {
        &self.poly
    }

    pub fn layout(&self) -> &QubitLayout {
        &self.layout
    }

    pub fn max_indegree(&self) -> usize {
        self.max_indegree
    }

    pub fn delta_max(&self) -> f64 {
        self.delta_max
    }

    /// `Σ_i δ_max · max(0, d_i - m)²`.
    pub fn indegree_penalty(&self, x: u64) -> f64 {
        self.layout
            .in_degrees(x)
            .map(|d| {
                let excess = d.saturating_sub(self.max_indegree) as f64;
                self.delta_max * excess * excess
            })
            .sum()
    }

    pub fn cost(&self, x: u64) -> f64 {
        self.compiled.value(x) + self.indegree_penalty(x)
    }

    pub fn cost_of(&self, bits: Bitstring) -> Result<f64> {
        if bits.len() != self.layout.num_qubits() {
            return Err(Error::domain(format!(
                "bitstring has {} bits, cost expects {}",
                bits.len(),
                self.layout.num_qubits()
            )));
        }
        Ok(self.cost(bits.index()))
    }
}

/// Polynomial value plus `Σ_i δ_max · max(0, d_i - m)²` over decoded in-degrees.
pub fn penalized_cost(bits: Bitstring, poly: &PseudoBooleanPolynomial, m: usize, delta_max: f64) -> Result<f64> {
    let base = poly.evaluate(bits)?;
    let layout = layout_for(poly.num_vars())?;
    if !(delta_max > 0.0) {
        return Err(Error::domain("delta_max must be positive"));
    }
    let penalty: f64 = layout
        .in_degrees(bits.index())
        .map(|d| {
            let excess = d.saturating_sub(m) as f64;
            delta_max * excess * excess
        })
        .sum();
    Ok(base + penalty)
}

/// Neumaier-compensated running sum.
#[derive(Default)]
struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Mean cost over all shots.
pub fn expectation<F>(hist: &ShotHistogram, cost: F) -> Result<f64>
where
    F: Fn(Bitstring) -> f64,
{
    if hist.total() == 0 {
        return Err(Error::domain("empty histogram"));
    }
    let mut acc = Accumulator::default();
    for (b, n) in hist.iter() {
        acc.add(cost(b) * n as f64);
    }
    Ok(acc.value() / hist.total() as f64)
}

/// Number of shots kept by CVaR: `⌈α t⌉`, guarded against `α t` landing a
/// rounding error above an integer.
pub fn cvar_count(alpha: f64, total: u64) -> u64 {
    let exact = alpha * total as f64;
    let nearest = exact.round();
    let k = if (exact - nearest).abs() <= 1e-9 * exact.max(1.0) {
        nearest
    } else {
        exact.ceil()
    };
    (k as u64).clamp(1, total)
}

/// Mean of the lowest `⌈α t⌉` shot costs.
pub fn cvar<F>(hist: &ShotHistogram, cost: F, alpha: f64) -> Result<f64>
where
    F: Fn(Bitstring) -> f64,
{
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if hist.total() == 0 {
        return Err(Error::domain("empty histogram"));
    }
    let mut costs: Vec<(f64, u64)> = hist.iter().map(|(b, n)| (cost(b), n)).collect();
    costs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let k = cvar_count(alpha, hist.total());
    let mut left = k;
    let mut acc = Accumulator::default();
    for (c, n) in costs {
        let take = n.min(left);
        acc.add(c * take as f64);
        left -= take;
        if left == 0 {
            break;
        }
    }
    Ok(acc.value() / k as f64)
}

/// Shannon entropy (nats) of the empirical outcome distribution.
pub fn solution_entropy(hist: &ShotHistogram) -> f64 {
    let t = hist.total() as f64;
    if t == 0.0 {
        return 0.0;
    }
    -hist
        .iter()
        .map(|(_, n)| {
            let p = n as f64 / t;
            p * p.ln()
        })
        .sum::<f64>()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub objective: f64,
    pub histogram: ShotHistogram,
}

/// Samples `cfg.shots` measurements of the bound circuit and returns their
/// CVaR under `cost`.
///
/// Without noise the final statevector is computed once and sampled; with
/// noise every shot runs its own trajectory through the gate-level circuit
/// (two-qubit rotations expanded to `CNOT·RZ·CNOT`).
pub fn evaluate_objective(
    params: &QaoaParams,
    template: &AnsatzTemplate,
    cfg: &ObjectiveConfig,
    cost: &PenalizedCost,
    noise: &NoiseModel,
    seed: u64,
) -> Result<Evaluation> {
    cfg.validate()?;
    if cost.layout().num_qubits() != template.num_qubits() {
        return Err(Error::domain("cost and ansatz act on different qubit counts"));
    }
    let histogram = sample_circuit(params, template, cfg.shots, noise, seed)?;
    let objective = cvar(&histogram, |b| cost.cost(b.index()), cfg.alpha)?;
    Ok(Evaluation { objective, histogram })
}

/// Measurement histogram of the bound circuit, with or without noise.
pub fn sample_circuit(
    params: &QaoaParams,
    template: &AnsatzTemplate,
    shots: u64,
    noise: &NoiseModel,
    seed: u64,
) -> Result<ShotHistogram> {
    if shots == 0 {
        return Err(Error::domain("at least one shot is required"));
    }
    if noise.is_noiseless() {
        let state = template.prepare_state(params)?;
        return state.sample(shots, seed::derive(seed, stream::SAMPLE, 0));
    }
    let gates = template.circuit_decomposed(params)?;
    let q = template.num_qubits();
    let ceiling = template.ceiling();
    let outcomes: Vec<Result<u64>> = exec::map_indexed(shots as usize, |s| {
        let state = run_noisy_trajectory(q, &gates, noise, seed::derive(seed, stream::SHOT, s as u64), ceiling)?;
        let mut rng = seed::rng(seed::derive(seed, stream::SAMPLE, s as u64));
        Ok(state.sample_index(&mut rng))
    });
    let mut hist = ShotHistogram::new(q);
    for o in outcomes {
        hist.record(Bitstring::new(q, o?)?, 1)?;
    }
    Ok(hist)
}
