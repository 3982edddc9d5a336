use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::qaoa::PenalizedCost;
use crate::seed::{self, stream};
use crate::{exec, Bitstring, Error, Result};

/// Label attached to annealing results wherever they are reported.
pub const SA_LABEL: &str = "SA (classical substitute)";

/// Geometric cooling from `t0` to `t_end` over `steps` proposals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub t0: f64,
    pub t_end: f64,
    pub steps: usize,
}

impl AnnealSchedule {
    pub fn new(t0: f64, t_end: f64, steps: usize) -> Result<Self> {
        let s = AnnealSchedule { t0, t_end, steps };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t0 > self.t_end && self.t_end > 0.0 && self.t0.is_finite()) {
            return Err(Error::domain("annealing needs t0 > t_end > 0"));
        }
        if self.steps == 0 {
            return Err(Error::domain("annealing needs at least one step"));
        }
        Ok(())
    }

    /// Schedule scaled to a cost: from its largest coefficient down by `1e-4`.
    pub fn for_cost(cost: &PenalizedCost, steps: usize) -> Result<Self> {
        let t0 = cost.polynomial().max_abs_coefficient().max(cost.delta_max());
        AnnealSchedule::new(t0, t0 * 1e-4, steps)
    }

    /// Per-step multiplicative decay.
    pub fn decay(&self) -> f64 {
        if self.steps < 2 {
            1.0
        } else {
            (self.t_end / self.t0).powf(1.0 / (self.steps - 1) as f64)
        }
    }

    pub fn temperature(&self, step: usize) -> f64 {
        if self.steps < 2 {
            return self.t0;
        }
        self.t0 * (self.t_end / self.t0).powf(step as f64 / (self.steps - 1) as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnealOutcome {
    pub best_bits: Bitstring,
    pub best_cost: f64,
    /// `(step, cost)` each time the best-seen cost dropped.
    pub improvements: Vec<(usize, f64)>,
    pub accepted: usize,
}

/// Incremental cost bookkeeping for single-bit flips.
struct Chain<'a> {
    cost: &'a PenalizedCost,
    neighbours: Vec<(f64, Vec<(usize, f64)>)>,
    n: usize,
    x: u64,
    in_deg: Vec<usize>,
}

impl<'a> Chain<'a> {
    fn new(cost: &'a PenalizedCost, x: u64) -> Self {
        let layout = cost.layout();
        Chain {
            cost,
            neighbours: cost.polynomial().compile().neighbourhoods(),
            n: layout.num_nodes(),
            x,
            in_deg: layout.in_degrees(x).collect(),
        }
    }

    fn excess_penalty(&self, d: usize) -> f64 {
        let e = d.saturating_sub(self.cost.max_indegree()) as f64;
        self.cost.delta_max() * e * e
    }

    /// Child node of adjacency qubit `k`, if `k` is one.
    fn child_of(&self, k: usize) -> Option<usize> {
        let n = self.n;
        if k >= n * (n - 1) {
            return None;
        }
        let (i, r) = (k / (n - 1), k % (n - 1));
        Some(if r < i { r } else { r + 1 })
    }

    fn delta(&self, k: usize) -> f64 {
        let (lin, partners) = &self.neighbours[k];
        let mut field = *lin;
        for &(o, c) in partners {
            if self.x >> o & 1 == 1 {
                field += c;
            }
        }
        let on = self.x >> k & 1 == 1;
        let mut d = if on { -field } else { field };
        if let Some(j) = self.child_of(k) {
            let before = self.in_deg[j];
            let after = if on { before - 1 } else { before + 1 };
            d += self.excess_penalty(after) - self.excess_penalty(before);
        }
        d
    }

    fn flip(&mut self, k: usize) {
        let on = self.x >> k & 1 == 1;
        self.x ^= 1 << k;
        if let Some(j) = self.child_of(k) {
            if on {
                self.in_deg[j] -= 1;
            } else {
                self.in_deg[j] += 1;
            }
        }
    }
}

/// Metropolis single-bit-flip annealing on the penalised cost from a
/// uniformly random start; returns the best state seen.
pub fn simulated_annealing_qubo(cost: &PenalizedCost, schedule: &AnnealSchedule, seed: u64) -> Result<AnnealOutcome> {
    let v = cost.layout().num_qubits();
    let mut rng = seed::rng(seed::derive(seed, stream::INIT, 0));
    let mask = if v == 64 { u64::MAX } else { (1u64 << v) - 1 };
    let start = Bitstring::new(v, rng.gen::<u64>() & mask)?;
    simulated_annealing_from(cost, schedule, start, seed)
}

/// As [`simulated_annealing_qubo`], starting from `start`.
pub fn simulated_annealing_from(
    cost: &PenalizedCost,
    schedule: &AnnealSchedule,
    start: Bitstring,
    seed: u64,
) -> Result<AnnealOutcome> {
    schedule.validate()?;
    let v = cost.layout().num_qubits();
    if start.len() != v {
        return Err(Error::domain("start state has the wrong length"));
    }
    let mut rng = seed::rng(seed::derive(seed, stream::SAMPLE, 0));
    let mut chain = Chain::new(cost, start.index());
    let mut current = cost.cost(chain.x);
    let mut best = (current, chain.x);
    let mut improvements = vec![(0, current)];
    let mut accepted = 0;
    let decay = schedule.decay();
    let mut temp = schedule.t0;
    for step in 0..schedule.steps {
        let k = rng.gen_range(0..v);
        let d = chain.delta(k);
        let u: f64 = rng.gen();
        if d <= 0.0 || u < (-d / temp).exp() {
            chain.flip(k);
            current += d;
            accepted += 1;
            if current < best.0 {
                // resynchronise to avoid drift in the running sum
                current = cost.cost(chain.x);
                if current < best.0 {
                    best = (current, chain.x);
                    improvements.push((step + 1, current));
                }
            }
        }
        temp *= decay;
    }
    Ok(AnnealOutcome {
        best_bits: Bitstring::new(v, best.1)?,
        best_cost: best.0,
        improvements,
        accepted,
    })
}

/// Independent chains seeded `derive(master, RESTART, r)`.
pub fn anneal_restarts(
    cost: &PenalizedCost,
    schedule: &AnnealSchedule,
    restarts: usize,
    master_seed: u64,
) -> Result<Vec<AnnealOutcome>> {
    exec::map_indexed(restarts, |r| {
        simulated_annealing_qubo(cost, schedule, seed::derive(master_seed, stream::RESTART, r as u64))
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::{PseudoBooleanPolynomial, QubitLayout};

    fn random_cost(n: usize, seed: u64) -> PenalizedCost {
        let v = QubitLayout::new(n).unwrap().num_qubits();
        let mut rng = seed::rng(seed);
        let mut p = PseudoBooleanPolynomial::new(v);
        for i in 0..v {
            p.add_linear(i, rng.gen_range(-3.0..3.0));
            for j in i + 1..v {
                if rng.gen_bool(0.3) {
                    p.add_quadratic(i, j, rng.gen_range(-3.0..3.0));
                }
            }
        }
        PenalizedCost::new(p, 1, 2.0).unwrap()
    }

    #[test]
    fn schedule_validation_and_decay() {
        assert!(AnnealSchedule::new(1.0, 2.0, 10).is_err());
        assert!(AnnealSchedule::new(1.0, 0.0, 10).is_err());
        assert!(AnnealSchedule::new(1.0, 0.5, 0).is_err());
        let s = AnnealSchedule::new(8.0, 1.0, 4).unwrap();
        assert!((s.decay() - 0.5).abs() < 1e-12);
        assert!((s.temperature(3) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn incremental_deltas_match_full_evaluation() {
        let cost = random_cost(4, 3);
        let mut rng = seed::rng(9);
        let mut chain = Chain::new(&cost, rng.gen::<u64>() & ((1 << 18) - 1));
        for _ in 0..500 {
            let k = rng.gen_range(0..18);
            let before = cost.cost(chain.x);
            let d = chain.delta(k);
            chain.flip(k);
            assert!((cost.cost(chain.x) - before - d).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_polynomial_reaches_zero() {
        let cost = PenalizedCost::new(PseudoBooleanPolynomial::new(9), 2, 1.0).unwrap();
        let out = simulated_annealing_qubo(&cost, &AnnealSchedule::new(1.0, 0.01, 1000).unwrap(), 4).unwrap();
        assert_eq!(out.best_cost, 0.0);
    }

    #[test]
    fn finds_brute_force_minimum_on_nine_bits() {
        let cost = random_cost(3, 17);
        let exact = (0..512u64).map(|x| cost.cost(x)).fold(f64::INFINITY, f64::min);
        let sched = AnnealSchedule::new(5.0, 1e-3, 20_000).unwrap();
        let runs = anneal_restarts(&cost, &sched, 4, 1).unwrap();
        for r in &runs {
            assert!((r.best_cost - exact).abs() < 1e-9);
            assert!(r.improvements.windows(2).all(|w| w[1].1 < w[0].1));
            assert_eq!(cost.cost_of(r.best_bits).unwrap(), r.best_cost);
        }
    }

    #[test]
    fn cold_chain_stays_at_the_optimum() {
        let cost = random_cost(3, 5);
        let (x, c) = (0..512u64)
            .map(|x| (x, cost.cost(x)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        let sched = AnnealSchedule::new(1e-9, 1e-12, 5000).unwrap();
        let out = simulated_annealing_from(&cost, &sched, Bitstring::new(9, x).unwrap(), 2).unwrap();
        assert_eq!(out.best_cost, c);
        assert_eq!(out.improvements.len(), 1);
    }
}
