#![allow(dead_code)]

use qbnsl::bn::{build_score_table, random_network, DiscreteDataset, LocalScoreTable, ScoreKind};
use qbnsl::qaoa::PenalizedCost;
use qbnsl::qubo::{build_hamiltonian_parts, default_penalty, HamiltonianParts};

pub fn random_dataset(n: usize, rows: usize, seed: u64) -> DiscreteDataset {
    random_network(n, 2, seed)
        .unwrap()
        .forward_sample(rows, seed ^ 0xdead_beef)
        .unwrap()
}

pub struct Instance {
    pub table: LocalScoreTable,
    pub parts: HamiltonianParts,
    pub cost: PenalizedCost,
    pub delta: f64,
}

pub fn instance(n: usize, rows: usize, seed: u64) -> Instance {
    let data = random_dataset(n, rows, seed);
    let table = build_score_table(&data, ScoreKind::Bic, 2).unwrap();
    let delta = default_penalty(&table);
    let parts = build_hamiltonian_parts(&table, delta, delta).unwrap();
    let cost = PenalizedCost::new(parts.total(), 2, delta).unwrap();
    Instance {
        table,
        parts,
        cost,
        delta,
    }
}

/// Whether `order` (a list of nodes) places every `i` before `j` for arcs `i -> j`.
pub fn respects(order: &[usize], arcs: &[(usize, usize)]) -> bool {
    let pos = |v: usize| order.iter().position(|&x| x == v).unwrap();
    arcs.iter().all(|&(i, j)| pos(i) < pos(j))
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..rest.len() {
            let v = rest.remove(k);
            prefix.push(v);
            go(prefix, rest, out);
            prefix.pop();
            rest.insert(k, v);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..n).collect(), &mut out);
    out
}
