use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::{is_acyclic, Dag, DiscreteDataset, NodeSet};
use crate::{exec, Error, Result};

pub const DEFAULT_BDEU_ESS: f64 = 1.0;

/// Largest node count [`exhaustive_best_dag`] will enumerate.
pub const MAX_EXHAUSTIVE_NODES: usize = 5;

/// Decomposable score family. Higher scores are better.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScoreKind {
    /// Log-likelihood at the MLE minus `ln(N)/2` per free parameter.
    Bic,
    /// Bayesian Dirichlet equivalent uniform marginal likelihood.
    #[serde(rename = "bdeu")]
    BDeu { ess: f64 },
}

impl Default for ScoreKind {
    fn default() -> Self {
        ScoreKind::Bic
    }
}

impl fmt::Display for ScoreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScoreKind::Bic => write!(f, "BIC"),
            ScoreKind::BDeu { ess } => write!(f, "BDeu(ess={ess})"),
        }
    }
}

/// Joint counts `N_jk` of node states `k` under parent configurations `j`.
fn family_counts(data: &DiscreteDataset, node: usize, parents: NodeSet) -> (Vec<u32>, usize) {
    let r = data.cardinality(node);
    let parent_idx: Vec<usize> = parents.iter().collect();
    let q: usize = parent_idx.iter().map(|&k| data.cardinality(k)).product();
    let mut counts = vec![0u32; q * r];
    let child = data.column(node);
    let cols: Vec<&[u16]> = parent_idx.iter().map(|&k| data.column(k)).collect();
    let cards: Vec<usize> = parent_idx.iter().map(|&k| data.cardinality(k)).collect();
    for row in 0..data.num_rows() {
        let mut j = 0;
        for (col, &card) in cols.iter().zip(&cards) {
            j = j * card + col[row] as usize;
        }
        counts[j * r + child[row] as usize] += 1;
    }
    (counts, q)
}

/// Local score of `node` given the parent set `parents`.
pub fn local_score(
    data: &DiscreteDataset,
    node: usize,
    parents: NodeSet,
    kind: ScoreKind,
) -> Result<f64> {
    let n = data.num_vars();
    if node >= n {
        return Err(Error::domain(format!("node {node} out of range")));
    }
    if parents.contains(node) {
        return Err(Error::domain(format!("node {node} cannot be its own parent")));
    }
    if parents.iter().any(|k| k >= n) {
        return Err(Error::domain("parent index out of range"));
    }
    let r = data.cardinality(node);
    let (counts, q) = family_counts(data, node, parents);
    let score = match kind {
        ScoreKind::Bic => {
            let mut ll = 0.0;
            for row in counts.chunks_exact(r) {
                let nj: u32 = row.iter().sum();
                if nj == 0 {
                    continue;
                }
                let nj = nj as f64;
                for &njk in row.iter().filter(|&&c| c > 0) {
                    let njk = njk as f64;
                    ll += njk * (njk / nj).ln();
                }
            }
            let free = ((r - 1) * q) as f64;
            ll - 0.5 * (data.num_rows() as f64).ln() * free
        }
        ScoreKind::BDeu { ess } => {
            if !(ess > 0.0) {
                return Err(Error::domain("BDeu equivalent sample size must be positive"));
            }
            let a_j = ess / q as f64;
            let a_jk = a_j / r as f64;
            let lg_aj = ln_gamma(a_j);
            let lg_ajk = ln_gamma(a_jk);
            let mut total = 0.0;
            for row in counts.chunks_exact(r) {
                let nj: u32 = row.iter().sum();
                if nj == 0 {
                    continue;
                }
                total += lg_aj - ln_gamma(a_j + nj as f64);
                for &njk in row.iter().filter(|&&c| c > 0) {
                    total += ln_gamma(a_jk + njk as f64) - lg_ajk;
                }
            }
            total
        }
    };
    Ok(score)
}

/// Full decomposable score of `dag`, evaluated directly from data.
pub fn score_dag(data: &DiscreteDataset, dag: &Dag, kind: ScoreKind) -> Result<f64> {
    if dag.num_nodes() != data.num_vars() {
        return Err(Error::domain("graph and dataset sizes differ"));
    }
    (0..dag.num_nodes())
        .map(|i| local_score(data, i, dag.parents(i), kind))
        .sum()
}

/// Precomputed `s_i(K)` for every node and every parent set with `|K| <= m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalScoreTable {
    n: usize,
    max_parents: usize,
    kind: ScoreKind,
    entries: Vec<BTreeMap<NodeSet, f64>>,
}

impl LocalScoreTable {
    /// Builds a table from explicit values, checking completeness.
    pub fn from_entries(
        n: usize,
        max_parents: usize,
        kind: ScoreKind,
        entries: Vec<BTreeMap<NodeSet, f64>>,
    ) -> Result<Self> {
        if entries.len() != n {
            return Err(Error::domain("one entry map per node required"));
        }
        for (i, map) in entries.iter().enumerate() {
            for k in NodeSet::all_up_to(n, i, max_parents) {
                match map.get(&k) {
                    Some(v) if v.is_finite() => {}
                    Some(_) => return Err(Error::domain(format!("s_{i}({k}) is not finite"))),
                    None => return Err(Error::domain(format!("s_{i}({k}) missing"))),
                }
            }
            if map.len() != NodeSet::all_up_to(n, i, max_parents).len() {
                return Err(Error::domain(format!("node {i} has extra parent sets")));
            }
        }
        Ok(LocalScoreTable {
            n,
            max_parents,
            kind,
            entries,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.n
    }

    pub fn max_parents(&self) -> usize {
        self.max_parents
    }

    pub fn kind(&self) -> ScoreKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.entries.iter().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, node: usize, parents: NodeSet) -> Option<f64> {
        self.entries.get(node)?.get(&parents).copied()
    }

    pub fn score(&self, node: usize, parents: NodeSet) -> Result<f64> {
        self.get(node, parents).ok_or_else(|| {
            Error::domain(format!(
                "no entry for node {node} with parents {parents} (max in-degree {})",
                self.max_parents
            ))
        })
    }

    /// Parent sets of `node` in table order (by size, then bitmask).
    pub fn parent_sets(&self, node: usize) -> impl Iterator<Item = (NodeSet, f64)> + '_ {
        let mut v: Vec<_> = self.entries[node].iter().map(|(&k, &s)| (k, s)).collect();
        v.sort_by_key(|(k, _)| (k.len(), k.bits()));
        v.into_iter()
    }

    /// `(node, parents, score)` for every entry, node-major.
    pub fn iter(&self) -> impl Iterator<Item = (usize, NodeSet, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.parent_sets(i).map(move |(k, s)| (i, k, s)))
    }

    /// Sum of local scores; fails if some in-degree exceeds the table's bound.
    pub fn score_dag(&self, dag: &Dag) -> Result<f64> {
        if dag.num_nodes() != self.n {
            return Err(Error::domain("graph and table sizes differ"));
        }
        (0..self.n).map(|i| self.score(i, dag.parents(i))).sum()
    }

    /// `max - min` over all entries.
    pub fn score_range(&self) -> f64 {
        let (lo, hi) = self
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, _, s)| {
                (lo.min(s), hi.max(s))
            });
        hi - lo
    }
}

/// Scores every `(node, parent set)` with at most `max_parents` parents.
pub fn build_score_table(
    data: &DiscreteDataset,
    kind: ScoreKind,
    max_parents: usize,
) -> Result<LocalScoreTable> {
    let n = data.num_vars();
    if n > 64 {
        return Err(Error::domain("at most 64 variables are supported"));
    }
    let cells: Vec<(usize, NodeSet)> = (0..n)
        .flat_map(|i| {
            NodeSet::all_up_to(n, i, max_parents)
                .into_iter()
                .map(move |k| (i, k))
        })
        .collect();
    let values = exec::map_slice(&cells, |&(i, k)| local_score(data, i, k, kind));
    let mut entries = vec![BTreeMap::new(); n];
    for ((i, k), v) in cells.into_iter().zip(values) {
        entries[i].insert(k, v?);
    }
    LocalScoreTable::from_entries(n, max_parents, kind, entries)
}

/// Exhaustive maximiser of the decomposable score over DAGs whose in-degree
/// is bounded by the table. Ties go to the lexicographically smallest
/// row-major adjacency bit vector.
pub fn exhaustive_best_dag(table: &LocalScoreTable) -> Result<(Dag, f64)> {
    let n = table.num_nodes();
    if n > MAX_EXHAUSTIVE_NODES {
        return Err(Error::ResourceGuard(format!(
            "exhaustive search limited to {MAX_EXHAUSTIVE_NODES} nodes, got {n}"
        )));
    }
    let options: Vec<Vec<(NodeSet, f64)>> = (0..n).map(|i| table.parent_sets(i).collect()).collect();
    let mut choice = vec![0usize; n];
    let mut best: Option<(Vec<NodeSet>, f64, Vec<bool>)> = None;
    loop {
        let parents: Vec<NodeSet> = choice.iter().zip(&options).map(|(&c, o)| o[c].0).collect();
        if is_acyclic(&parents) {
            let score: f64 = choice.iter().zip(&options).map(|(&c, o)| o[c].1).sum();
            let replace = match &best {
                None => true,
                Some((_, s, bits)) => {
                    score > *s || (score == *s && adjacency_bits(&parents) < *bits)
                }
            };
            if replace {
                let bits = adjacency_bits(&parents);
                best = Some((parents, score, bits));
            }
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == n {
                let (parents, score, _) = best.expect("the empty graph is always feasible");
                return Ok((Dag::from_parent_sets(parents)?, score));
            }
            choice[k] += 1;
            if choice[k] < options[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn adjacency_bits(parents: &[NodeSet]) -> Vec<bool> {
    let n = parents.len();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for (j, p) in parents.iter().enumerate() {
            if i != j {
                out.push(p.contains(i));
            }
        }
    }
    out
}
