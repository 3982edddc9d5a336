use std::fmt;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use super::NodeSet;
use crate::{Error, Result};

/// A directed acyclic graph over nodes `0..n`, stored as parent sets.
///
/// Arc `i -> j` means `i` is a parent of `j` (`a_ij = 1` in matrix form).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dag {
    parents: Vec<NodeSet>,
}

impl Dag {
    pub fn empty(n: usize) -> Self {
        Dag {
            parents: vec![NodeSet::EMPTY; n],
        }
    }

    pub fn from_parent_sets(parents: Vec<NodeSet>) -> Result<Self> {
        let n = parents.len();
        if n > 64 {
            return Err(Error::domain("at most 64 nodes are supported"));
        }
        for (i, p) in parents.iter().enumerate() {
            if p.contains(i) {
                return Err(Error::domain(format!("self loop on node {i}")));
            }
            if p.iter().any(|j| j >= n) {
                return Err(Error::domain(format!("parent of node {i} out of range")));
            }
        }
        if !is_acyclic(&parents) {
            return Err(Error::domain("graph contains a directed cycle"));
        }
        Ok(Dag { parents })
    }

    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        let mut parents = vec![NodeSet::EMPTY; n];
        for &(from, to) in arcs {
            if from >= n || to >= n {
                return Err(Error::domain(format!("arc {from}->{to} out of range")));
            }
            parents[to] = parents[to].with(from);
        }
        Self::from_parent_sets(parents)
    }

    /// Builds a graph from an `n x n` 0/1 adjacency matrix (`a[i][j]` = arc `i -> j`).
    pub fn from_adjacency(a: &[Vec<u8>]) -> Result<Self> {
        let n = a.len();
        let mut arcs = Vec::new();
        for (i, row) in a.iter().enumerate() {
            if row.len() != n {
                return Err(Error::domain("adjacency matrix is not square"));
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    arcs.push((i, j));
                }
            }
        }
        Self::from_arcs(n, &arcs)
    }

    pub fn num_nodes(&self) -> usize {
        self.parents.len()
    }

    pub fn parents(&self, i: usize) -> NodeSet {
        self.parents[i]
    }

    pub fn parent_sets(&self) -> &[NodeSet] {
        &self.parents
    }

    pub fn has_arc(&self, from: usize, to: usize) -> bool {
        self.parents[to].contains(from)
    }

    pub fn in_degree(&self, i: usize) -> usize {
        self.parents[i].len()
    }

    pub fn max_in_degree(&self) -> usize {
        self.parents.iter().map(|p| p.len()).max().unwrap_or(0)
    }

    pub fn num_arcs(&self) -> usize {
        self.parents.iter().map(|p| p.len()).sum()
    }

    /// Arcs `(from, to)` sorted by source then target.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut arcs: Vec<_> = self
            .parents
            .iter()
            .enumerate()
            .flat_map(|(to, p)| p.iter().map(move |from| (from, to)))
            .collect();
        arcs.sort_unstable();
        arcs
    }

    pub fn adjacency(&self) -> Vec<Vec<u8>> {
        let n = self.num_nodes();
        (0..n)
            .map(|i| (0..n).map(|j| self.has_arc(i, j) as u8).collect())
            .collect()
    }

    /// Row-major adjacency bits with the diagonal skipped.
    pub fn adjacency_bits(&self) -> Vec<bool> {
        let n = self.num_nodes();
        let mut out = Vec::with_capacity(n * n.saturating_sub(1));
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    out.push(self.has_arc(i, j));
                }
            }
        }
        out
    }

    /// A topological order; ties are resolved by smallest index first.
    pub fn topological_order(&self) -> Vec<usize> {
        topological_order(&self.parents).expect("Dag invariant: acyclic")
    }

    /// Graph induced on `nodes`, relabelled `0..nodes.len()` in the given order.
    pub fn induced(&self, nodes: &[usize]) -> Result<Self> {
        let mut parents = Vec::with_capacity(nodes.len());
        for &v in nodes {
            if v >= self.num_nodes() {
                return Err(Error::domain(format!("node {v} out of range")));
            }
            let p: NodeSet = nodes
                .iter()
                .enumerate()
                .filter(|&(_, &u)| self.has_arc(u, v))
                .map(|(k, _)| k)
                .collect();
            parents.push(p);
        }
        Self::from_parent_sets(parents)
    }
}

impl fmt::Debug for Dag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dag(n={}, arcs={:?})", self.num_nodes(), self.arcs())
    }
}

impl fmt::Display for Dag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arcs = self.arcs();
        if arcs.is_empty() {
            return write!(f, "(empty)");
        }
        for (k, (a, b)) in arcs.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{a}->{b}")?;
        }
        Ok(())
    }
}

fn topological_order(parents: &[NodeSet]) -> Option<Vec<usize>> {
    let n = parents.len();
    let mut placed = NodeSet::EMPTY;
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let next = (0..n).find(|&i| !placed.contains(i) && parents[i].is_subset_of(placed))?;
        placed = placed.with(next);
        order.push(next);
    }
    Some(order)
}

/// Whether the parent-set graph has no directed cycle (self loops count as cycles).
pub fn is_acyclic(parents: &[NodeSet]) -> bool {
    parents.iter().enumerate().all(|(i, p)| !p.contains(i)) && topological_order(parents).is_some()
}

/// Number of labelled DAGs on `n` nodes (Robinson's recurrence).
///
/// `a(0) = 1`, `a(n) = sum_{k=1..n} (-1)^(k+1) C(n,k) 2^(k(n-k)) a(n-k)`.
pub fn count_dags(n: usize) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::domain("count_dags needs n >= 1"));
    }
    let mut a: Vec<BigInt> = vec![BigInt::from(1)];
    for m in 1..=n {
        let mut total = BigInt::from(0);
        let mut binom = BigInt::from(1);
        for k in 1..=m {
            binom = binom * BigInt::from(m - k + 1) / BigInt::from(k);
            let term = &binom * (BigInt::from(1) << (k * (m - k))) * &a[m - k];
            if k % 2 == 1 {
                total += term;
            } else {
                total -= term;
            }
        }
        a.push(total);
    }
    Ok(a[n].to_biguint().expect("DAG counts are positive"))
}

/// Structural Hamming distance: arcs to add, delete or reverse to turn
/// `g1` into `g2`. A reversal counts as one edit.
pub fn shd(g1: &Dag, g2: &Dag) -> Result<usize> {
    let n = g1.num_nodes();
    if n != g2.num_nodes() {
        return Err(Error::domain(format!(
            "graphs have {} and {} nodes",
            n,
            g2.num_nodes()
        )));
    }
    let pair_state = |g: &Dag, i: usize, j: usize| (g.has_arc(i, j), g.has_arc(j, i));
    let mut d = 0;
    for i in 0..n {
        for j in i + 1..n {
            if pair_state(g1, i, j) != pair_state(g2, i, j) {
                d += 1;
            }
        }
    }
    Ok(d)
}

/// Unshielded colliders `a -> c <- b` with `a < b`, sorted.
pub fn v_structures(g: &Dag) -> Vec<(usize, usize, usize)> {
    let n = g.num_nodes();
    let adjacent = |x: usize, y: usize| g.has_arc(x, y) || g.has_arc(y, x);
    let mut out = Vec::new();
    for c in 0..n {
        let pa: Vec<usize> = g.parents(c).iter().collect();
        for (k, &a) in pa.iter().enumerate() {
            for &b in &pa[k + 1..] {
                if !adjacent(a, b) {
                    out.push((a.min(b), a.max(b), c));
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Same skeleton and same v-structures.
pub fn markov_equivalent(g1: &Dag, g2: &Dag) -> bool {
    let n = g1.num_nodes();
    if n != g2.num_nodes() {
        return false;
    }
    let skeleton = |g: &Dag| {
        let mut e: Vec<(usize, usize)> = g.arcs().into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        e.sort_unstable();
        e
    };
    skeleton(g1) == skeleton(g2) && v_structures(g1) == v_structures(g2)
}
