use std::fmt;

use crate::bn::{is_acyclic, Dag, NodeSet};
use crate::{Bitstring, Error, Result};

/// Qubit assignment for an `n`-node problem.
///
/// Adjacency qubits `a_ij` (`i != j`) come first in row-major order with the
/// diagonal skipped, occupying `0..n(n-1)`. Order qubits `r_ij` (`i < j`)
/// follow in row-major order over the strict upper triangle. `r_ij = 1`
/// means node `i` precedes node `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitLayout {
    n: usize,
}

impl QubitLayout {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain("qubit layout needs at least 2 nodes"));
        }
        let layout = QubitLayout { n };
        if layout.num_qubits() > Bitstring::MAX_LEN {
            return Err(Error::domain(format!(
                "{n} nodes need {} qubits, more than {} are not addressable",
                layout.num_qubits(),
                Bitstring::MAX_LEN
            )));
        }
        Ok(layout)
    }

    pub fn num_nodes(&self) -> usize {
        self.n
    }

    /// `3n(n-1)/2`.
    pub fn num_qubits(&self) -> usize {
        self.num_adjacency_qubits() + self.num_order_qubits()
    }

    pub fn num_adjacency_qubits(&self) -> usize {
        self.n * (self.n - 1)
    }

    pub fn num_order_qubits(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    /// Qubit of `a_ij` (arc `i -> j`).
    pub fn a_index(&self, i: usize, j: usize) -> usize {
        assert!(i != j && i < self.n && j < self.n, "a_{i}{j} not in layout");
        i * (self.n - 1) + if j < i { j } else { j - 1 }
    }

    /// Qubit of `r_ij`, `i < j`.
    pub fn r_index(&self, i: usize, j: usize) -> usize {
        assert!(i < j && j < self.n, "r_{i}{j} not in layout");
        // rows 0..i of the strict upper triangle hold sum_{k<i} (n-1-k) entries
        let before = i * (2 * self.n - i - 1) / 2;
        self.num_adjacency_qubits() + before + (j - i - 1)
    }

    /// Encodes a graph together with a node ordering (`order[0]` first).
    ///
    /// The order need not be consistent with the graph; inconsistent pairs
    /// are what the consistency penalty detects.
    pub fn encode(&self, parents: &[NodeSet], order: &[usize]) -> Result<Bitstring> {
        if parents.len() != self.n || order.len() != self.n {
            return Err(Error::domain("graph or order size does not match layout"));
        }
        let mut pos = vec![usize::MAX; self.n];
        for (p, &v) in order.iter().enumerate() {
            if v >= self.n || pos[v] != usize::MAX {
                return Err(Error::domain("order is not a permutation"));
            }
            pos[v] = p;
        }
        let mut bits = Bitstring::zeros(self.num_qubits());
        for (j, p) in parents.iter().enumerate() {
            for i in p.iter() {
                if i == j || i >= self.n {
                    return Err(Error::domain("invalid parent in encoding"));
                }
                bits.set(self.a_index(i, j), true);
            }
        }
        for i in 0..self.n {
            for j in i + 1..self.n {
                bits.set(self.r_index(i, j), pos[i] < pos[j]);
            }
        }
        Ok(bits)
    }

    /// Encodes a DAG with its smallest-index-first topological order.
    pub fn encode_dag(&self, dag: &Dag) -> Result<Bitstring> {
        self.encode(dag.parent_sets(), &dag.topological_order())
    }

    pub fn decode(&self, bits: Bitstring) -> Result<DecodedSolution> {
        if bits.len() != self.num_qubits() {
            return Err(Error::domain(format!(
                "bit string has {} bits, layout needs {}",
                bits.len(),
                self.num_qubits()
            )));
        }
        let n = self.n;
        let mut parents = vec![NodeSet::EMPTY; n];
        for i in 0..n {
            for (j, p) in parents.iter_mut().enumerate() {
                if i != j && bits.get(self.a_index(i, j)) {
                    *p = p.with(i);
                }
            }
        }
        let mut order = vec![vec![0u8; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                order[i][j] = bits.get(self.r_index(i, j)) as u8;
            }
        }
        let in_degrees = parents.iter().map(|p| p.len()).collect();
        Ok(DecodedSolution {
            parents,
            order,
            in_degrees,
        })
    }

    /// In-degrees (column sums of the adjacency block) straight from the bits.
    pub fn in_degrees(&self, bits: u64) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).map(move |j| {
            (0..self.n)
                .filter(|&i| i != j && bits >> self.a_index(i, j) & 1 == 1)
                .count()
        })
    }
}

/// Adjacency and order matrices recovered from a measured bit string.
#[derive(Clone, PartialEq, Eq)]
pub struct DecodedSolution {
    /// Parent set of each node; may describe a cyclic graph.
    pub parents: Vec<NodeSet>,
    /// Strict upper-triangular order bits `r_ij`.
    pub order: Vec<Vec<u8>>,
    /// `d_i = sum_j a_ji`.
    pub in_degrees: Vec<usize>,
}

impl DecodedSolution {
    pub fn num_nodes(&self) -> usize {
        self.parents.len()
    }

    pub fn adjacency(&self) -> Vec<Vec<u8>> {
        let n = self.num_nodes();
        (0..n)
            .map(|i| (0..n).map(|j| self.parents[j].contains(i) as u8).collect())
            .collect()
    }

    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut arcs: Vec<_> = self
            .parents
            .iter()
            .enumerate()
            .flat_map(|(j, p)| p.iter().map(move |i| (i, j)))
            .collect();
        arcs.sort_unstable();
        arcs
    }

    pub fn is_acyclic(&self) -> bool {
        is_acyclic(&self.parents)
    }

    pub fn to_dag(&self) -> Result<Dag> {
        Dag::from_parent_sets(self.parents.clone())
    }
}

impl fmt::Debug for DecodedSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DecodedSolution")
            .field("arcs", &self.arcs())
            .field("order", &self.order)
            .field("in_degrees", &self.in_degrees)
            .finish()
    }
}
