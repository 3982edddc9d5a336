use rand::seq::SliceRandom;
use rand::Rng;

use super::{BayesianNetwork, Dag, NodeSet, Variable};
use crate::seed;
use crate::Result;

/// A binary network on `n` nodes named `X0..`, with a random topological
/// order, each allowed arc present with probability 1/2 (at most
/// `max_parents` per node) and CPT rows whose larger entry lies in
/// `[0.65, 0.95]`.
pub fn random_network(n: usize, max_parents: usize, seed: u64) -> Result<BayesianNetwork> {
    let mut rng = seed::rng(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut parents = vec![NodeSet::EMPTY; n];
    for (pos, &child) in order.iter().enumerate() {
        let mut earlier: Vec<usize> = order[..pos].to_vec();
        earlier.shuffle(&mut rng);
        for p in earlier {
            if parents[child].len() < max_parents && rng.gen_bool(0.5) {
                parents[child] = parents[child].with(p);
            }
        }
    }
    let dag = Dag::from_parent_sets(parents)?;
    let variables: Vec<Variable> = (0..n).map(|i| Variable::with_cardinality(format!("X{i}"), 2)).collect();
    let cpts = (0..n)
        .map(|i| {
            (0..1usize << dag.in_degree(i))
                .map(|_| {
                    let hi = rng.gen_range(0.65..0.95);
                    if rng.gen_bool(0.5) {
                        vec![hi, 1.0 - hi]
                    } else {
                        vec![1.0 - hi, hi]
                    }
                })
                .collect()
        })
        .collect();
    BayesianNetwork::new(variables, dag, cpts)
}
