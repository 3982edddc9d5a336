//! Bayesian network data model, decomposable scores, forward sampling and
//! structure metrics.

mod dataset;
mod graph;
mod network;
mod nodeset;
mod random;
mod score;

pub use dataset::{DiscreteDataset, Variable};
pub use graph::{count_dags, is_acyclic, markov_equivalent, shd, v_structures, Dag};
pub use network::{BayesianNetwork, Cpt};
pub use nodeset::NodeSet;
pub use random::random_network;
pub use score::{
    build_score_table, exhaustive_best_dag, local_score, score_dag, LocalScoreTable, ScoreKind,
    DEFAULT_BDEU_ESS, MAX_EXHAUSTIVE_NODES,
};
