//! Discrete Bayesian networks and their TOML file format.
//!
//! ```toml
//! arcs = [["Smoker", "Cancer"]]   # top-level keys precede the tables
//!
//! [[nodes]]
//! name = "Smoker"
//! states = ["False", "True"]
//!
//! [[nodes]]
//! name = "Cancer"
//! states = ["False", "True"]
//!
//! [[cpts]]
//! node = "Smoker"
//! rows = [{ given = [], probs = [0.7, 0.3] }]
//!
//! [[cpts]]
//! node = "Cancer"
//! parents = ["Smoker"]            # order of the `given` tuples
//! rows = [
//!   { given = ["False"], probs = [0.99, 0.01] },
//!   { given = ["True"],  probs = [0.90, 0.10] },
//! ]
//! ```
//!
//! Every parent-state combination must appear exactly once and each row
//! must sum to 1 within 1e-6 (rows are renormalised on load).

use std::collections::HashMap;
use std::path::Path;

use rand::Rng;
use serde::Deserialize;

use super::{Dag, DiscreteDataset, NodeSet, Variable};
use crate::{seed, Error, Result};

const ROW_SUM_TOLERANCE: f64 = 1e-6;

/// Conditional probability table of one node.
///
/// Rows are indexed by the joint parent state in mixed radix over the
/// parents in ascending node order, last parent varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    parents: Vec<usize>,
    rows: Vec<Vec<f64>>,
}

impl Cpt {
    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, index: usize) -> &[f64] {
        &self.rows[index]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BayesianNetwork {
    variables: Vec<Variable>,
    dag: Dag,
    cpts: Vec<Cpt>,
}

impl BayesianNetwork {
    /// Assembles a network. `cpts[i]` rows follow [`Cpt`]'s indexing for the
    /// parents of `i` in `dag`.
    pub fn new(variables: Vec<Variable>, dag: Dag, cpt_rows: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let n = variables.len();
        if dag.num_nodes() != n || cpt_rows.len() != n {
            return Err(Error::domain("variables, graph and CPTs disagree on node count"));
        }
        let mut cpts = Vec::with_capacity(n);
        for (i, rows) in cpt_rows.into_iter().enumerate() {
            let parents: Vec<usize> = dag.parents(i).iter().collect();
            let expected: usize = parents.iter().map(|&p| variables[p].cardinality()).product();
            if rows.len() != expected {
                return Err(Error::domain(format!(
                    "CPT of `{}` has {} rows, expected {expected}",
                    variables[i].name,
                    rows.len()
                )));
            }
            let mut normalised = Vec::with_capacity(rows.len());
            for row in rows {
                if row.len() != variables[i].cardinality() {
                    return Err(Error::domain(format!(
                        "CPT row of `{}` has {} entries, expected {}",
                        variables[i].name,
                        row.len(),
                        variables[i].cardinality()
                    )));
                }
                if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                    return Err(Error::domain(format!(
                        "CPT of `{}` has a probability outside [0, 1]",
                        variables[i].name
                    )));
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                    return Err(Error::domain(format!(
                        "CPT row of `{}` sums to {sum}",
                        variables[i].name
                    )));
                }
                normalised.push(row.iter().map(|p| p / sum).collect());
            }
            cpts.push(Cpt {
                parents,
                rows: normalised,
            });
        }
        Ok(BayesianNetwork {
            variables,
            dag,
            cpts,
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: NetworkFile = toml::from_str(text)?;
        file.into_network()
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn num_nodes(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn cpt(&self, i: usize) -> &Cpt {
        &self.cpts[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    /// Probabilistic logic sampling: every row is drawn ancestrally in
    /// topological order. Reproducible for a fixed seed.
    pub fn forward_sample(&self, rows: usize, seed: u64) -> Result<DiscreteDataset> {
        if rows == 0 {
            return Err(Error::domain("sample size must be at least 1"));
        }
        let order = self.dag.topological_order();
        let n = self.num_nodes();
        let mut rng = seed::rng(seed);
        let mut columns = vec![Vec::with_capacity(rows); n];
        let mut state = vec![0usize; n];
        for _ in 0..rows {
            for &i in &order {
                let cpt = &self.cpts[i];
                let j = cpt
                    .parents
                    .iter()
                    .fold(0, |j, &p| j * self.variables[p].cardinality() + state[p]);
                state[i] = draw(cpt.row(j), rng.gen::<f64>());
            }
            for (col, &s) in columns.iter_mut().zip(&state) {
                col.push(s as u16);
            }
        }
        DiscreteDataset::from_columns(self.variables.clone(), columns)
    }
}

fn draw(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (k, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    // u landed in the rounding gap above the last cumulative sum
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    #[serde(default)]
    arcs: Vec<(String, String)>,
    nodes: Vec<NodeEntry>,
    cpts: Vec<CptEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeEntry {
    name: String,
    states: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CptEntry {
    node: String,
    #[serde(default)]
    parents: Vec<String>,
    rows: Vec<CptRow>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CptRow {
    #[serde(default)]
    given: Vec<String>,
    probs: Vec<f64>,
}

impl NetworkFile {
    fn into_network(self) -> Result<BayesianNetwork> {
        let variables: Vec<Variable> = self
            .nodes
            .into_iter()
            .map(|n| Variable::new(n.name, n.states))
            .collect();
        let index: HashMap<&str, usize> = variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.name.as_str(), i))
            .collect();
        if index.len() != variables.len() {
            return Err(Error::parse("duplicate node name"));
        }
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::parse(format!("unknown node `{name}`")))
        };
        let mut arcs = Vec::with_capacity(self.arcs.len());
        for (a, b) in &self.arcs {
            arcs.push((lookup(a)?, lookup(b)?));
        }
        let dag = Dag::from_arcs(variables.len(), &arcs)?;

        let mut tables: Vec<Option<Vec<Vec<f64>>>> = vec![None; variables.len()];
        for entry in self.cpts {
            let i = lookup(&entry.node)?;
            if tables[i].is_some() {
                return Err(Error::parse(format!("duplicate CPT for `{}`", entry.node)));
            }
            let listed: Vec<usize> = entry
                .parents
                .iter()
                .map(|p| lookup(p))
                .collect::<Result<_>>()?;
            if listed.iter().copied().collect::<NodeSet>() != dag.parents(i)
                || listed.len() != dag.in_degree(i)
            {
                return Err(Error::parse(format!(
                    "CPT parents of `{}` do not match its arcs",
                    entry.node
                )));
            }
            // canonical order: ascending node index
            let canonical: Vec<usize> = dag.parents(i).iter().collect();
            let rows_needed: usize = canonical.iter().map(|&p| variables[p].cardinality()).product();
            let mut rows: Vec<Option<Vec<f64>>> = vec![None; rows_needed];
            for row in entry.rows {
                if row.given.len() != listed.len() {
                    return Err(Error::parse(format!(
                        "CPT row of `{}` gives {} parent states, expected {}",
                        entry.node,
                        row.given.len(),
                        listed.len()
                    )));
                }
                let mut state_of = HashMap::new();
                for (&p, label) in listed.iter().zip(&row.given) {
                    let k = variables[p].states.iter().position(|s| s == label).ok_or_else(|| {
                        Error::parse(format!("unknown state `{label}` of `{}`", variables[p].name))
                    })?;
                    state_of.insert(p, k);
                }
                let j = canonical
                    .iter()
                    .fold(0, |j, p| j * variables[*p].cardinality() + state_of[p]);
                if rows[j].replace(row.probs).is_some() {
                    return Err(Error::parse(format!(
                        "CPT of `{}` repeats a parent configuration",
                        entry.node
                    )));
                }
            }
            let rows = rows
                .into_iter()
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| {
                    Error::parse(format!("CPT of `{}` misses a parent configuration", entry.node))
                })?;
            tables[i] = Some(rows);
        }
        let cpts = tables
            .into_iter()
            .enumerate()
            .map(|(i, t)| t.ok_or_else(|| Error::parse(format!("no CPT for `{}`", variables[i].name))))
            .collect::<Result<Vec<_>>>()?;
        BayesianNetwork::new(variables, dag, cpts)
    }
}
