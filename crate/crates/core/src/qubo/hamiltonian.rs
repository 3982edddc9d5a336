use serde::{Deserialize, Serialize};

use super::{PseudoBooleanPolynomial, QubitLayout};
use crate::bn::{LocalScoreTable, NodeSet};
use crate::{Error, Result};

/// Penalty weights for the order and consistency constraints, and for the
/// classically evaluated in-degree bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Penalties {
    pub trans: f64,
    pub consist: f64,
    pub max_indegree: f64,
}

impl Penalties {
    pub fn uniform(delta: f64) -> Self {
        Penalties {
            trans: delta,
            consist: delta,
            max_indegree: delta,
        }
    }

    /// [`default_penalty`] applied to every weight.
    pub fn dominant(table: &LocalScoreTable) -> Self {
        Penalties::uniform(default_penalty(table))
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("trans", self.trans),
            ("consist", self.consist),
            ("max_indegree", self.max_indegree),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("penalty `{name}` must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// `2 n (max s - min s)`: large enough that no constraint violation can be
/// paid for by a better score.
pub fn default_penalty(table: &LocalScoreTable) -> f64 {
    let d = 2.0 * table.score_range() * table.num_nodes() as f64;
    if d > 0.0 {
        d
    } else {
        1.0
    }
}

/// Inclusion-exclusion weight `w_i(J) = sum_{K subset J} (-1)^{|J|-|K|} s_i(K)`.
pub fn score_weight(table: &LocalScoreTable, node: usize, parents: NodeSet) -> Result<f64> {
    if parents.len() > table.max_parents() {
        return Err(Error::domain(format!(
            "|J| = {} exceeds max in-degree {}",
            parents.len(),
            table.max_parents()
        )));
    }
    let mut w = 0.0;
    for k in parents.subsets() {
        let sign = if (parents.len() - k.len()) % 2 == 0 { 1.0 } else { -1.0 };
        w += sign * table.score(node, k)?;
    }
    Ok(w)
}

/// The three pieces of the Hamiltonian, kept apart for inspection.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianParts {
    pub layout: QubitLayout,
    /// Negated score polynomial: lower is better.
    pub score: PseudoBooleanPolynomial,
    pub trans: PseudoBooleanPolynomial,
    pub consist: PseudoBooleanPolynomial,
}

impl HamiltonianParts {
    pub fn penalty(&self) -> PseudoBooleanPolynomial {
        let mut p = self.trans.clone();
        p.add_scaled(&self.consist, 1.0).expect("same variable count");
        p
    }

    pub fn total(&self) -> PseudoBooleanPolynomial {
        let mut p = self.score.clone();
        p.add_scaled(&self.trans, 1.0).expect("same variable count");
        p.add_scaled(&self.consist, 1.0).expect("same variable count");
        p
    }
}

pub fn build_hamiltonian_parts(
    table: &LocalScoreTable,
    delta_trans: f64,
    delta_consist: f64,
) -> Result<HamiltonianParts> {
    Penalties {
        trans: delta_trans,
        consist: delta_consist,
        max_indegree: 1.0,
    }
    .validate()?;
    let n = table.num_nodes();
    let layout = QubitLayout::new(n)?;
    let v = layout.num_qubits();

    // -sum_i sum_J w_i(J) prod_{j in J} a_ji
    let mut score = PseudoBooleanPolynomial::new(v);
    for i in 0..n {
        for (j_set, _) in table.parent_sets(i) {
            let w = score_weight(table, i, j_set)?;
            let vars: Vec<usize> = j_set.iter().map(|j| layout.a_index(j, i)).collect();
            score.add_term(&vars, -w)?;
        }
    }

    let mut trans = PseudoBooleanPolynomial::new(v);
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (rij, rjk, rik) = (layout.r_index(i, j), layout.r_index(j, k), layout.r_index(i, k));
                trans.add_linear(rik, delta_trans);
                trans.add_quadratic(rij, rjk, delta_trans);
                trans.add_quadratic(rij, rik, -delta_trans);
                trans.add_quadratic(rjk, rik, -delta_trans);
            }
        }
    }

    let mut consist = PseudoBooleanPolynomial::new(v);
    for i in 0..n {
        for j in i + 1..n {
            let rij = layout.r_index(i, j);
            let (aij, aji) = (layout.a_index(i, j), layout.a_index(j, i));
            consist.add_quadratic(aji, rij, delta_consist);
            consist.add_linear(aij, delta_consist);
            consist.add_quadratic(aij, rij, -delta_consist);
        }
    }

    Ok(HamiltonianParts {
        layout,
        score,
        trans,
        consist,
    })
}

/// `H = H_score + H_trans + H_consist` over `3n(n-1)/2` binary variables.
pub fn build_hamiltonian(
    table: &LocalScoreTable,
    delta_trans: f64,
    delta_consist: f64,
) -> Result<PseudoBooleanPolynomial> {
    Ok(build_hamiltonian_parts(table, delta_trans, delta_consist)?.total())
}
