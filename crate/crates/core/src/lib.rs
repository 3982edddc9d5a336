//! Score-based Bayesian network structure learning, compiled to a
//! pseudo-Boolean Hamiltonian and solved with a simulated QAOA.
//!
//! The crate is organised bottom-up:
//!
//! * [`bn`] holds the data model (datasets, DAGs, networks), decomposable
//!   scores, forward sampling and graph metrics.
//! * [`qubo`] compiles a local score table into a quadratic pseudo-Boolean
//!   polynomial over adjacency and order qubits and maps it to Ising form.
//! * [`sim`] is a dense statevector simulator with the gate set the ansatz
//!   needs plus Kraus-channel noise trajectories.
//! * [`qaoa`] builds the layered ansatz, evaluates the CVaR objective and
//!   drives a COBYLA loop.
//! * [`baselines`] has hill climbing, tabu search and simulated annealing.
//!
//! Data-parallel loops go through [`exec`], which uses rayon when the
//! `parallel` feature is enabled and plain iterators otherwise.

pub mod baselines;
mod bitstring;
pub mod bn;
mod error;
pub mod exec;
pub mod qaoa;
pub mod qubo;
pub mod seed;
pub mod sim;

pub use bitstring::Bitstring;
pub use error::{Error, Result};
