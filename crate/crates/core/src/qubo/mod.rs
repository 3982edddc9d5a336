//! Compilation of a local score table into a quadratic pseudo-Boolean
//! Hamiltonian over adjacency and order qubits, and its Ising image.

mod hamiltonian;
mod ising;
mod layout;
mod polynomial;

pub use hamiltonian::{
    build_hamiltonian, build_hamiltonian_parts, default_penalty, score_weight, HamiltonianParts,
    Penalties,
};
pub use ising::{to_ising, IsingCoefficients};
pub use layout::{DecodedSolution, QubitLayout};
pub use polynomial::{CompiledPolynomial, Monomial, PseudoBooleanPolynomial, MAX_BRUTE_FORCE_VARS};
