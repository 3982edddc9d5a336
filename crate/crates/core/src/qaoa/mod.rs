//! The QAOA ansatz, its CVaR objective and the variational loop.

mod ansatz;
pub mod cobyla;
mod objective;
mod optimize;

pub use ansatz::{wrap_angle, AnsatzTemplate, QaoaParams};
pub use cobyla::{CobylaConfig, CobylaOutcome};
pub use objective::{
    cvar, cvar_count, evaluate_objective, expectation, penalized_cost, sample_circuit, solution_entropy, Evaluation,
    ObjectiveConfig, PenalizedCost,
};
pub use optimize::{optimize, optimize_restarts, QaoaResult, RestartSummary};
