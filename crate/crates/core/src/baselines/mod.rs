//! Classical comparison methods: greedy and tabu search over DAGs, and
//! simulated annealing on the structure QUBO.

mod anneal;
mod search;

pub use anneal::{anneal_restarts, simulated_annealing_from, simulated_annealing_qubo, AnnealOutcome, AnnealSchedule, SA_LABEL};
pub use search::{hill_climb, tabu_search, MoveKind, SearchMove, SearchOutcome, DEFAULT_MAX_STALL, DEFAULT_TENURE};
