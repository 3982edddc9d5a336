use std::collections::VecDeque;
use std::fmt;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::bn::{Dag, LocalScoreTable, NodeSet};
use crate::seed::{self, stream, Rng};
use crate::Result;

pub const DEFAULT_TENURE: usize = 10;
pub const DEFAULT_MAX_STALL: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MoveKind {
    AddArc,
    RemoveArc,
    ReverseArc,
}

/// An arc edit on `from -> to` (for a reversal, the arc before reversing).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SearchMove {
    pub kind: MoveKind,
    pub from: usize,
    pub to: usize,
}

impl SearchMove {
    /// The move that undoes this one.
    pub fn inverse(self) -> SearchMove {
        match self.kind {
            MoveKind::AddArc => SearchMove {
                kind: MoveKind::RemoveArc,
                ..self
            },
            MoveKind::RemoveArc => SearchMove {
                kind: MoveKind::AddArc,
                ..self
            },
            MoveKind::ReverseArc => SearchMove {
                kind: MoveKind::ReverseArc,
                from: self.to,
                to: self.from,
            },
        }
    }
}

impl fmt::Display for SearchMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verb = match self.kind {
            MoveKind::AddArc => "add",
            MoveKind::RemoveArc => "remove",
            MoveKind::ReverseArc => "reverse",
        };
        write!(f, "{verb} {}->{}", self.from, self.to)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub dag: Dag,
    pub score: f64,
    /// Moves applied, in order.
    pub moves: Vec<SearchMove>,
    /// Current score after each move.
    pub trace: Vec<f64>,
}

struct State<'a> {
    table: &'a LocalScoreTable,
    limit: usize,
    parents: Vec<NodeSet>,
    local: Vec<f64>,
}

impl<'a> State<'a> {
    fn empty(table: &'a LocalScoreTable, max_indegree: usize) -> Result<Self> {
        let n = table.num_nodes();
        let local = (0..n).map(|i| table.score(i, NodeSet::EMPTY)).collect::<Result<_>>()?;
        Ok(State {
            table,
            limit: max_indegree.min(table.max_parents()),
            parents: vec![NodeSet::EMPTY; n],
            local,
        })
    }

    fn from_dag(table: &'a LocalScoreTable, max_indegree: usize, dag: &Dag) -> Result<Self> {
        let local = (0..dag.num_nodes())
            .map(|i| table.score(i, dag.parents(i)))
            .collect::<Result<_>>()?;
        Ok(State {
            table,
            limit: max_indegree.min(table.max_parents()),
            parents: dag.parent_sets().to_vec(),
            local,
        })
    }

    fn total(&self) -> f64 {
        self.local.iter().sum()
    }

    /// `reach[v]` = nodes reachable from `v` along arcs.
    fn reachability(&self) -> Vec<NodeSet> {
        let n = self.parents.len();
        let mut children = vec![NodeSet::EMPTY; n];
        for (c, pa) in self.parents.iter().enumerate() {
            for p in pa.iter() {
                children[p] = children[p].with(c);
            }
        }
        (0..n)
            .map(|v| {
                let mut seen = NodeSet::EMPTY;
                let mut stack = vec![v];
                while let Some(u) = stack.pop() {
                    for c in children[u].iter() {
                        if !seen.contains(c) {
                            seen = seen.with(c);
                            stack.push(c);
                        }
                    }
                }
                seen
            })
            .collect()
    }

    fn score_of(&self, node: usize, parents: NodeSet) -> f64 {
        self.table.get(node, parents).unwrap_or(f64::NEG_INFINITY)
    }

    /// Every legal move with its score change, in a fixed order.
    fn moves(&self) -> Vec<(SearchMove, f64)> {
        let n = self.parents.len();
        let reach = self.reachability();
        let mut out = Vec::new();
        for from in 0..n {
            for to in 0..n {
                if from == to {
                    continue;
                }
                let pa_to = self.parents[to];
                if pa_to.contains(from) {
                    let removed = pa_to.without(from);
                    out.push((
                        SearchMove {
                            kind: MoveKind::RemoveArc,
                            from,
                            to,
                        },
                        self.score_of(to, removed) - self.local[to],
                    ));
                    // reversing creates a cycle iff another path from -> to exists
                    let pa_from = self.parents[from];
                    if pa_from.len() < self.limit && !self.other_path(from, to) {
                        let delta = self.score_of(to, removed) - self.local[to]
                            + self.score_of(from, pa_from.with(to))
                            - self.local[from];
                        out.push((
                            SearchMove {
                                kind: MoveKind::ReverseArc,
                                from,
                                to,
                            },
                            delta,
                        ));
                    }
                } else if !self.parents[from].contains(to) && pa_to.len() < self.limit && !reach[to].contains(from) {
                    out.push((
                        SearchMove {
                            kind: MoveKind::AddArc,
                            from,
                            to,
                        },
                        self.score_of(to, pa_to.with(from)) - self.local[to],
                    ));
                }
            }
        }
        out
    }

    /// A directed path `from -> ... -> to` avoiding the direct arc.
    fn other_path(&self, from: usize, to: usize) -> bool {
        let n = self.parents.len();
        let mut seen = NodeSet::EMPTY;
        let mut stack: Vec<usize> = (0..n)
            .filter(|&c| c != to && self.parents[c].contains(from))
            .collect();
        while let Some(u) = stack.pop() {
            if u == to {
                return true;
            }
            if seen.contains(u) {
                continue;
            }
            seen = seen.with(u);
            for c in 0..n {
                if self.parents[c].contains(u) && !seen.contains(c) {
                    stack.push(c);
                }
            }
        }
        false
    }

    fn apply(&mut self, mv: SearchMove) {
        apply_to(&mut self.parents, mv);
        for v in [mv.from, mv.to] {
            self.local[v] = self.score_of(v, self.parents[v]);
        }
    }

    fn dag(&self) -> Dag {
        Dag::from_parent_sets(self.parents.clone()).expect("search keeps the graph acyclic")
    }
}

fn apply_to(parents: &mut [NodeSet], mv: SearchMove) {
    let SearchMove { kind, from, to } = mv;
    match kind {
        MoveKind::AddArc => parents[to] = parents[to].with(from),
        MoveKind::RemoveArc => parents[to] = parents[to].without(from),
        MoveKind::ReverseArc => {
            parents[to] = parents[to].without(from);
            parents[from] = parents[from].with(to);
        }
    }
}

fn tolerance(score: f64) -> f64 {
    1e-10 * (1.0 + score.abs())
}

/// Best candidate by delta, ties broken uniformly at random.
fn pick(cands: &[(SearchMove, f64)], rng: &mut Rng) -> Option<(SearchMove, f64)> {
    let best = cands.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    if !best.is_finite() {
        return None;
    }
    let tol = 1e-12 * (1.0 + best.abs());
    let tied: Vec<&(SearchMove, f64)> = cands.iter().filter(|c| best - c.1 <= tol).collect();
    let k = if tied.len() > 1 { rng.gen_range(0..tied.len()) } else { 0 };
    Some(*tied[k])
}

fn climb(state: &mut State<'_>, rng: &mut Rng, moves: &mut Vec<SearchMove>, trace: &mut Vec<f64>) {
    loop {
        let total = state.total();
        let cands = state.moves();
        let Some((mv, delta)) = pick(&cands, rng) else { break };
        if delta <= tolerance(total) {
            break;
        }
        state.apply(mv);
        moves.push(mv);
        trace.push(state.total());
    }
}

/// Greedy ascent from the empty graph over arc additions, removals and
/// reversals, keeping every graph acyclic with in-degree at most
/// `max_indegree`.
pub fn hill_climb(table: &LocalScoreTable, max_indegree: usize, seed: u64) -> Result<SearchOutcome> {
    let mut state = State::empty(table, max_indegree)?;
    let mut rng = seed::rng(seed::derive(seed, stream::TIE, 0));
    let mut moves = Vec::new();
    let mut trace = Vec::new();
    climb(&mut state, &mut rng, &mut moves, &mut trace);
    Ok(SearchOutcome {
        score: state.total(),
        dag: state.dag(),
        moves,
        trace,
    })
}

/// Hill climbing followed by a tabu phase: the best non-tabu move is always
/// taken, and the search stops after `max_stall` steps without a new best
/// graph. A move is tabu if it undoes one of the last `tenure` moves or
/// leads back to one of the last `tenure` graphs visited.
pub fn tabu_search(
    table: &LocalScoreTable,
    max_indegree: usize,
    tenure: usize,
    max_stall: usize,
    seed: u64,
) -> Result<SearchOutcome> {
    if tenure == 0 {
        return Err(crate::Error::domain("tabu tenure must be at least 1"));
    }
    let start = hill_climb(table, max_indegree, seed)?;
    let mut state = State::from_dag(table, max_indegree, &start.dag)?;
    let mut moves = start.moves;
    let mut trace = start.trace;
    let mut best = (start.dag, start.score);
    let mut recent: VecDeque<SearchMove> = moves.iter().rev().take(tenure).rev().copied().collect();
    let mut visited: VecDeque<Vec<NodeSet>> = VecDeque::from([state.parents.clone()]);
    let mut rng = seed::rng(seed::derive(seed, stream::TIE, 1));
    let mut stall = 0;
    while stall < max_stall {
        let cands: Vec<(SearchMove, f64)> = state
            .moves()
            .into_iter()
            .filter(|(mv, _)| !recent.iter().any(|r| r.inverse() == *mv))
            .filter(|(mv, _)| {
                let mut next = state.parents.clone();
                apply_to(&mut next, *mv);
                !visited.contains(&next)
            })
            .collect();
        let Some((mv, _)) = pick(&cands, &mut rng) else { break };
        state.apply(mv);
        moves.push(mv);
        let total = state.total();
        trace.push(total);
        recent.push_back(mv);
        if recent.len() > tenure {
            recent.pop_front();
        }
        visited.push_back(state.parents.clone());
        if visited.len() > tenure {
            visited.pop_front();
        }
        if total > best.1 + tolerance(best.1) {
            best = (state.dag(), total);
            stall = 0;
        } else {
            stall += 1;
        }
    }
    Ok(SearchOutcome {
        dag: best.0,
        score: best.1,
        moves,
        trace,
    })
}
