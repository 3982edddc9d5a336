use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{GateOp, QubitCeiling, StateVector};
use crate::{seed, Error, Result};

pub type Matrix2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

const PAULI_X: Matrix2 = [[ZERO, ONE], [ONE, ZERO]];
const PAULI_Y: Matrix2 = [[ZERO, Complex64::new(0.0, -1.0)], [I, ZERO]];
const PAULI_Z: Matrix2 = [[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    AmplitudeDamping,
    PhaseDamping,
    Depolarizing,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 3] = [
        NoiseKind::AmplitudeDamping,
        NoiseKind::PhaseDamping,
        NoiseKind::Depolarizing,
    ];

    pub fn label(self) -> &'static str {
        match self {
            NoiseKind::AmplitudeDamping => "amplitude-damping",
            NoiseKind::PhaseDamping => "phase-damping",
            NoiseKind::Depolarizing => "depolarizing",
        }
    }

    /// Damping channels follow one-qubit gates, depolarisation two-qubit gates.
    pub fn follows_two_qubit_gates(self) -> bool {
        self == NoiseKind::Depolarizing
    }
}

impl std::str::FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NoiseKind::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| Error::parse(format!("unknown noise kind `{s}`")))
    }
}

/// A single-qubit noise channel of strength `omega` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseChannel {
    pub kind: NoiseKind,
    pub omega: f64,
}

impl NoiseChannel {
    pub fn new(kind: NoiseKind, omega: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&omega) {
            return Err(Error::domain(format!("noise strength {omega} outside [0, 1]")));
        }
        Ok(NoiseChannel { kind, omega })
    }

    /// Kraus operators of the single-qubit channel.
    pub fn kraus(&self) -> Vec<Matrix2> {
        let w = self.omega;
        let r = |x: f64| Complex64::new(x, 0.0);
        match self.kind {
            NoiseKind::AmplitudeDamping => vec![
                [[ONE, ZERO], [ZERO, r((1.0 - w).sqrt())]],
                [[ZERO, r(w.sqrt())], [ZERO, ZERO]],
            ],
            NoiseKind::PhaseDamping => vec![
                [[ONE, ZERO], [ZERO, r((1.0 - w).sqrt())]],
                [[ZERO, ZERO], [ZERO, r(w.sqrt())]],
            ],
            NoiseKind::Depolarizing => {
                let id = r((1.0 - w).sqrt());
                let p = (w / 3.0).sqrt();
                let scale = |m: Matrix2| m.map(|row| row.map(|x| x * p));
                vec![
                    [[id, ZERO], [ZERO, id]],
                    scale(PAULI_X),
                    scale(PAULI_Y),
                    scale(PAULI_Z),
                ]
            }
        }
    }

    /// `max |(Σ K†K - I)_{ab}|`.
    pub fn completeness_error(&self) -> f64 {
        let mut sum = [[ZERO; 2]; 2];
        for k in self.kraus() {
            for a in 0..2 {
                for b in 0..2 {
                    sum[a][b] += k[0][a].conj() * k[0][b] + k[1][a].conj() * k[1][b];
                }
            }
        }
        let mut err: f64 = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                let id = if a == b { ONE } else { ZERO };
                err = err.max((sum[a][b] - id).norm());
            }
        }
        err
    }

    /// Applies one randomly chosen Kraus branch to `qubit`, with branch `k`
    /// drawn with probability `‖K_k|ψ⟩‖²`, then renormalises.
    pub fn apply<R: Rng + ?Sized>(&self, state: &mut StateVector, qubit: usize, rng: &mut R) {
        if self.omega == 0.0 {
            return;
        }
        let ops = self.kraus();
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut chosen = ops.len() - 1;
        let mut chosen_p = None;
        // the last branch takes the remaining probability mass
        for (k, op) in ops.iter().enumerate().take(ops.len() - 1) {
            let p = state.single_norm_sqr(qubit, *op);
            acc += p;
            if u < acc {
                chosen = k;
                chosen_p = Some(p);
                break;
            }
        }
        state.apply_single(qubit, ops[chosen]);
        match chosen_p {
            Some(p) if p > 0.0 => {
                let inv = 1.0 / p.sqrt();
                state.amplitudes_mut().iter_mut().for_each(|a| *a *= inv);
            }
            _ => state.normalize(),
        }
    }

    /// Two-qubit depolarisation: with probability `omega`, an independent
    /// uniformly random Pauli on each target.
    pub fn apply_pair<R: Rng + ?Sized>(&self, state: &mut StateVector, a: usize, b: usize, rng: &mut R) {
        if self.omega == 0.0 {
            return;
        }
        if rng.gen::<f64>() < self.omega {
            for q in [a, b] {
                let pauli = [PAULI_X, PAULI_Y, PAULI_Z][rng.gen_range(0..3)];
                state.apply_single(q, pauli);
            }
        }
    }
}

/// Which channels follow which gates during a trajectory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub channels: Vec<NoiseChannel>,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        NoiseModel::default()
    }

    pub fn single(channel: NoiseChannel) -> Self {
        NoiseModel {
            channels: vec![channel],
        }
    }

    pub fn is_noiseless(&self) -> bool {
        self.channels.iter().all(|c| c.omega == 0.0)
    }

    /// Noise following `gate`: damping on each one-qubit gate's qubit,
    /// depolarisation on both targets of each two-qubit gate.
    pub fn after_gate<R: Rng + ?Sized>(&self, state: &mut StateVector, gate: &GateOp, rng: &mut R) {
        for ch in &self.channels {
            match (gate.is_two_qubit(), ch.kind.follows_two_qubit_gates()) {
                (false, false) => ch.apply(state, gate.qubits()[0], rng),
                (true, true) => {
                    let q = gate.qubits();
                    ch.apply_pair(state, q[0], q[1], rng);
                }
                _ => {}
            }
        }
    }
}

/// Runs `gates` from `|0...0⟩`, interleaving stochastic noise after each gate.
pub fn run_noisy_trajectory(
    num_qubits: usize,
    gates: &[GateOp],
    noise: &NoiseModel,
    seed: u64,
    ceiling: QubitCeiling,
) -> Result<StateVector> {
    let mut state = StateVector::zero(num_qubits, ceiling)?;
    let mut rng = seed::rng(seed);
    for g in gates {
        state.apply(g)?;
        noise.after_gate(&mut state, g, &mut rng);
    }
    Ok(state)
}
