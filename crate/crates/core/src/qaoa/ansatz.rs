use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::exec;
use crate::qubo::IsingCoefficients;
use crate::sim::{GateOp, QubitCeiling, StateVector};
use crate::{Error, Result};

/// Layer angles `γ_1..γ_p` (cost) and `β_1..β_p` (mixer).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.len() != betas.len() || gammas.is_empty() {
            return Err(Error::domain(format!(
                "need p >= 1 gammas and as many betas, got {} and {}",
                gammas.len(),
                betas.len()
            )));
        }
        Ok(QaoaParams { gammas, betas })
    }

    /// Splits `[γ_1..γ_p, β_1..β_p]`.
    pub fn from_flat(x: &[f64]) -> Result<Self> {
        if x.len() % 2 != 0 {
            return Err(Error::domain("flat parameter vector must have even length"));
        }
        let p = x.len() / 2;
        QaoaParams::new(x[..p].to_vec(), x[p..].to_vec())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.betas).copied().collect()
    }

    pub fn layers(&self) -> usize {
        self.gammas.len()
    }

    /// Every angle reduced into `[0, 2π)`.
    pub fn wrapped(&self) -> Self {
        let w = |v: &Vec<f64>| v.iter().map(|x| wrap_angle(*x)).collect();
        QaoaParams {
            gammas: w(&self.gammas),
            betas: w(&self.betas),
        }
    }
}

pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// The `p`-layer circuit for a fixed Ising cost.
///
/// Gate schedule: a Hadamard on every qubit, then per layer `RZ(2γ h_k)` for
/// each nonzero field, `ZZ(2γ J_kl)` for each nonzero coupling and
/// `RX(2β)` on every qubit.
#[derive(Debug, Clone)]
pub struct AnsatzTemplate {
    num_qubits: usize,
    p: usize,
    ising: IsingCoefficients,
    ceiling: QubitCeiling,
    /// Ising energy minus its constant, per basis state.
    diagonal: Vec<f64>,
}

impl AnsatzTemplate {
    pub fn new(ising: IsingCoefficients, p: usize, ceiling: QubitCeiling) -> Result<Self> {
        if p == 0 {
            return Err(Error::domain("the ansatz needs at least one layer"));
        }
        let q = ising.num_spins;
        if q == 0 {
            return Err(Error::domain("the ansatz needs at least one qubit"));
        }
        ceiling.check(q)?;
        let ising_ref = &ising;
        let diagonal = exec::map_indexed(1usize << q, |x| ising_ref.energy(x as u64) - ising_ref.constant);
        Ok(AnsatzTemplate {
            num_qubits: q,
            p,
            ising,
            ceiling,
            diagonal,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn layers(&self) -> usize {
        self.p
    }

    pub fn num_params(&self) -> usize {
        2 * self.p
    }

    pub fn ising(&self) -> &IsingCoefficients {
        &self.ising
    }

    pub fn ceiling(&self) -> QubitCeiling {
        self.ceiling
    }

    pub fn gates_per_layer(&self) -> usize {
        self.ising.linear.len() + self.ising.quadratic.len() + self.num_qubits
    }

    fn check(&self, params: &QaoaParams) -> Result<()> {
        if params.layers() != self.p || params.betas.len() != self.p {
            return Err(Error::domain(format!(
                "expected {} gammas and betas, got {} and {}",
                self.p,
                params.gammas.len(),
                params.betas.len()
            )));
        }
        Ok(())
    }

    /// The full gate list with native `ZZ` rotations.
    pub fn circuit(&self, params: &QaoaParams) -> Result<Vec<GateOp>> {
        self.build(params, false)
    }

    /// The full gate list with each `ZZ` rotation expanded to `CNOT·RZ·CNOT`.
    pub fn circuit_decomposed(&self, params: &QaoaParams) -> Result<Vec<GateOp>> {
        self.build(params, true)
    }

    fn build(&self, params: &QaoaParams, decompose: bool) -> Result<Vec<GateOp>> {
        self.check(params)?;
        let q = self.num_qubits;
        let mut gates: Vec<GateOp> = (0..q).map(GateOp::Hadamard).collect();
        for (&gamma, &beta) in params.gammas.iter().zip(&params.betas) {
            for (&k, &h) in &self.ising.linear {
                gates.push(GateOp::RotZ(2.0 * gamma * h, k));
            }
            for (&(k, l), &j) in &self.ising.quadratic {
                if decompose {
                    gates.extend(GateOp::zz_decomposition(2.0 * gamma * j, k, l));
                } else {
                    gates.push(GateOp::ZZRot(2.0 * gamma * j, k, l));
                }
            }
            gates.extend((0..q).map(|k| GateOp::RotX(2.0 * beta, k)));
        }
        Ok(gates)
    }

    /// Final noiseless state, with each cost layer applied as one diagonal phase.
    pub fn prepare_state(&self, params: &QaoaParams) -> Result<StateVector> {
        self.check(params)?;
        let mut state = StateVector::uniform(self.num_qubits, self.ceiling)?;
        for (&gamma, &beta) in params.gammas.iter().zip(&params.betas) {
            state.apply_diagonal_phase(&self.diagonal, gamma)?;
            for k in 0..self.num_qubits {
                state.apply(&GateOp::RotX(2.0 * beta, k))?;
            }
        }
        Ok(state)
    }

    /// Final noiseless state by applying every gate of [`Self::circuit`].
    pub fn prepare_state_gatewise(&self, params: &QaoaParams) -> Result<StateVector> {
        let mut state = StateVector::zero(self.num_qubits, self.ceiling)?;
        for g in self.circuit(params)? {
            state.apply(&g)?;
        }
        Ok(state)
    }
}
