use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use super::{GateOp, ShotHistogram};
use crate::{exec, seed, Bitstring, Error, Result};

/// Upper bound on register size.
///
/// The default of 24 qubits keeps a state at 256 MiB. 30 qubits (16 GiB)
/// are reachable only through [`QubitCeiling::overridden`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitCeiling(usize);

impl QubitCeiling {
    pub const DEFAULT: usize = 24;
    pub const OVERRIDE: usize = 30;

    pub fn overridden() -> Self {
        QubitCeiling(Self::OVERRIDE)
    }

    pub fn new(override_requested: bool) -> Self {
        if override_requested {
            Self::overridden()
        } else {
            Self::default()
        }
    }

    pub fn max_qubits(self) -> usize {
        self.0
    }

    pub fn check(self, num_qubits: usize) -> Result<()> {
        if num_qubits > self.0 {
            let hint = if self.0 < Self::OVERRIDE {
                " (pass the qubit-ceiling override to allow up to 30)"
            } else {
                ""
            };
            return Err(Error::ResourceGuard(format!(
                "{num_qubits} qubits exceed the ceiling of {}{hint}",
                self.0
            )));
        }
        Ok(())
    }
}

impl Default for QubitCeiling {
    fn default() -> Self {
        QubitCeiling(Self::DEFAULT)
    }
}

/// `2^q` complex amplitudes; basis index bit `k` is qubit `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

/// `H^{⊗q}|0⟩` under the default ceiling.
pub fn init_superposition(num_qubits: usize) -> Result<StateVector> {
    StateVector::uniform(num_qubits, QubitCeiling::default())
}

impl StateVector {
    /// `|0...0⟩`.
    pub fn zero(num_qubits: usize, ceiling: QubitCeiling) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::domain("a register needs at least one qubit"));
        }
        ceiling.check(num_qubits)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    /// Uniform superposition, every amplitude `2^{-q/2}`.
    pub fn uniform(num_qubits: usize, ceiling: QubitCeiling) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::domain("a register needs at least one qubit"));
        }
        ceiling.check(num_qubits)?;
        let a = (0.5f64).powf(num_qubits as f64 / 2.0);
        Ok(StateVector {
            num_qubits,
            amps: vec![Complex64::new(a, 0.0); 1 << num_qubits],
        })
    }

    pub fn basis(num_qubits: usize, index: u64, ceiling: QubitCeiling) -> Result<Self> {
        let mut s = Self::zero(num_qubits, ceiling)?;
        if index >= 1 << num_qubits {
            return Err(Error::domain("basis index out of range"));
        }
        s.amps[0] = Complex64::new(0.0, 0.0);
        s.amps[index as usize] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// Wraps raw amplitudes; the length must be a power of two. Not normalised.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() < 2 || !amps.len().is_power_of_two() {
            return Err(Error::domain("amplitude count must be a power of two >= 2"));
        }
        Ok(StateVector {
            num_qubits: amps.len().trailing_zeros() as usize,
            amps,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        let amps = &self.amps;
        exec::sum_indexed(amps.len(), |i| amps[i].norm_sqr())
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            let inv = 1.0 / n;
            exec::for_each_indexed_mut(&mut self.amps, |_, a| *a *= inv);
        }
    }

    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.num_qubits)?;
        match *gate {
            GateOp::Hadamard(q) => {
                let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                self.apply_single(q, [[h, h], [h, -h]]);
            }
            GateOp::RotX(t, q) => {
                let c = Complex64::new((t / 2.0).cos(), 0.0);
                let s = Complex64::new(0.0, -(t / 2.0).sin());
                self.apply_single(q, [[c, s], [s, c]]);
            }
            GateOp::RotZ(t, q) => {
                let p0 = Complex64::from_polar(1.0, -t / 2.0);
                let p1 = p0.conj();
                exec::for_each_indexed_mut(&mut self.amps, |i, a| {
                    *a *= if i >> q & 1 == 0 { p0 } else { p1 };
                });
            }
            GateOp::ZZRot(t, a, b) => {
                let same = Complex64::from_polar(1.0, -t / 2.0);
                let diff = same.conj();
                exec::for_each_indexed_mut(&mut self.amps, |i, x| {
                    *x *= if (i >> a ^ i >> b) & 1 == 0 { same } else { diff };
                });
            }
            GateOp::CNot { control, target } => {
                let stride = 1usize << target;
                exec::for_each_chunk_mut(&mut self.amps, stride << 1, |ci, chunk| {
                    let base = ci * (stride << 1);
                    let (lo, hi) = chunk.split_at_mut(stride);
                    for (o, (x, y)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                        if (base + o) >> control & 1 == 1 {
                            std::mem::swap(x, y);
                        }
                    }
                });
            }
        }
        Ok(())
    }

    /// Applies the 2x2 matrix `m` (row-major, basis `|0⟩, |1⟩`) to qubit `q`.
    /// `m` need not be unitary.
    pub fn apply_single(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let stride = 1usize << q;
        exec::for_each_chunk_mut(&mut self.amps, stride << 1, |_, chunk| {
            let (lo, hi) = chunk.split_at_mut(stride);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (a, b) = (*x, *y);
                *x = m[0][0] * a + m[0][1] * b;
                *y = m[1][0] * a + m[1][1] * b;
            }
        });
    }

    /// `‖M_q |ψ⟩‖²` for a 2x2 operator on qubit `q`, without modifying the state.
    pub fn single_norm_sqr(&self, q: usize, m: [[Complex64; 2]; 2]) -> f64 {
        let stride = 1usize << q;
        self.amps
            .chunks(stride << 1)
            .map(|chunk| {
                let (lo, hi) = chunk.split_at(stride);
                lo.iter()
                    .zip(hi)
                    .map(|(&a, &b)| (m[0][0] * a + m[0][1] * b).norm_sqr() + (m[1][0] * a + m[1][1] * b).norm_sqr())
                    .sum::<f64>()
            })
            .sum()
    }

    /// Multiplies amplitude `z` by `exp(-i·angle·diag[z])`.
    pub fn apply_diagonal_phase(&mut self, diag: &[f64], angle: f64) -> Result<()> {
        if diag.len() != self.amps.len() {
            return Err(Error::domain("diagonal length does not match the state"));
        }
        exec::for_each_indexed_mut(&mut self.amps, |i, a| {
            *a *= Complex64::from_polar(1.0, -angle * diag[i]);
        });
        Ok(())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `Σ_z |ψ_z|² cost(z)`.
    pub fn expectation<F>(&self, cost: F) -> f64
    where
        F: Fn(u64) -> f64 + Sync + Send,
    {
        let amps = &self.amps;
        exec::sum_indexed(amps.len(), |i| amps[i].norm_sqr() * cost(i as u64))
    }

    /// Fidelity `|⟨self|other⟩|²`, insensitive to global phase.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        let inner: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        inner.norm_sqr()
    }

    /// Draws one basis index from `|ψ_z|²`.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let total = self.norm_sqr();
        let mut u = rng.gen::<f64>() * total;
        for (i, a) in self.amps.iter().enumerate() {
            u -= a.norm_sqr();
            if u < 0.0 {
                return i as u64;
            }
        }
        self.amps.iter().rposition(|a| a.norm_sqr() > 0.0).unwrap_or(0) as u64
    }

    /// `t` independent measurements of every qubit, deterministic given `seed`.
    pub fn sample(&self, shots: u64, seed: u64) -> Result<ShotHistogram> {
        if shots == 0 {
            return Err(Error::domain("at least one shot required"));
        }
        let mut cdf = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        let last_nonzero = self.amps.iter().rposition(|a| a.norm_sqr() > 0.0).unwrap_or(0);
        let mut rng = seed::rng(seed);
        let mut hist = ShotHistogram::new(self.num_qubits);
        for _ in 0..shots {
            let u = rng.gen::<f64>() * acc;
            let idx = cdf.partition_point(|&c| c <= u).min(last_nonzero);
            hist.record(Bitstring::new(self.num_qubits, idx as u64)?, 1)?;
        }
        Ok(hist)
    }
}
