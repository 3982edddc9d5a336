//! Dense statevector simulation for the QAOA gate set, with shot sampling
//! and stochastic Kraus-channel noise.

mod gate;
mod histogram;
mod noise;
mod state;

pub use gate::{format_program, parse_program, GateOp};
pub use histogram::ShotHistogram;
pub use noise::{run_noisy_trajectory, Matrix2, NoiseChannel, NoiseKind, NoiseModel};
pub use state::{init_superposition, QubitCeiling, StateVector};

pub use num_complex::Complex64;
