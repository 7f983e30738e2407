//! Exact dense statevector simulation.
//!
//! The simulator owns one amplitude vector per run and applies gates as
//! exact complex arithmetic: elementary single-qubit gates with arbitrary
//! (positive or negative) control sets, two-qubit phase coupling and swap,
//! dense unitaries over a whole register, and the Fourier transform pair.
//! Measurement is replaced by exact post-selection since every amplitude
//! is available.
//!
//! Qubit order is fixed: registers S, A, B, C, I from most to least
//! significant index bit, and qubit k of a register carries place value
//! 2^k of that register's integer reading.

mod layout;
mod state;
mod trace;

pub use layout::{Register, RegisterLayout, MAX_QUBITS, REGISTERS};
pub use state::{unitarity_deviation, Control, Statevector, POSTSELECT_FLOOR};
pub use trace::{GateRecord, GateTrace};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QsimError {
    #[error("invalid register layout: {0}")]
    InvalidLayout(String),
    #[error("invalid simulator input: {0}")]
    InvalidInput(String),
    #[error("input vector norm {norm} is not 1 within 1e-9")]
    NotNormalized { norm: f64 },
    #[error("matrix is not unitary (max Gram deviation {deviation:.3e})")]
    NonUnitary { deviation: f64 },
    #[error("post-selection branch has probability {probability:.3e}, below the floor")]
    ZeroProbabilityBranch { probability: f64 },
}
