//! Quantum eigenvalue-inversion solver for the regularized system.
//!
//! The circuit solves Ξσ̃ = γ by phase estimation over a calibrated
//! integer spectrum, a controlled rotation that writes each eigenvalue's
//! reciprocal into an ancilla amplitude, and uncomputation:
//!
//! 1. Calibration rescales the spectrum by 2^{(n_c−n_λ)} so every value
//!    λ̃_j is a small positive integer; their least common multiple N_a
//!    and divisors l_j = N_a/λ̃_j size the reciprocal register.
//! 2. Phase estimation writes λ̃_j exactly onto the clock register for
//!    each eigenbranch of the input.
//! 3. The rotation loads l_j into register A keyed on the clock, runs an
//!    interference identity through register B that vanishes exactly on
//!    the l_j·λ̃_j = N_a constraint, and rotates the ancilla S by
//!    2·l_j/N_sa so its |1⟩ amplitude is sin(l_j/N_sa) ∝ 1/λ̃_j up to
//!    the documented linearization error.
//! 4. Uncomputation restores A, B, and C; post-selecting S = |1⟩ leaves
//!    the input register pointing along Ξ⁻¹γ, and the exact success
//!    probability recovers the solution's norm.

mod calibration;
mod circuit;

pub use calibration::{
    calibrate_spectrum, generalized_params, CalibrationError, HhlParams, RotationMode,
    DEFAULT_N_SA_MULTIPLIER, INTEGRALITY_TOL,
};
pub use circuit::{input_register_width, HhlOutcome, HhlSolver, P1_FLOOR};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HhlError {
    #[error(transparent)]
    Calibration(#[from] CalibrationError),
    #[error(transparent)]
    Simulator(#[from] crate::qsim::QsimError),
    #[error(transparent)]
    Solver(#[from] crate::solvers::SolverError),
    #[error("circuit construction failed: {0}")]
    Construction(String),
    #[error("right-hand side is zero")]
    ZeroRhs,
    #[error("success probability {p1:.3e} is below the 1e-12 floor")]
    DegenerateSystem { p1: f64 },
}

/// Calibrates a system and solves it in one call with default settings.
pub fn solve_system(
    sys: &crate::solvers::RegularizedSystem,
    qubit_budget: usize,
) -> Result<HhlOutcome, HhlError> {
    HhlSolver::calibrated(sys.clone(), qubit_budget, None)?.solve()
}
