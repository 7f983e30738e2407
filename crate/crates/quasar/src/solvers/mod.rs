//! Classical solvers for the regularized imaging system.
//!
//! The sparse scene estimate comes from the Hermitian positive-definite
//! system Ξσ = γ with Ξ = ηΦᴴΦ + λ₀I and γ = ΦᴴY. This module builds that
//! system (with its eigendecomposition, which the quantum solver also
//! needs), solves it directly, runs the greedy orthogonal matching pursuit
//! baseline, and provides the sparsification and error metrics shared by
//! every reconstruction path.

mod greedy;
mod metrics;
mod system;

pub use greedy::{omp, restricted_least_squares, top_k, MethodTag, RecoveryResult};
pub use metrics::{fidelity, rmse, row_sparsity};
pub use system::{build_regularized_system, direct_solve, RegularizedSystem};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("input contains non-finite values")]
    NonFinite,
    #[error("invalid solver input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("solve residual {residual:.3e} exceeds the conditioning threshold {threshold:.1e}")]
    IllConditioned { residual: f64, threshold: f64 },
    #[error("reference vector has zero norm")]
    ZeroReference,
}
