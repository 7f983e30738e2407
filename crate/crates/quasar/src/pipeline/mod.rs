//! End-to-end orchestration: quantum sparse reconstruction, a classical
//! shadow path for cross-checks, per-range-cell imaging, and complexity
//! accounting.

mod complexity;
mod config;
mod imaging;
mod reconstruct;

pub use complexity::{complexity_report, order_of_magnitude, ComplexityDims, ComplexityReport};
pub use config::{Debias, EtaStrategy, QraConfig, RotationStrategy};
pub use imaging::{image_per_range_cell, CellFailure, RangeCellImage};
pub use reconstruct::{calibration_dry_run, classical_shadow, qra_reconstruct, QraOutcome};

// The quantum-vs-oracle comparison metric lives with the solvers but is
// part of this layer's vocabulary.
pub use crate::solvers::fidelity;

use thiserror::Error;

use crate::hhl::{CalibrationError, HhlError};
use crate::solvers::SolverError;

#[derive(Debug, Error)]
pub enum PipelineError {
    /// No operating point made the spectrum integral. The hint names the
    /// two remediations: widen the η grid or allow the fallback rotation.
    #[error(
        "calibration failed over eta grid {grid}: {source}; widen the eta \
         search grid or enable the fallback rotation"
    )]
    Calibration {
        grid: String,
        #[source]
        source: CalibrationError,
    },
    #[error(transparent)]
    Hhl(#[from] HhlError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("{0}")]
    InvalidInput(String),
}
