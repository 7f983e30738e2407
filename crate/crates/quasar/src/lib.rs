//! Quantum-enhanced sparse-aperture radar imaging.
//!
//! The crate pairs a classical sparse-recovery baseline with an exact
//! statevector simulation of an eigenvalue-inversion linear solver, applied
//! to range-cell imaging from decimated pulse sets:
//!
//! * [`radar`] synthesizes chirp echoes, vectorizes them, and builds the
//!   measurement operators that map scene coefficients to samples.
//! * [`solvers`] forms the regularized normal system and solves it directly
//!   or greedily (orthogonal matching pursuit).
//! * [`qsim`] is a dense statevector simulator with the multi-controlled
//!   gate set the solver circuit needs.
//! * [`hhl`] calibrates the system spectrum onto integer phase-register
//!   readouts and runs the phase-estimation / controlled-rotation /
//!   uncomputation pipeline.
//! * [`pipeline`] wires the pieces into per-range-cell image reconstruction
//!   and complexity accounting.
//! * [`experiment`] adds configuration files, presets, and the paired
//!   classical-vs-quantum experiment runner behind the `quasar` binary.
//!
//! ```
//! use quasar::radar::{ApertureSelection, build_partial_fourier_dictionary};
//!
//! // Keep every other pulse of a 8-pulse aperture.
//! let aperture = ApertureSelection::uniform_decimation(8, 2)?;
//! let phi = build_partial_fourier_dictionary(8, &aperture)?;
//! assert_eq!((phi.nrows(), phi.ncols()), (4, 8));
//! # Ok::<(), quasar::radar::RadarError>(())
//! ```

pub mod experiment;
pub mod hhl;
pub mod io;
pub mod pipeline;
pub mod qsim;
pub mod radar;
pub mod solvers;
pub mod synthetic;

pub use num_complex::Complex64;

/// Dense complex matrix used throughout the crate.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
/// Dense complex column vector used throughout the crate.
pub type CVector = nalgebra::DVector<Complex64>;
