//! Doc-test shims for the guide in `book/`.
//!
//! Each module's documentation is a chapter included verbatim, so every
//! fenced Rust block in the book compiles and runs under
//! `cargo test --workspace`. A snippet that drifts from the library
//! breaks the build, which is the mechanism that keeps the book honest.

#[doc = include_str!("../../../book/src/overview.md")]
pub mod overview {}

#[doc = include_str!("../../../book/src/imaging-model.md")]
pub mod imaging_model {}

#[doc = include_str!("../../../book/src/matching-pursuit.md")]
pub mod matching_pursuit {}

#[doc = include_str!("../../../book/src/statevector-simulator.md")]
pub mod statevector_simulator {}

#[doc = include_str!("../../../book/src/calibration.md")]
pub mod calibration {}

#[doc = include_str!("../../../book/src/inversion-circuit.md")]
pub mod inversion_circuit {}

#[doc = include_str!("../../../book/src/pipeline.md")]
pub mod pipeline {}

#[doc = include_str!("../../../book/src/cost-model.md")]
pub mod cost_model {}

#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
