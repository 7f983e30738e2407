//! Synthetic sparse-aperture radar data and the operators that relate a
//! sparse scene to its measurements.
//!
//! The forward model is a chirped echo sampled on a fast-time × slow-time
//! grid. A scene is a small set of scattering points with complex
//! coefficients on a discrete cross-range grid; an aperture selection keeps
//! `M_s` of the `M_all` available pulses. Two measurement operators are
//! provided: the physical phase matrix evaluated on the same grid as the
//! scene, and the partial-Fourier dictionary used by the per-range-cell
//! imaging mode.

mod aperture;
mod dictionary;
mod echo;
mod params;
mod scene;

pub use aperture::ApertureSelection;
pub use dictionary::{
    build_measurement_matrix, build_partial_fourier_dictionary, MatrixKind, MeasurementMatrix,
};
pub use echo::{devectorize_echo, synth_echo, vectorize_echo, EchoData, NoiseSpec};
pub use params::RadarParams;
pub use scene::{RangeHistory, ScatterPoint, SceneModel};

/// Propagation speed used for all delay computations, in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Errors raised by model construction and echo synthesis.
#[derive(Debug, thiserror::Error)]
pub enum RadarError {
    #[error("invalid radar parameters: {0}")]
    InvalidParams(String),
    #[error("aperture selection is empty")]
    EmptyAperture,
    #[error("aperture indices must be strictly increasing and within the pulse range: {0}")]
    InvalidAperture(String),
    #[error("scene is invalid: {0}")]
    InvalidScene(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}
