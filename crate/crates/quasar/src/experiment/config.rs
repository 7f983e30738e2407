//! Experiment configuration: scene, aperture sweep, methods, solver
//! knobs, and the two shipped presets.
//!
//! The on-disk format is TOML. Every field that influences the run is
//! part of the config so a snapshot of it plus the seed reproduces the
//! outputs byte for byte.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::pipeline::{Debias, EtaStrategy, QraConfig, RotationStrategy};
use crate::qsim::MAX_QUBITS;
use crate::solvers::MethodTag;

use super::ExperimentError;

/// Reconstruction methods selectable from a config file.
///
/// Mirrors the per-cell solver tags minus the internal truncation step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    Qra,
    Omp,
    Oracle,
}

impl MethodName {
    pub fn tag(self) -> MethodTag {
        match self {
            MethodName::Qra => MethodTag::Qra,
            MethodName::Omp => MethodTag::Omp,
            MethodName::Oracle => MethodTag::Oracle,
        }
    }
}

impl fmt::Display for MethodName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.tag().fmt(f)
    }
}

/// One known scatterer for an explicitly specified scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scatterer {
    /// Range cell row.
    pub cell: usize,
    /// Cross-range grid index.
    pub index: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// What the simulated scene looks like.
///
/// With an empty `scatterers` list, each range cell gets `sparsity`
/// scatterers at seeded random positions with magnitudes drawn from
/// `amplitude_range` and uniform random phases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    /// Number of range cells (image rows), K_c.
    pub range_cells: usize,
    /// Cross-range grid size (image columns), M_all.
    pub grid: usize,
    /// Scatterers per range cell, K.
    pub sparsity: usize,
    #[serde(default = "default_amplitude_range")]
    pub amplitude_range: [f64; 2],
    #[serde(default)]
    pub scatterers: Vec<Scatterer>,
}

fn default_amplitude_range() -> [f64; 2] {
    [0.5, 1.0]
}

/// How the kept-pulse subset is chosen at each sampling rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AperturePattern {
    /// Seeded random subset (a fresh seed per rate).
    #[default]
    Random,
    /// Evenly spaced pulses.
    Decimate,
    /// Leading pulses kept, a trailing block dropped.
    Block,
}

/// Per-pulse transmit gain profile applied to the dictionary rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainTaper {
    /// All kept pulses at unit gain.
    #[default]
    Uniform,
    /// Alternating gains g and 2g with g² = 1/(2η), which pins the
    /// regularized spectrum to {λ₀, λ₀ + 1/2, λ₀ + 2} at the configured
    /// η and keeps the circuit registers small.
    TwoLevel,
}

/// Sampling-rate sweep and aperture shaping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApertureSpec {
    /// Sampling rates M_s/M_all to sweep, each in (0, 1].
    pub rates: Vec<f64>,
    #[serde(default)]
    pub pattern: AperturePattern,
    #[serde(default)]
    pub gain_taper: GainTaper,
}

/// η selection: a fixed value or `"auto"` (grid search).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaSetting {
    Auto,
    Fixed(f64),
}

impl Default for EtaSetting {
    fn default() -> Self {
        EtaSetting::Auto
    }
}

impl Serialize for EtaSetting {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            EtaSetting::Auto => serializer.serialize_str("auto"),
            EtaSetting::Fixed(x) => serializer.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for EtaSetting {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct EtaVisitor;
        impl Visitor<'_> for EtaVisitor {
            type Value = EtaSetting;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or the string \"auto\"")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<EtaSetting, E> {
                if v == "auto" {
                    Ok(EtaSetting::Auto)
                } else {
                    Err(E::custom(format!("unknown eta keyword {v:?}; use \"auto\" or a number")))
                }
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<EtaSetting, E> {
                Ok(EtaSetting::Fixed(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<EtaSetting, E> {
                Ok(EtaSetting::Fixed(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<EtaSetting, E> {
                Ok(EtaSetting::Fixed(v as f64))
            }
        }
        deserializer.deserialize_any(EtaVisitor)
    }
}

/// Rotation mode requested in a config file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationSetting {
    /// Require an exactly calibrated spectrum.
    #[default]
    Exact,
    /// Permit the approximate clock-keyed rotation when calibration
    /// fails.
    Fallback,
}

/// Post-recovery amplitude correction requested in a config file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DebiasSetting {
    None,
    Diagonal,
    /// Refit the selected columns against the data. The default:
    /// amplitude-faithful imagery for both methods.
    #[default]
    LeastSquares,
}

impl DebiasSetting {
    pub fn to_debias(self) -> Debias {
        match self {
            DebiasSetting::None => Debias::None,
            DebiasSetting::Diagonal => Debias::Diagonal,
            DebiasSetting::LeastSquares => Debias::LeastSquares,
        }
    }
}

/// Quantum solver knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSpec {
    /// `"auto"` or a fixed spectrum scaling η.
    pub eta: EtaSetting,
    /// Integer search range for `eta = "auto"`, inclusive.
    pub eta_grid: [u32; 2],
    /// Ridge λ₀.
    pub lambda0: f64,
    /// Rotation divisor multiplier; larger is more accurate.
    pub n_sa_multiplier: Option<u64>,
    pub rotation: RotationSetting,
    /// Clock width override for the fallback rotation.
    pub fallback_clock_qubits: Option<usize>,
    pub debias: DebiasSetting,
    /// Hard cap on total circuit width.
    pub qubit_budget: usize,
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec {
            eta: EtaSetting::Auto,
            eta_grid: [1, 64],
            lambda0: 1.0,
            n_sa_multiplier: None,
            rotation: RotationSetting::Exact,
            fallback_clock_qubits: None,
            debias: DebiasSetting::LeastSquares,
            qubit_budget: MAX_QUBITS,
        }
    }
}

impl SolverSpec {
    /// Translates the file-level knobs into the pipeline configuration.
    pub fn to_qra_config(&self) -> QraConfig {
        QraConfig {
            eta: match self.eta {
                EtaSetting::Auto => {
                    EtaStrategy::Auto { min: self.eta_grid[0], max: self.eta_grid[1] }
                }
                EtaSetting::Fixed(x) => EtaStrategy::Fixed(x),
            },
            lambda0: self.lambda0,
            qubit_budget: self.qubit_budget,
            n_sa_multiplier: self.n_sa_multiplier,
            rotation: match self.rotation {
                RotationSetting::Exact => RotationStrategy::ExactOnly,
                RotationSetting::Fallback => {
                    RotationStrategy::AllowFallback { clock_qubits: self.fallback_clock_qubits }
                }
            },
            debias: self.debias.to_debias(),
        }
    }
}

/// Additive measurement noise.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSpec {
    /// Signal-to-noise ratio in dB; absent means noiseless.
    pub snr_db: Option<f64>,
}

/// Nominal radar parameters of the system being emulated.
///
/// These feed the complexity instantiation and the report header; the
/// simulated measurement itself is the partial-Fourier model on the
/// reduced cross-range grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadarNominal {
    pub carrier_frequency_hz: f64,
    pub bandwidth_hz: f64,
    #[serde(default)]
    pub prf_hz: Option<f64>,
    /// Nominal slow-time length L_t (pulses or frequency steps).
    pub pulses: usize,
}

/// Everything a run needs. See `ExperimentConfig::f16_like` for a fully
/// populated example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Human-readable run label; also the run directory prefix.
    pub label: String,
    /// Master seed; fixes scene, apertures, and noise end to end.
    pub seed: u64,
    /// Parent directory for run outputs; the CLI flag overrides it.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Worker threads for the sweep; 0 picks the library default.
    #[serde(default)]
    pub workers: usize,
    pub methods: Vec<MethodName>,
    pub scene: SceneSpec,
    pub aperture: ApertureSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub noise: NoiseSpec,
    #[serde(default)]
    pub radar: Option<RadarNominal>,
}

impl ExperimentConfig {
    /// Parses a TOML config; errors carry line and column diagnostics.
    pub fn from_toml_str(text: &str) -> Result<Self, ExperimentError> {
        toml::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            ExperimentError::Config(format!("cannot read {}: {e}", path.display()))
        })?;
        Self::from_toml_str(&text)
    }

    /// Serializes the exact configuration for the run-directory snapshot.
    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Looks up a shipped preset by name.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "f16-like" => Some(Self::f16_like()),
            "yak42-like" => Some(Self::yak42_like()),
            _ => None,
        }
    }

    pub fn preset_names() -> &'static [&'static str] {
        &["f16-like", "yak42-like"]
    }

    /// Stepped-frequency Ku/Ka-band setting: 34.2857 to 37.9428 GHz over
    /// 401 frequency steps, imaged on a 128-point cross-range grid at
    /// half aperture. A synthetic analog of a published fighter-aircraft
    /// dataset, not a reproduction.
    pub fn f16_like() -> Self {
        ExperimentConfig {
            label: "f16-like".into(),
            seed: 1062,
            output_dir: None,
            workers: 0,
            methods: vec![MethodName::Qra, MethodName::Omp],
            scene: SceneSpec {
                range_cells: 3,
                grid: 128,
                sparsity: 3,
                amplitude_range: [0.5, 1.0],
                scatterers: Vec::new(),
            },
            aperture: ApertureSpec {
                rates: vec![0.5],
                pattern: AperturePattern::Random,
                gain_taper: GainTaper::TwoLevel,
            },
            solver: SolverSpec { eta: EtaSetting::Fixed(23.0), ..SolverSpec::default() },
            noise: NoiseSpec::default(),
            radar: Some(RadarNominal {
                carrier_frequency_hz: 34.2857e9,
                bandwidth_hz: 3.6571e9,
                prf_hz: None,
                pulses: 401,
            }),
        }
    }

    /// C-band pulsed setting: 5.52 GHz carrier, 400 MHz bandwidth,
    /// 400 Hz PRF, 400 pulses, imaged on a 256-point cross-range grid at
    /// half aperture. A synthetic analog of a published propeller
    /// transport dataset, not a reproduction.
    pub fn yak42_like() -> Self {
        ExperimentConfig {
            label: "yak42-like".into(),
            seed: 4242,
            output_dir: None,
            workers: 0,
            methods: vec![MethodName::Qra, MethodName::Omp],
            scene: SceneSpec {
                range_cells: 4,
                grid: 256,
                sparsity: 4,
                amplitude_range: [0.5, 1.0],
                scatterers: Vec::new(),
            },
            aperture: ApertureSpec {
                rates: vec![0.5],
                pattern: AperturePattern::Random,
                gain_taper: GainTaper::TwoLevel,
            },
            solver: SolverSpec { eta: EtaSetting::Fixed(33.0), ..SolverSpec::default() },
            noise: NoiseSpec::default(),
            radar: Some(RadarNominal {
                carrier_frequency_hz: 5.52e9,
                bandwidth_hz: 4.0e8,
                prf_hz: Some(400.0),
                pulses: 400,
            }),
        }
    }
}
