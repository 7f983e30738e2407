//! Pre-flight checks on a configuration.
//!
//! Findings come back as diagnostics rather than errors so a front end
//! can show all of them at once. Errors mean the run cannot start;
//! warnings flag regimes that will run but probably disappoint, most
//! importantly operating points whose spectrum fails calibration (found
//! by a dry run that never touches a circuit).

use std::fmt;

use crate::pipeline::calibration_dry_run;

use super::config::{EtaSetting, ExperimentConfig, MethodName, RotationSetting};
use super::runner::{dictionary_for_rate, kept_pulses, rate_tag};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Warning,
    Error,
}

/// One finding, tied to the config field it concerns.
#[derive(Debug, Clone)]
pub struct Diagnostic {
    pub severity: Severity,
    /// Dotted config path, e.g. "aperture.rates".
    pub field: String,
    pub message: String,
}

impl Diagnostic {
    fn error(field: &str, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, field: field.into(), message: message.into() }
    }

    fn warning(field: &str, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, field: field.into(), message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{tag}[{}]: {}", self.field, self.message)
    }
}

/// True when any diagnostic blocks the run.
pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(|d| d.severity == Severity::Error)
}

/// Checks every invariant a run relies on and dry-runs the calibration
/// for each sweep point. Never fails; a valid config yields an empty
/// list.
pub fn validate_config(config: &ExperimentConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    if config.label.is_empty() {
        out.push(Diagnostic::error("label", "label must not be empty"));
    } else if config.label.contains(['/', '\\']) || config.label.starts_with('.') {
        out.push(Diagnostic::error(
            "label",
            "label names the run directory; avoid path separators and leading dots",
        ));
    }

    if config.methods.is_empty() {
        out.push(Diagnostic::error("methods", "at least one method is required"));
    }
    for (i, m) in config.methods.iter().enumerate() {
        if config.methods[..i].contains(m) {
            out.push(Diagnostic::warning("methods", format!("method {m} listed more than once")));
        }
    }

    let scene = &config.scene;
    if scene.range_cells == 0 {
        out.push(Diagnostic::error("scene.range_cells", "at least one range cell is required"));
    }
    if scene.grid < 2 {
        out.push(Diagnostic::error("scene.grid", "the cross-range grid needs at least 2 cells"));
    }
    if scene.sparsity == 0 || scene.sparsity > scene.grid {
        out.push(Diagnostic::error(
            "scene.sparsity",
            format!("{} scatterers per cell is outside [1, {}]", scene.sparsity, scene.grid),
        ));
    }
    let [a0, a1] = scene.amplitude_range;
    if !(a0.is_finite() && a1.is_finite()) || a0 < 0.0 || a1 < a0 || a1 == 0.0 {
        out.push(Diagnostic::error(
            "scene.amplitude_range",
            format!("range [{a0}, {a1}] must satisfy 0 <= low <= high with high > 0"),
        ));
    }
    let mut scene_energy = 0.0;
    for (i, s) in scene.scatterers.iter().enumerate() {
        if s.cell >= scene.range_cells || s.index >= scene.grid {
            out.push(Diagnostic::error(
                "scene.scatterers",
                format!(
                    "scatterer {i} at (cell {}, index {}) is outside the {} x {} scene",
                    s.cell, s.index, scene.range_cells, scene.grid
                ),
            ));
        }
        scene_energy += s.re * s.re + s.im * s.im;
    }
    if !scene.scatterers.is_empty() && scene_energy == 0.0 {
        out.push(Diagnostic::error(
            "scene.scatterers",
            "explicit scene has zero energy; the error metric is undefined",
        ));
    }

    if config.aperture.rates.is_empty() {
        out.push(Diagnostic::error("aperture.rates", "at least one sampling rate is required"));
    }
    for &rate in &config.aperture.rates {
        if !rate.is_finite() || rate <= 0.0 || rate > 1.0 {
            out.push(Diagnostic::error(
                "aperture.rates",
                format!("sampling rate must be in (0, 1], got {rate}"),
            ));
            continue;
        }
        let kept = kept_pulses(rate, scene.grid);
        if kept == 0 {
            out.push(Diagnostic::error(
                "aperture.rates",
                format!("rate {rate} keeps zero of {} pulses", scene.grid),
            ));
        } else if kept < scene.sparsity {
            out.push(Diagnostic::warning(
                "aperture.rates",
                format!(
                    "rate {rate} keeps {kept} pulses, fewer than the per-cell sparsity {}; recovery is underdetermined",
                    scene.sparsity
                ),
            ));
        }
    }
    for (i, &a) in config.aperture.rates.iter().enumerate() {
        for &b in &config.aperture.rates[..i] {
            if rate_tag(a) == rate_tag(b) {
                out.push(Diagnostic::error(
                    "aperture.rates",
                    format!("rates {b} and {a} collide in output naming ({})", rate_tag(a)),
                ));
            }
        }
    }

    let solver = &config.solver;
    match solver.eta {
        EtaSetting::Fixed(eta) => {
            if !eta.is_finite() || eta <= 0.0 {
                out.push(Diagnostic::error("solver.eta", format!("eta must be positive, got {eta}")));
            }
        }
        EtaSetting::Auto => {
            let [min, max] = solver.eta_grid;
            if min == 0 || max < min {
                out.push(Diagnostic::error(
                    "solver.eta_grid",
                    format!("search grid {min}..={max} is empty or starts at zero"),
                ));
            }
        }
    }
    if !solver.lambda0.is_finite() || solver.lambda0 <= 0.0 {
        out.push(Diagnostic::error(
            "solver.lambda0",
            format!("lambda0 must be positive, got {}", solver.lambda0),
        ));
    }
    if solver.n_sa_multiplier == Some(0) {
        out.push(Diagnostic::error("solver.n_sa_multiplier", "multiplier must be at least 1"));
    }
    if solver.qubit_budget < 4 {
        out.push(Diagnostic::error(
            "solver.qubit_budget",
            format!("{} qubits cannot hold the two ancillas plus working registers", solver.qubit_budget),
        ));
    }
    if solver.fallback_clock_qubits.is_some() && solver.rotation == RotationSetting::Exact {
        out.push(Diagnostic::warning(
            "solver.fallback_clock_qubits",
            "set, but rotation is \"exact\"; the override only applies to the fallback rotation",
        ));
    }

    if let Some(snr) = config.noise.snr_db {
        if !snr.is_finite() {
            out.push(Diagnostic::error("noise.snr_db", format!("snr must be finite, got {snr}")));
        }
    }

    if let Some(radar) = &config.radar {
        if !(radar.carrier_frequency_hz > 0.0) || !(radar.bandwidth_hz > 0.0) || radar.pulses == 0
        {
            out.push(Diagnostic::error(
                "radar",
                "carrier frequency, bandwidth, and pulse count must be positive",
            ));
        }
    }

    // Dry-run calibration per sweep point: cheap (one eigendecomposition
    // per rate) and catches the operating points that would fail or fall
    // back before anything runs.
    let needs_circuit = config.methods.contains(&MethodName::Qra);
    let needs_resolution = needs_circuit
        || (config.methods.contains(&MethodName::Oracle)
            && solver.eta == EtaSetting::Auto
            && solver.rotation == RotationSetting::Exact);
    if !has_errors(&out) && needs_resolution {
        let qra_config = solver.to_qra_config();
        for (idx, &rate) in config.aperture.rates.iter().enumerate() {
            let dict = match dictionary_for_rate(config, idx) {
                Ok(d) => d,
                Err(e) => {
                    out.push(Diagnostic::error(
                        "aperture",
                        format!("rate {rate}: cannot build the dictionary: {e}"),
                    ));
                    continue;
                }
            };
            if let Err(e) = calibration_dry_run(&dict.matrix, &qra_config) {
                match solver.rotation {
                    RotationSetting::Exact => out.push(Diagnostic::warning(
                        "solver.eta",
                        format!(
                            "rate {rate}: {e}; runs at this rate will fail unless rotation = \"fallback\" is set"
                        ),
                    )),
                    RotationSetting::Fallback => out.push(Diagnostic::warning(
                        "solver.rotation",
                        format!(
                            "rate {rate}: exact calibration fails ({e}); the approximate fallback rotation will be used"
                        ),
                    )),
                }
            }
        }
    }

    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::{DebiasSetting, SolverSpec};

    fn small_config() -> ExperimentConfig {
        let mut config = ExperimentConfig::f16_like();
        // Shrink to keep the dry run fast.
        config.scene.grid = 16;
        config.scene.range_cells = 2;
        config.solver.eta = EtaSetting::Fixed(1.0);
        config.aperture.gain_taper = super::super::config::GainTaper::TwoLevel;
        config
    }

    #[test]
    fn a_valid_config_produces_no_diagnostics() {
        let diags = validate_config(&small_config());
        assert!(diags.is_empty(), "{diags:?}");
    }

    #[test]
    fn zero_rate_is_an_error() {
        let mut config = small_config();
        config.aperture.rates = vec![0.0];
        let diags = validate_config(&config);
        assert!(has_errors(&diags));
        assert!(
            diags.iter().any(|d| d.field == "aperture.rates" && d.message.contains("(0, 1]")),
            "{diags:?}"
        );
    }

    #[test]
    fn uncalibratable_fixed_eta_warns_and_names_the_fallback() {
        // A uniform taper at eta = 1 leaves the spectrum {1, 3/2}: the
        // half-integer never scales to an integer under any clock width,
        // so the dry run must flag it.
        let mut config = small_config();
        config.aperture.gain_taper = super::super::config::GainTaper::Uniform;
        config.solver.eta = EtaSetting::Fixed(0.37);
        let diags = validate_config(&config);
        assert!(!has_errors(&diags), "{diags:?}");
        let warning = diags
            .iter()
            .find(|d| d.severity == Severity::Warning && d.field == "solver.eta")
            .unwrap_or_else(|| panic!("no calibration warning in {diags:?}"));
        assert!(warning.message.contains("fallback"), "{}", warning.message);
    }

    #[test]
    fn fallback_mode_downgrades_the_calibration_warning_wording() {
        let mut config = small_config();
        config.aperture.gain_taper = super::super::config::GainTaper::Uniform;
        config.solver.eta = EtaSetting::Fixed(0.37);
        config.solver.rotation = RotationSetting::Fallback;
        let diags = validate_config(&config);
        assert!(!has_errors(&diags));
        assert!(diags
            .iter()
            .any(|d| d.field == "solver.rotation" && d.message.contains("fallback rotation")));
    }

    #[test]
    fn static_shape_errors_are_collected_together() {
        let mut config = small_config();
        config.label = "a/b".into();
        config.methods = vec![];
        config.scene.sparsity = 99;
        config.aperture.rates = vec![0.5, 0.504];
        config.solver = SolverSpec {
            eta: EtaSetting::Fixed(-2.0),
            lambda0: 0.0,
            n_sa_multiplier: Some(0),
            qubit_budget: 2,
            debias: DebiasSetting::None,
            ..SolverSpec::default()
        };
        let diags = validate_config(&config);
        let fields: Vec<&str> = diags.iter().map(|d| d.field.as_str()).collect();
        for expected in [
            "label",
            "methods",
            "scene.sparsity",
            "aperture.rates",
            "solver.eta",
            "solver.lambda0",
            "solver.n_sa_multiplier",
            "solver.qubit_budget",
        ] {
            assert!(fields.contains(&expected), "missing {expected} in {fields:?}");
        }
    }

    #[test]
    fn naming_collisions_between_rates_are_rejected() {
        let mut config = small_config();
        config.aperture.rates = vec![0.5, 0.501];
        let diags = validate_config(&config);
        assert!(has_errors(&diags));
        assert!(diags.iter().any(|d| d.message.contains("collide")), "{diags:?}");
    }

    #[test]
    fn underdetermined_rates_warn_but_run() {
        let mut config = small_config();
        config.scene.sparsity = 3;
        config.aperture.rates = vec![0.125];
        let diags = validate_config(&config);
        assert!(!has_errors(&diags), "{diags:?}");
        assert!(diags.iter().any(|d| d.message.contains("underdetermined")), "{diags:?}");
    }
}
