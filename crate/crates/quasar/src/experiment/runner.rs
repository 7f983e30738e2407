//! The sweep runner: builds the scene once, then images it per sampling
//! rate and method, writing one self-contained artifact directory.
//!
//! Everything random is seeded from the config's master seed through
//! fixed derivation streams, and results are assembled in config order,
//! so a rerun with the same config reproduces every output byte.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::hhl::HhlParams;
use crate::io::{write_complex_matrix, write_pgm};
use crate::pipeline::{
    complexity_report, image_per_range_cell, ComplexityDims, ComplexityReport, RangeCellImage,
};
use crate::radar::{
    build_partial_fourier_dictionary, ApertureSelection, MeasurementMatrix, RadarError,
};
use crate::CMatrix;

use super::config::{
    AperturePattern, ApertureSpec, EtaSetting, ExperimentConfig, GainTaper, MethodName, SceneSpec,
};
use super::validate::{validate_config, Severity};
use super::ExperimentError;

const STREAM_SCENE: u64 = 1;
const STREAM_APERTURE: u64 = 2;
const STREAM_NOISE: u64 = 3;

/// Mixes the master seed with a purpose stream and sweep index so every
/// consumer gets an independent, platform-stable seed.
fn derive_seed(master: u64, stream: u64, idx: u64) -> u64 {
    let mut z = master
        ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ idx.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Kept pulse count at a sampling rate.
pub(crate) fn kept_pulses(rate: f64, grid: usize) -> usize {
    (rate * grid as f64).round() as usize
}

/// File tag for a rate: percent, zero-padded ("r050" for 0.5). Artifact
/// names are `sigma_bar_<tag>_<method>.cq64` and
/// `image_<tag>_<method>.pgm`.
pub fn rate_tag(rate: f64) -> String {
    format!("r{:03}", (rate * 100.0).round() as u32)
}

/// Scene reflectivity, range cells × cross-range grid.
pub(crate) fn build_scene(spec: &SceneSpec, seed: u64) -> CMatrix {
    let mut sigma = CMatrix::zeros(spec.range_cells, spec.grid);
    if spec.scatterers.is_empty() {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        for cell in 0..spec.range_cells {
            let picks = rand::seq::index::sample(&mut rng, spec.grid, spec.sparsity);
            for j in picks.iter() {
                let mag = rng.gen_range(spec.amplitude_range[0]..=spec.amplitude_range[1]);
                let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                sigma[(cell, j)] = Complex64::from_polar(mag, phase);
            }
        }
    } else {
        for s in &spec.scatterers {
            sigma[(s.cell, s.index)] += Complex64::new(s.re, s.im);
        }
    }
    sigma
}

/// Kept-pulse subset for one sweep point.
pub(crate) fn aperture_for_rate(
    spec: &ApertureSpec,
    grid: usize,
    master_seed: u64,
    rate_idx: usize,
) -> Result<ApertureSelection, RadarError> {
    let rate = spec.rates[rate_idx];
    let kept = kept_pulses(rate, grid);
    match spec.pattern {
        AperturePattern::Random => ApertureSelection::random_subset(
            grid,
            kept,
            derive_seed(master_seed, STREAM_APERTURE, rate_idx as u64),
        ),
        AperturePattern::Decimate => {
            ApertureSelection::from_indices(grid, (0..kept).map(|i| i * grid / kept).collect())
        }
        AperturePattern::Block => ApertureSelection::from_indices(grid, (0..kept).collect()),
    }
}

/// Dictionary for one sweep point, gain taper applied.
pub(crate) fn dictionary_for_rate(
    config: &ExperimentConfig,
    rate_idx: usize,
) -> Result<MeasurementMatrix, ExperimentError> {
    let aperture =
        aperture_for_rate(&config.aperture, config.scene.grid, config.seed, rate_idx)?;
    let mut dict = build_partial_fourier_dictionary(config.scene.grid, &aperture)?;
    if config.aperture.gain_taper == GainTaper::TwoLevel {
        // g² = 1/(2η) makes the regularized spectrum {λ₀, λ₀+1/2, λ₀+2}.
        let eta_ref = match config.solver.eta {
            EtaSetting::Fixed(x) => x,
            EtaSetting::Auto => 1.0,
        };
        let g = (1.0 / (2.0 * eta_ref)).sqrt();
        let gains: Vec<f64> =
            (0..dict.nrows()).map(|i| if i % 2 == 0 { g } else { 2.0 * g }).collect();
        dict.scale_rows(&gains)?;
    }
    Ok(dict)
}

/// Adds seeded complex Gaussian noise at the requested SNR, in place.
fn apply_noise(profiles: &mut CMatrix, snr_db: f64, seed: u64) {
    let n = profiles.len();
    let signal_power = profiles.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
    let noise_power = signal_power / 10f64.powf(snr_db / 10.0);
    let s = (noise_power / 2.0).sqrt();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    for i in 0..profiles.nrows() {
        for j in 0..profiles.ncols() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            profiles[(i, j)] += Complex64::new(s * re, s * im);
        }
    }
}

/// ‖a − b‖_F / ‖b‖_F over the flattened scene: the error metric behind
/// every CSV row.
pub fn global_rmse(estimate: &CMatrix, truth: &CMatrix) -> f64 {
    (estimate - truth).norm() / truth.norm()
}

/// One CSV row of the sweep.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub rate: f64,
    pub method: MethodName,
    pub rmse: f64,
    /// Mean post-selection probability over cells (quantum rows only).
    pub p1: Option<f64>,
    pub gate_count: u64,
    pub flops: u64,
    /// Circuit geometry (quantum rows only).
    pub registers: Option<HhlParams>,
    /// Instantiated cost of the full classical sweep at this rate.
    pub classical_cost: Option<f64>,
    /// Instantiated per-cell quantum cost at this rate.
    pub quantum_cost: Option<f64>,
}

/// What a finished sweep produced.
#[derive(Debug)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub csv_path: PathBuf,
    /// Rows actually emitted, in config order.
    pub rows: Vec<ResultRow>,
    /// Sweep points or cells that failed; nonempty means partial failure.
    pub failures: Vec<String>,
    /// Soft findings: config diagnostics and trend checks.
    pub warnings: Vec<String>,
    pub wall_time: Duration,
}

impl RunSummary {
    pub fn success(&self) -> bool {
        self.failures.is_empty()
    }
}

struct RatePoint {
    rate: f64,
    tag: String,
    kept: usize,
    dictionary: MeasurementMatrix,
    profiles: CMatrix,
}

struct JobOutput {
    rate_idx: usize,
    method: MethodName,
    result: Result<RangeCellImage, String>,
}

/// Writes through a temp file so readers never observe partial content.
fn write_atomic<F>(path: &Path, write: F) -> Result<(), ExperimentError>
where
    F: FnOnce(&Path) -> Result<(), ExperimentError>,
{
    let tmp = path.with_extension("tmp");
    write(&tmp)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn write_text_atomic(path: &Path, text: &str) -> Result<(), ExperimentError> {
    write_atomic(path, |tmp| {
        fs::write(tmp, text)?;
        Ok(())
    })
}

/// Runs the full sweep described by `config` and writes the artifact
/// directory `<output_dir>/<label>/`.
///
/// Individual sweep points or cells may fail without stopping the run;
/// such failures are listed in the summary and the caller decides the
/// exit status. `Err` is reserved for unusable configs and I/O trouble.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunSummary, ExperimentError> {
    let t0 = Instant::now();
    let diagnostics = validate_config(config);
    let errors: Vec<String> = diagnostics
        .iter()
        .filter(|d| d.severity == Severity::Error)
        .map(|d| d.to_string())
        .collect();
    if !errors.is_empty() {
        return Err(ExperimentError::Config(errors.join("; ")));
    }
    let mut warnings: Vec<String> =
        diagnostics.iter().map(|d| d.to_string()).collect();

    let root = config.output_dir.clone().unwrap_or_else(|| PathBuf::from("runs"));
    let run_dir = root.join(&config.label);
    fs::create_dir_all(&run_dir)?;
    write_text_atomic(&run_dir.join("config.toml"), &config.to_toml_string())?;

    let scene = build_scene(&config.scene, derive_seed(config.seed, STREAM_SCENE, 0));
    write_atomic(&run_dir.join("sigma_true.cq64"), |tmp| {
        write_complex_matrix(tmp, &scene).map_err(Into::into)
    })?;

    // Per-rate inputs are shared across methods, including the noise
    // draw, so methods at one rate see the same data.
    let mut points = Vec::with_capacity(config.aperture.rates.len());
    for (idx, &rate) in config.aperture.rates.iter().enumerate() {
        let dictionary = dictionary_for_rate(config, idx)?;
        let mut profiles = &scene * dictionary.matrix.transpose();
        if let Some(snr_db) = config.noise.snr_db {
            apply_noise(&mut profiles, snr_db, derive_seed(config.seed, STREAM_NOISE, idx as u64));
        }
        points.push(RatePoint {
            rate,
            tag: rate_tag(rate),
            kept: kept_pulses(rate, config.scene.grid),
            dictionary,
            profiles,
        });
    }

    let jobs: Vec<(usize, MethodName)> = (0..points.len())
        .flat_map(|i| config.methods.iter().map(move |&m| (i, m)))
        .collect();
    let qra_config = config.solver.to_qra_config();
    let sparsity = config.scene.sparsity;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| ExperimentError::Config(format!("cannot build worker pool: {e}")))?;
    let outputs: Vec<JobOutput> = pool.install(|| {
        jobs.par_iter()
            .map(|&(rate_idx, method)| {
                let point = &points[rate_idx];
                let result = image_per_range_cell(
                    &point.profiles,
                    &point.dictionary,
                    sparsity,
                    &qra_config,
                    method.tag(),
                )
                .map_err(|e| e.to_string());
                JobOutput { rate_idx, method, result }
            })
            .collect()
    });

    // Sequential assembly in job order keeps every artifact deterministic.
    let mut rows: Vec<ResultRow> = Vec::new();
    let mut failures: Vec<String> = Vec::new();
    let mut complexity_blocks: Vec<String> = Vec::new();
    for point_idx in 0..points.len() {
        let point = &points[point_idx];
        let at_rate: Vec<&JobOutput> =
            outputs.iter().filter(|o| o.rate_idx == point_idx).collect();

        // Rate-level complexity needs the calibrated circuit geometry;
        // any successful quantum row at this rate provides it.
        let report = at_rate
            .iter()
            .find_map(|o| o.result.as_ref().ok().and_then(|img| {
                let regs = img.registers.as_ref()?;
                let kappa = img.condition_number?;
                Some(rate_complexity(config, point.kept, kappa, regs.n_c, img))
            }));
        let (classical_cost, quantum_cost) = report
            .as_ref()
            .map(|r| (Some(r.omp_sweep_cost), Some(r.qra_cell_cost)))
            .unwrap_or((None, None));
        if let Some(r) = &report {
            complexity_blocks.push(format!("rate {} ({} of {} pulses):\n{r}", point.rate, point.kept, config.scene.grid));
        }

        for output in at_rate {
            let label = format!("rate {} {}", point.rate, output.method);
            match &output.result {
                Err(message) => failures.push(format!("{label}: {message}")),
                Ok(img) => {
                    if !img.failures.is_empty() {
                        let first = &img.failures[0];
                        failures.push(format!(
                            "{label}: {} of {} cells failed (cell {}: {})",
                            img.failures.len(),
                            config.scene.range_cells,
                            first.cell,
                            first.message
                        ));
                    }
                    let rmse = global_rmse(&img.estimates, &scene);
                    rows.push(ResultRow {
                        rate: point.rate,
                        method: output.method,
                        rmse,
                        p1: img.p1_mean,
                        gate_count: img.gate_count_total,
                        flops: img.flops_total,
                        registers: img.registers.clone(),
                        classical_cost,
                        quantum_cost,
                    });
                    let stem = format!("{}_{}", point.tag, output.method);
                    write_atomic(&run_dir.join(format!("sigma_bar_{stem}.cq64")), |tmp| {
                        write_complex_matrix(tmp, &img.estimates).map_err(Into::into)
                    })?;
                    write_atomic(&run_dir.join(format!("image_{stem}.pgm")), |tmp| {
                        write_pgm(tmp, &img.image).map_err(Into::into)
                    })?;
                }
            }
        }
    }

    warnings.extend(trend_warnings(&rows));

    let csv_path = run_dir.join("results.csv");
    write_text_atomic(&csv_path, &render_csv(&rows))?;

    let wall_time = t0.elapsed();
    let report_text = render_report(
        config,
        &points,
        &rows,
        &complexity_blocks,
        &warnings,
        &failures,
        wall_time,
    );
    write_text_atomic(&run_dir.join("report.txt"), &report_text)?;

    Ok(RunSummary { output_dir: run_dir, csv_path, rows, failures, warnings, wall_time })
}

/// Complexity instantiation at one rate, with measured counters.
///
/// The range-cell count L_t is taken from the nominal radar block when
/// present: the emulated system sweeps its full range profile even
/// though the simulation images a reduced subset of cells.
fn rate_complexity(
    config: &ExperimentConfig,
    kept: usize,
    kappa: f64,
    n_c: usize,
    img: &RangeCellImage,
) -> ComplexityReport {
    let dims = ComplexityDims {
        range_cells: config.radar.as_ref().map(|r| r.pulses).unwrap_or(config.scene.range_cells),
        grid_size: config.scene.grid,
        kept_pulses: kept,
        sparsity: config.scene.sparsity,
        condition_number: kappa,
        clock_qubits: n_c,
    };
    complexity_report(
        dims,
        (img.gate_count_total > 0).then_some(img.gate_count_total),
        (img.flops_total > 0).then_some(img.flops_total),
    )
}

/// Flags rates where shrinking the aperture somehow improved the error;
/// reported, never asserted.
fn trend_warnings(rows: &[ResultRow]) -> Vec<String> {
    let mut warnings = Vec::new();
    let methods: Vec<MethodName> = {
        let mut seen = Vec::new();
        for row in rows {
            if !seen.contains(&row.method) {
                seen.push(row.method);
            }
        }
        seen
    };
    for method in methods {
        let mut by_rate: Vec<(f64, f64)> =
            rows.iter().filter(|r| r.method == method).map(|r| (r.rate, r.rmse)).collect();
        by_rate.sort_by(|a, b| b.0.total_cmp(&a.0));
        for pair in by_rate.windows(2) {
            let (hi_rate, hi_rmse) = pair[0];
            let (lo_rate, lo_rmse) = pair[1];
            let slack = 1e-9 + 0.05 * hi_rmse;
            if lo_rmse + slack < hi_rmse {
                warnings.push(format!(
                    "{method}: rmse fell from {hi_rmse:e} at rate {hi_rate} to {lo_rmse:e} at rate {lo_rate}; expected nondecreasing error as the aperture shrinks"
                ));
            }
        }
    }
    warnings
}

fn render_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(
        "rate,method,rmse,p1,gate_count,flops,qubits_s,qubits_a,qubits_b,qubits_c,qubits_i,qubits_total,classical_sweep_cost,quantum_cell_cost\n",
    );
    for row in rows {
        let p1 = row.p1.map(|p| format!("{p:e}")).unwrap_or_default();
        let (qs, qa, qb, qc, qi, qt) = match &row.registers {
            Some(p) => (
                "1".to_string(),
                p.n_a.to_string(),
                "1".to_string(),
                p.n_c.to_string(),
                p.n_i.to_string(),
                p.total_qubits().to_string(),
            ),
            None => Default::default(),
        };
        let classical = row.classical_cost.map(|c| format!("{c:e}")).unwrap_or_default();
        let quantum = row.quantum_cost.map(|c| format!("{c:e}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{:e},{},{},{},{},{},{},{},{},{},{},{}",
            row.rate,
            row.method,
            row.rmse,
            p1,
            row.gate_count,
            row.flops,
            qs,
            qa,
            qb,
            qc,
            qi,
            qt,
            classical,
            quantum,
        );
    }
    out
}

fn render_report(
    config: &ExperimentConfig,
    points: &[RatePoint],
    rows: &[ResultRow],
    complexity_blocks: &[String],
    warnings: &[String],
    failures: &[String],
    wall_time: Duration,
) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "experiment: {}", config.label);
    let _ = writeln!(w, "seed: {}", config.seed);
    let methods: Vec<String> = config.methods.iter().map(|m| m.to_string()).collect();
    let _ = writeln!(w, "methods: {}", methods.join(", "));
    let _ = writeln!(
        w,
        "scene: {} range cells x {} grid cells, {} scatterers per cell",
        config.scene.range_cells, config.scene.grid, config.scene.sparsity
    );
    match config.noise.snr_db {
        Some(snr) => {
            let _ = writeln!(w, "noise: {snr} dB snr");
        }
        None => {
            let _ = writeln!(w, "noise: none");
        }
    }
    match config.solver.eta {
        EtaSetting::Fixed(x) => {
            let _ = writeln!(w, "eta: {x} (fixed), lambda0: {}", config.solver.lambda0);
        }
        EtaSetting::Auto => {
            let _ = writeln!(
                w,
                "eta: auto over [{}, {}], lambda0: {}",
                config.solver.eta_grid[0], config.solver.eta_grid[1], config.solver.lambda0
            );
        }
    }
    if let Some(radar) = &config.radar {
        let _ = write!(
            w,
            "nominal radar: {} GHz carrier, {} MHz bandwidth, {} slow-time samples",
            radar.carrier_frequency_hz / 1e9,
            radar.bandwidth_hz / 1e6,
            radar.pulses
        );
        if let Some(prf) = radar.prf_hz {
            let _ = write!(w, ", {prf} Hz prf");
        }
        let _ = writeln!(w);
    }

    let _ = writeln!(w, "\nresults:");
    for point in points {
        let _ = writeln!(
            w,
            "rate {} ({} of {} pulses kept):",
            point.rate, point.kept, config.scene.grid
        );
        let mut qra_rmse = None;
        let mut omp_rmse = None;
        for row in rows.iter().filter(|r| r.rate == point.rate) {
            let mut line = format!("  {}: rmse {:e}", row.method, row.rmse);
            if let Some(p1) = row.p1 {
                let _ = write!(line, ", p1 {p1:.4}");
            }
            if row.gate_count > 0 {
                let _ = write!(line, ", gates {}", row.gate_count);
            }
            if row.flops > 0 {
                let _ = write!(line, ", flops {}", row.flops);
            }
            if let Some(p) = &row.registers {
                let _ = write!(
                    line,
                    ", registers S=1 A={} B=1 C={} I={} (total {})",
                    p.n_a,
                    p.n_c,
                    p.n_i,
                    p.total_qubits()
                );
            }
            let _ = writeln!(w, "{line}");
            match row.method {
                MethodName::Qra => qra_rmse = Some(row.rmse),
                MethodName::Omp => omp_rmse = Some(row.rmse),
                MethodName::Oracle => {}
            }
        }
        if let (Some(q), Some(o)) = (qra_rmse, omp_rmse) {
            let verdict = if q >= o { "quantum error >= classical, as expected" } else { "quantum error below classical" };
            let _ = writeln!(w, "  qra vs omp: {:e} vs {:e} ({verdict})", q, o);
        }
    }

    if !complexity_blocks.is_empty() {
        let _ = writeln!(w, "\ncomplexity instantiation:");
        for block in complexity_blocks {
            let _ = writeln!(w, "{block}");
        }
    }

    let _ = writeln!(w, "\nwarnings:");
    if warnings.is_empty() {
        let _ = writeln!(w, "  none");
    }
    for warning in warnings {
        let _ = writeln!(w, "  - {warning}");
    }
    let _ = writeln!(w, "\nfailures:");
    if failures.is_empty() {
        let _ = writeln!(w, "  none");
    }
    for failure in failures {
        let _ = writeln!(w, "  - {failure}");
    }
    let _ = writeln!(w, "\nwall time: {:.3} s", wall_time.as_secs_f64());
    out
}
