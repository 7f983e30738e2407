//! End-to-end sparse reconstruction through the quantum solver.
//!
//! One call runs the whole chain: build the regularized system, pick η,
//! calibrate and build the circuit, solve, truncate to the K largest
//! coefficients, and optionally debias the kept amplitudes. A classical
//! shadow path runs the identical chain with the eigenbasis solve in
//! place of the circuit, for cross-checking.

use super::config::{Debias, EtaStrategy, QraConfig, RotationStrategy};
use super::PipelineError;
use crate::hhl::{
    calibrate_spectrum, generalized_params, HhlError, HhlOutcome, HhlSolver,
    input_register_width, DEFAULT_N_SA_MULTIPLIER,
};
use crate::solvers::{
    build_regularized_system, direct_solve, restricted_least_squares, top_k, MethodTag,
    RecoveryResult, RegularizedSystem,
};
use crate::{CMatrix, CVector};

/// A quantum reconstruction with its circuit diagnostics.
#[derive(Debug, Clone)]
pub struct QraOutcome {
    /// Sparse recovery tagged [`MethodTag::Qra`]; `dense` holds the full
    /// rescaled solve σ̃ before truncation.
    pub recovery: RecoveryResult,
    /// Circuit-level diagnostics from the underlying solve.
    pub circuit: HhlOutcome,
    /// The η actually used (resolved when the strategy is a search).
    pub eta: f64,
    pub lambda0: f64,
    /// True when the clock-keyed fallback rotation ran instead of the
    /// exact divisor construction.
    pub fallback_used: bool,
}

/// Builds the system at the configured operating point, searching η if
/// requested.
///
/// The search builds the Gram spectrum once at η = 1 and rescales it
/// analytically (λ(η) = η(λ(1) − λ₀) + λ₀), so each candidate costs one
/// calibration attempt and only the winner triggers a matrix rebuild.
pub(crate) fn resolve_system(
    phi: &CMatrix,
    y: &CVector,
    config: &QraConfig,
) -> Result<RegularizedSystem, PipelineError> {
    let n_i = input_register_width(phi.ncols());
    let multiplier = config.n_sa_multiplier.unwrap_or(DEFAULT_N_SA_MULTIPLIER);
    match config.eta {
        EtaStrategy::Fixed(eta) => {
            Ok(build_regularized_system(phi, y, eta, config.lambda0)?)
        }
        EtaStrategy::Auto { min, max } => {
            if min == 0 || max < min {
                return Err(PipelineError::InvalidInput(format!(
                    "eta search grid {min}..={max} is empty or starts at zero"
                )));
            }
            let base = build_regularized_system(phi, y, 1.0, config.lambda0)?;
            let gram_spectrum: Vec<f64> =
                base.eigenvalues().iter().map(|l| l - config.lambda0).collect();
            let mut last_failure = None;
            for eta in min..=max {
                let spectrum: Vec<f64> =
                    gram_spectrum.iter().map(|m| eta as f64 * m + config.lambda0).collect();
                match calibrate_spectrum(&spectrum, n_i, config.qubit_budget, multiplier) {
                    Ok(_) => {
                        if eta == 1 {
                            return Ok(base);
                        }
                        let rebuilt = RegularizedSystem::from_eigensystem(
                            &spectrum,
                            base.eigenvectors(),
                            base.rhs().clone(),
                            eta as f64,
                            config.lambda0,
                        )?;
                        return Ok(rebuilt);
                    }
                    Err(e) => last_failure = Some(e),
                }
            }
            match config.rotation {
                // The fallback does not need integrality; run it at the
                // lowest grid point.
                RotationStrategy::AllowFallback { .. } => {
                    let spectrum: Vec<f64> =
                        gram_spectrum.iter().map(|m| min as f64 * m + config.lambda0).collect();
                    if min == 1 {
                        return Ok(base);
                    }
                    Ok(RegularizedSystem::from_eigensystem(
                        &spectrum,
                        base.eigenvectors(),
                        base.rhs().clone(),
                        min as f64,
                        config.lambda0,
                    )?)
                }
                RotationStrategy::ExactOnly => Err(PipelineError::Calibration {
                    grid: format!("{min}..={max}"),
                    source: last_failure.expect("non-empty grid was scanned"),
                }),
            }
        }
    }
}

/// Checks whether `phi` calibrates at the configured operating point,
/// without running any circuit.
///
/// Returns the η that produced an integral spectrum. The error is the
/// one a real run would report, so front ends can surface it as a
/// pre-flight diagnostic; a config that allows the fallback rotation
/// still gets the error here, telling it the fallback would engage.
pub fn calibration_dry_run(phi: &CMatrix, config: &QraConfig) -> Result<f64, PipelineError> {
    let sys = resolve_system(phi, &CVector::zeros(phi.nrows()), config)?;
    let n_i = input_register_width(sys.dimension());
    let multiplier = config.n_sa_multiplier.unwrap_or(DEFAULT_N_SA_MULTIPLIER);
    calibrate_spectrum(sys.eigenvalues(), n_i, config.qubit_budget, multiplier)
        .map(|_| sys.eta())
        .map_err(|source| PipelineError::Calibration {
            grid: match config.eta {
                EtaStrategy::Fixed(eta) => format!("fixed eta {eta}"),
                EtaStrategy::Auto { min, max } => format!("{min}..={max}"),
            },
            source,
        })
}

/// Builds the circuit for a resolved system, switching to the fallback
/// rotation if calibration fails and the config allows it.
pub(crate) fn build_solver(
    sys: RegularizedSystem,
    config: &QraConfig,
) -> Result<(HhlSolver, bool), PipelineError> {
    let n_i = input_register_width(sys.dimension());
    let multiplier = config.n_sa_multiplier.unwrap_or(DEFAULT_N_SA_MULTIPLIER);
    match calibrate_spectrum(sys.eigenvalues(), n_i, config.qubit_budget, multiplier) {
        Ok(params) => Ok((HhlSolver::new(sys, params)?, false)),
        Err(source) => match config.rotation {
            RotationStrategy::AllowFallback { clock_qubits } => {
                let params =
                    generalized_params(sys.eigenvalues(), n_i, config.qubit_budget, clock_qubits)
                        .map_err(HhlError::from)?;
                Ok((HhlSolver::new(sys, params)?, true))
            }
            RotationStrategy::ExactOnly => {
                let grid = match config.eta {
                    EtaStrategy::Fixed(eta) => format!("fixed eta {eta}"),
                    EtaStrategy::Auto { min, max } => format!("{min}..={max}"),
                };
                Err(PipelineError::Calibration { grid, source })
            }
        },
    }
}

/// Applies the configured amplitude correction on the selected support.
///
/// Returns the corrected sparse vector and whether a rank-deficient
/// refit needed a ridge.
fn apply_debias(
    phi: &CMatrix,
    y: &CVector,
    support: &[usize],
    masked: &CVector,
    config: &QraConfig,
    eta: f64,
) -> (CVector, bool) {
    match config.debias {
        Debias::None => (masked.clone(), false),
        Debias::Diagonal => {
            let mut out = masked.clone();
            for &k in support {
                let g_kk = phi.column(k).norm_squared();
                if g_kk > 1e-300 {
                    // Inverse of the scalar shrinkage g/(ηg + λ₀) at the
                    // column's own Gram diagonal.
                    out[k] *= (eta * g_kk + config.lambda0) / g_kk;
                }
            }
            (out, false)
        }
        Debias::LeastSquares => {
            let (coeffs, ridged) = restricted_least_squares(phi, y, support);
            let mut out = CVector::zeros(masked.len());
            for (slot, &k) in support.iter().enumerate() {
                out[k] = coeffs[slot];
            }
            (out, ridged)
        }
    }
}

pub(crate) fn sparsify(
    phi: &CMatrix,
    y: &CVector,
    dense: &CVector,
    k: usize,
    config: &QraConfig,
    eta: f64,
    method: MethodTag,
) -> Result<RecoveryResult, PipelineError> {
    let picked = top_k(dense, k)?;
    let (sparse, used_ridge_fallback) =
        apply_debias(phi, y, &picked.support, &picked.sparse, config, eta);
    let residual_norm = (y - phi * &sparse).norm();
    Ok(RecoveryResult {
        sparse,
        dense: dense.clone(),
        support: picked.support,
        residual_norm,
        iterations: 1,
        flops: 0,
        used_ridge_fallback,
        method,
    })
}

/// Quantum-path sparse reconstruction: regularized solve on the circuit,
/// then K-term truncation and optional debias.
pub fn qra_reconstruct(
    phi: &CMatrix,
    y: &CVector,
    k: usize,
    config: &QraConfig,
) -> Result<QraOutcome, PipelineError> {
    check_shape(phi, y, k)?;
    let sys = resolve_system(phi, y, config)?;
    let eta = sys.eta();
    let lambda0 = sys.lambda0();
    let (solver, fallback_used) = build_solver(sys, config)?;
    let circuit = solver.solve()?;
    let recovery = sparsify(phi, y, &circuit.solution, k, config, eta, MethodTag::Qra)?;
    Ok(QraOutcome { recovery, circuit, eta, lambda0, fallback_used })
}

/// The classical twin of [`qra_reconstruct`]: identical system build,
/// truncation, and debias, but the regularized solve runs in the
/// eigenbasis. Supports and coefficients must agree with the quantum
/// path to the circuit's approximation error.
pub fn classical_shadow(
    phi: &CMatrix,
    y: &CVector,
    k: usize,
    config: &QraConfig,
) -> Result<RecoveryResult, PipelineError> {
    check_shape(phi, y, k)?;
    let sys = resolve_system(phi, y, config)?;
    let eta = sys.eta();
    let dense = direct_solve(&sys)?;
    sparsify(phi, y, &dense, k, config, eta, MethodTag::Oracle)
}

fn check_shape(phi: &CMatrix, y: &CVector, k: usize) -> Result<(), PipelineError> {
    if phi.nrows() != y.len() {
        return Err(PipelineError::InvalidInput(format!(
            "{} measurement rows but {} data entries",
            phi.nrows(),
            y.len()
        )));
    }
    if k == 0 || k > phi.ncols() {
        return Err(PipelineError::InvalidInput(format!(
            "sparsity {} out of range for {} grid cells",
            k,
            phi.ncols()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radar::{build_partial_fourier_dictionary, ApertureSelection};
    use crate::solvers::{omp, rmse};
    use num_complex::Complex64;

    fn e(i: usize, n: usize) -> CVector {
        CVector::from_fn(n, |j, _| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
    }

    #[test]
    fn identity_design_matrix_keeps_the_regularized_scale() {
        // Ξ = 2I, so the undebiased estimate is Y/2 and top-1 keeps the
        // driven cell.
        let phi = CMatrix::identity(4, 4);
        let y = e(0, 4);
        let out = qra_reconstruct(&phi, &y, 1, &QraConfig::fixed(1.0, 1.0)).unwrap();
        assert_eq!(out.recovery.support, vec![0]);
        assert_eq!(out.recovery.method, MethodTag::Qra);
        assert!((out.recovery.sparse[0].re - 0.5).abs() < 1e-4);
        assert!(!out.fallback_used);
        assert_eq!(out.eta, 1.0);
    }

    #[test]
    fn full_aperture_two_sparse_scene_recovers_exactly() {
        let aperture = ApertureSelection::full(16).unwrap();
        let phi = build_partial_fourier_dictionary(16, &aperture).unwrap().matrix;
        let mut sigma = CVector::zeros(16);
        sigma[3] = Complex64::new(1.0, 0.5);
        sigma[11] = Complex64::new(-0.7, 0.3);
        let y = &phi * &sigma;
        let config = QraConfig { debias: Debias::LeastSquares, ..QraConfig::fixed(1.0, 1.0) };
        let out = qra_reconstruct(&phi, &y, 2, &config).unwrap();
        assert_eq!(out.recovery.support, vec![3, 11]);
        assert!(rmse(&out.recovery.sparse, &sigma).unwrap() < 1e-6);
    }

    #[test]
    fn half_aperture_three_sparse_tracks_the_greedy_solver() {
        // Matched-seed paired run: the quantum path must land within 0.1
        // absolute of the greedy baseline on the same data.
        let aperture = ApertureSelection::random_subset(64, 32, 4).unwrap();
        let phi = build_partial_fourier_dictionary(64, &aperture).unwrap().matrix;
        let mut sigma = CVector::zeros(64);
        sigma[5] = Complex64::new(1.0, 0.0);
        sigma[20] = Complex64::new(0.0, 0.8);
        sigma[40] = Complex64::new(-0.6, 0.2);
        let y = &phi * &sigma;

        let config = QraConfig { debias: Debias::LeastSquares, ..QraConfig::default() };
        let quantum = qra_reconstruct(&phi, &y, 3, &config).unwrap();
        let greedy = omp(&phi, &y, 3).unwrap();
        let rmse_q = rmse(&quantum.recovery.sparse, &sigma).unwrap();
        let rmse_o = rmse(&greedy.sparse, &sigma).unwrap();
        // The unit-modulus dictionary scales to the integral spectrum
        // {1, 2} already at the lowest grid point.
        assert_eq!(quantum.eta, 1.0);
        assert!(rmse_q < 0.1, "quantum rmse {rmse_q}");
        assert!(rmse_o < 1e-6, "greedy rmse {rmse_o}");
        assert!((rmse_q - rmse_o).abs() < 0.1);
    }

    #[test]
    fn shadow_path_matches_the_quantum_path() {
        let aperture = ApertureSelection::random_subset(64, 32, 4).unwrap();
        let phi = build_partial_fourier_dictionary(64, &aperture).unwrap().matrix;
        let mut sigma = CVector::zeros(64);
        sigma[5] = Complex64::new(1.0, 0.0);
        sigma[20] = Complex64::new(0.0, 0.8);
        sigma[40] = Complex64::new(-0.6, 0.2);
        let y = &phi * &sigma;

        // No debias and a fine rotation: the two paths agree to the
        // circuit's own approximation error, well inside 1e−5.
        let config = QraConfig { n_sa_multiplier: Some(1024), ..QraConfig::default() };
        let quantum = qra_reconstruct(&phi, &y, 3, &config).unwrap();
        let shadow = classical_shadow(&phi, &y, 3, &config).unwrap();
        assert_eq!(quantum.recovery.support, shadow.support);
        assert_eq!(shadow.method, MethodTag::Oracle);
        let diff = (&quantum.recovery.sparse - &shadow.sparse).norm();
        assert!(diff < 1e-5 * shadow.sparse.norm(), "coefficient drift {diff}");
        let dense_diff = (&quantum.recovery.dense - &shadow.dense).norm();
        assert!(dense_diff < 1e-5 * shadow.dense.norm());
    }

    #[test]
    fn grid_relabeling_permutes_the_reconstruction() {
        let aperture = ApertureSelection::random_subset(16, 8, 3).unwrap();
        let phi = build_partial_fourier_dictionary(16, &aperture).unwrap().matrix;
        let mut sigma = CVector::zeros(16);
        sigma[2] = Complex64::new(1.0, 0.0);
        sigma[9] = Complex64::new(0.0, -0.5);
        let y = &phi * &sigma;

        // Cyclic relabeling of the grid cells.
        let perm: Vec<usize> = (0..16).map(|j| (j + 5) % 16).collect();
        let phi_perm = CMatrix::from_fn(8, 16, |i, j| phi[(i, perm[j])]);

        let config = QraConfig { debias: Debias::LeastSquares, ..QraConfig::fixed(1.0, 1.0) };
        let base = qra_reconstruct(&phi, &y, 2, &config).unwrap();
        let relabeled = qra_reconstruct(&phi_perm, &y, 2, &config).unwrap();

        let mut mapped_support: Vec<usize> =
            relabeled.recovery.support.iter().map(|&j| perm[j]).collect();
        mapped_support.sort_unstable();
        assert_eq!(mapped_support, base.recovery.support);
        for (j, &p) in perm.iter().enumerate() {
            let diff = (relabeled.recovery.sparse[j] - base.recovery.sparse[p]).norm();
            assert!(diff < 1e-9, "cell {j} drifted by {diff}");
        }
    }

    #[test]
    fn rescaling_the_data_rescales_the_estimate() {
        let aperture = ApertureSelection::random_subset(16, 8, 11).unwrap();
        let phi = build_partial_fourier_dictionary(16, &aperture).unwrap().matrix;
        let mut sigma = CVector::zeros(16);
        sigma[6] = Complex64::new(0.9, -0.4);
        let y = &phi * &sigma;
        let c = Complex64::new(-1.3, 0.7);

        let config = QraConfig { debias: Debias::LeastSquares, ..QraConfig::fixed(1.0, 1.0) };
        let base = qra_reconstruct(&phi, &y, 1, &config).unwrap();
        let scaled = qra_reconstruct(&phi, &(&y * c), 1, &config).unwrap();
        assert_eq!(base.recovery.support, scaled.recovery.support);
        let diff = (&scaled.recovery.sparse - &(&base.recovery.sparse * c)).norm();
        assert!(diff < 1e-9 * base.recovery.sparse.norm(), "linearity drift {diff}");
    }

    #[test]
    fn calibration_failure_names_the_remediation() {
        // Gram diagonal {1, √2}: no integer η scales λ = η√2 + 1 to an
        // integer, so the search must fail with an actionable hint.
        let mut phi = CMatrix::zeros(2, 2);
        phi[(0, 0)] = Complex64::new(1.0, 0.0);
        phi[(1, 1)] = Complex64::new(2f64.powf(0.25), 0.0);
        let y = e(0, 2);
        let config =
            QraConfig { eta: EtaStrategy::Auto { min: 1, max: 8 }, ..QraConfig::default() };
        let err = qra_reconstruct(&phi, &y, 1, &config).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("fallback"), "{message}");
        assert!(message.contains("eta"), "{message}");
    }

    #[test]
    fn fallback_strategy_recovers_when_exact_calibration_cannot() {
        // Same irrational Gram entry, but the scene lives in a cleanly
        // separated cell, so support recovery plus least-squares refit
        // still lands on the exact coefficients.
        let mut phi = CMatrix::identity(4, 4);
        phi[(2, 2)] = Complex64::new(2f64.powf(0.25), 0.0);
        let mut sigma = CVector::zeros(4);
        sigma[2] = Complex64::new(2.0, -1.0);
        let y = &phi * &sigma;
        let config = QraConfig {
            eta: EtaStrategy::Auto { min: 1, max: 4 },
            rotation: RotationStrategy::AllowFallback { clock_qubits: Some(8) },
            debias: Debias::LeastSquares,
            ..QraConfig::default()
        };
        let out = qra_reconstruct(&phi, &y, 1, &config).unwrap();
        assert!(out.fallback_used);
        assert_eq!(out.recovery.support, vec![2]);
        assert!(rmse(&out.recovery.sparse, &sigma).unwrap() < 1e-6);
    }

    #[test]
    fn diagonal_debias_restores_unit_column_amplitudes() {
        // For Φ with unit-norm columns the shrinkage factor is exactly
        // (η + λ₀)⁻¹, so the diagonal correction cancels it.
        let phi = CMatrix::identity(4, 4);
        let y = e(1, 4);
        let config = QraConfig { debias: Debias::Diagonal, ..QraConfig::fixed(1.0, 1.0) };
        let out = qra_reconstruct(&phi, &y, 1, &config).unwrap();
        assert_eq!(out.recovery.support, vec![1]);
        assert!((out.recovery.sparse[1].re - 1.0).abs() < 2e-4, "{}", out.recovery.sparse[1]);
    }

    #[test]
    fn shape_violations_are_rejected() {
        let phi = CMatrix::identity(4, 4);
        let y = e(0, 4);
        let config = QraConfig::fixed(1.0, 1.0);
        assert!(matches!(
            qra_reconstruct(&phi, &y, 0, &config),
            Err(PipelineError::InvalidInput(_))
        ));
        assert!(matches!(
            qra_reconstruct(&phi, &y, 5, &config),
            Err(PipelineError::InvalidInput(_))
        ));
        let short = e(0, 3);
        assert!(matches!(
            qra_reconstruct(&phi, &short, 1, &config),
            Err(PipelineError::InvalidInput(_))
        ));
    }
}
