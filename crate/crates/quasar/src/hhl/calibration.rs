use thiserror::Error;

use crate::qsim::MAX_QUBITS;

/// Calibration declares a scaled eigenvalue integral when it is at most
/// this far from a positive integer.
pub const INTEGRALITY_TOL: f64 = 1e-6;

/// Default ratio between the rotation divisor and the largest reciprocal
/// N_a/λ̃_min; keeps the sin(x) ≈ x linearization error below 1e−4.
pub const DEFAULT_N_SA_MULTIPLIER: u64 = 64;

/// Hard cap on the clock register during calibration search; scaled
/// eigenvalues are held in u64 and their lcm must not overflow.
const MAX_CLOCK_QUBITS: usize = 32;
const MAX_LCM: u64 = 1 << 40;

/// How the eigenvalue-reciprocal rotation is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationMode {
    /// Integer-calibrated spectrum: registers A and B realize the
    /// common-multiple interference and the rotation is exact on every
    /// eigenbranch.
    LcmExact,
    /// Textbook arcsin rotation keyed directly off the clock register;
    /// used when no scaling makes the spectrum integral. Registers A and
    /// B are bypassed and reciprocals are only as accurate as the clock
    /// estimate.
    GeneralizedFallback,
}

/// Calibrated circuit parameters.
///
/// For [`RotationMode::LcmExact`], every λ̃_j = 2^{(n_c−n_λ)}λ_j is a
/// positive integer, N_a is their least common multiple, each divisor
/// N_a/λ̃_j fits in n_a bits, and N_sa ≥ N_a/λ̃_min so every rotation
/// argument is at most 1.
#[derive(Debug, Clone, PartialEq)]
pub struct HhlParams {
    /// Clock register width.
    pub n_c: usize,
    /// Bit length of the largest eigenvalue's integer part (0 when the
    /// spectrum tops out below 1); fixes the scaling 2^{(n_c−n_λ)}.
    pub n_lambda: u32,
    /// Reciprocal register width.
    pub n_a: usize,
    /// Input register width.
    pub n_i: usize,
    /// Scaled integer eigenvalues aligned with the system's ascending
    /// spectrum; empty in fallback mode.
    pub scaled_eigenvalues: Vec<u64>,
    /// N_a, the least common multiple of the scaled eigenvalues (1 in
    /// fallback mode).
    pub lcm: u64,
    /// Rotation divisor N_sa (unused in fallback mode).
    pub n_sa: u64,
    pub mode: RotationMode,
}

impl HhlParams {
    /// The eigenvalue scaling 2^{(n_c − n_λ)}.
    pub fn scale(&self) -> f64 {
        2f64.powi(self.n_c as i32 - self.n_lambda as i32)
    }

    /// Total circuit width: S and B plus the three sized registers.
    pub fn total_qubits(&self) -> usize {
        2 + self.n_a + self.n_c + self.n_i
    }

    /// Per-eigenbranch divisors l_j = N_a/λ̃_j (exact mode only).
    pub fn divisors(&self) -> Vec<u64> {
        self.scaled_eigenvalues.iter().map(|&v| self.lcm / v).collect()
    }
}

#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("spectrum is empty")]
    EmptySpectrum,
    #[error("spectrum contains non-finite or non-positive eigenvalues")]
    InvalidSpectrum,
    #[error(
        "no clock width up to {attempted_n_c} makes the spectrum integral; \
         best residual fractional parts {residuals:?}"
    )]
    NonIntegralSpectrum { attempted_n_c: usize, residuals: Vec<f64> },
    #[error("circuit needs {total} qubits but the budget is {budget}")]
    BudgetExceeded { total: usize, budget: usize },
    #[error("calibration arithmetic overflow: {0}")]
    Overflow(String),
}

fn bit_length(x: u64) -> u32 {
    64 - x.leading_zeros()
}

/// Distance from x to the nearest integer ≥ 1.
fn distance_to_positive_integer(x: f64) -> f64 {
    if x < 1.0 {
        1.0 - x
    } else {
        (x - x.round()).abs()
    }
}

/// Bit length of the integer part of λ_max, snapping to the rounded value
/// when λ_max sits within the integrality tolerance of an integer.
fn integer_bit_length(lambda_max: f64) -> u32 {
    let rounded = lambda_max.round();
    if rounded >= 1.0 && (lambda_max - rounded).abs() <= INTEGRALITY_TOL {
        bit_length(rounded as u64)
    } else {
        bit_length(lambda_max.floor() as u64)
    }
}

fn lcm_of(values: impl Iterator<Item = u64>) -> Result<u64, CalibrationError> {
    fn gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }
    let mut acc: u64 = 1;
    for v in values {
        let g = gcd(acc, v);
        acc = (acc / g)
            .checked_mul(v)
            .filter(|&x| x <= MAX_LCM)
            .ok_or_else(|| CalibrationError::Overflow("common multiple exceeds 2^40".into()))?;
    }
    Ok(acc)
}

fn check_spectrum(eigenvalues: &[f64]) -> Result<(), CalibrationError> {
    if eigenvalues.is_empty() {
        return Err(CalibrationError::EmptySpectrum);
    }
    if eigenvalues.iter().any(|l| !l.is_finite() || *l <= 0.0) {
        return Err(CalibrationError::InvalidSpectrum);
    }
    Ok(())
}

/// Calibrates a positive spectrum onto integer clock readouts.
///
/// Picks the smallest clock width n_c ≥ 1 for which every scaled
/// eigenvalue 2^{(n_c−n_λ)}λ_j lands within [`INTEGRALITY_TOL`] of an
/// integer ≥ 1, then sizes the reciprocal register from the largest
/// divisor N_a/λ̃_min. Scaling both up (fractional spectra) and down
/// (spectra with a common power-of-two factor) is allowed.
pub fn calibrate_spectrum(
    eigenvalues: &[f64],
    n_i: usize,
    qubit_budget: usize,
    n_sa_multiplier: u64,
) -> Result<HhlParams, CalibrationError> {
    check_spectrum(eigenvalues)?;
    if n_sa_multiplier == 0 {
        return Err(CalibrationError::Overflow("rotation multiplier must be positive".into()));
    }
    let budget = qubit_budget.min(MAX_QUBITS);
    let lambda_max = eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b));
    let n_lambda = integer_bit_length(lambda_max);

    // The other registers need at least 2 + 1 + n_i qubits.
    let clock_room = budget.saturating_sub(3 + n_i).min(MAX_CLOCK_QUBITS);
    if clock_room == 0 {
        return Err(CalibrationError::BudgetExceeded { total: 4 + n_i, budget });
    }

    let mut best: Option<(usize, Vec<f64>, f64)> = None;
    for n_c in 1..=clock_room {
        let scale = 2f64.powi(n_c as i32 - n_lambda as i32);
        let residuals: Vec<f64> =
            eigenvalues.iter().map(|l| distance_to_positive_integer(scale * l)).collect();
        let worst = residuals.iter().fold(0.0f64, |a, &b| a.max(b));
        if worst <= INTEGRALITY_TOL {
            let scaled: Vec<u64> =
                eigenvalues.iter().map(|l| (scale * l).round() as u64).collect();
            let mut distinct = scaled.clone();
            distinct.sort_unstable();
            distinct.dedup();
            let lcm = lcm_of(distinct.iter().copied())?;
            let l_max = lcm / *distinct.first().expect("non-empty spectrum");
            let n_a = bit_length(l_max) as usize;
            let total = 2 + n_a + n_c + n_i;
            if total > budget {
                // Larger clocks only widen the circuit; fail now.
                return Err(CalibrationError::BudgetExceeded { total, budget });
            }
            let n_sa = n_sa_multiplier
                .checked_mul(l_max)
                .ok_or_else(|| CalibrationError::Overflow("rotation divisor overflow".into()))?;
            return Ok(HhlParams {
                n_c,
                n_lambda,
                n_a,
                n_i,
                scaled_eigenvalues: scaled,
                lcm,
                n_sa,
                mode: RotationMode::LcmExact,
            });
        }
        match &best {
            Some((_, _, b)) if *b <= worst => {}
            _ => best = Some((n_c, residuals, worst)),
        }
    }
    let (attempted_n_c, residuals, _) = best.expect("at least one clock width was tried");
    Err(CalibrationError::NonIntegralSpectrum { attempted_n_c, residuals })
}

/// Parameters for the fallback rotation: no integrality demanded; the
/// clock width is chosen directly (or defaulted to min(8, room)).
pub fn generalized_params(
    eigenvalues: &[f64],
    n_i: usize,
    qubit_budget: usize,
    requested_n_c: Option<usize>,
) -> Result<HhlParams, CalibrationError> {
    check_spectrum(eigenvalues)?;
    let budget = qubit_budget.min(MAX_QUBITS);
    let clock_room = budget.saturating_sub(3 + n_i).min(MAX_CLOCK_QUBITS);
    if clock_room == 0 {
        return Err(CalibrationError::BudgetExceeded { total: 4 + n_i, budget });
    }
    let n_c = requested_n_c.unwrap_or_else(|| clock_room.min(8));
    if n_c == 0 || n_c > clock_room {
        return Err(CalibrationError::BudgetExceeded { total: 3 + n_c + n_i, budget });
    }
    let lambda_max = eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b));
    Ok(HhlParams {
        n_c,
        n_lambda: integer_bit_length(lambda_max),
        n_a: 1,
        n_i,
        scaled_eigenvalues: Vec::new(),
        lcm: 1,
        n_sa: 0,
        mode: RotationMode::GeneralizedFallback,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_of_two_spectrum_keeps_its_own_values() {
        let p = calibrate_spectrum(&[1.0, 2.0, 4.0], 3, 26, 64).unwrap();
        assert_eq!(p.n_lambda, 3);
        assert_eq!(p.n_c, 3);
        assert_eq!(p.scaled_eigenvalues, vec![1, 2, 4]);
        assert_eq!(p.lcm, 4);
        assert_eq!(p.n_a, 3); // divisors up to 4 need 3 bits
        assert_eq!(p.divisors(), vec![4, 2, 1]);
        assert!((p.scale() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_eigenvalue_collapses_to_one_qubit_registers() {
        let p = calibrate_spectrum(&[1.0], 1, 26, 64).unwrap();
        assert_eq!(p.n_c, 1);
        assert_eq!(p.scaled_eigenvalues, vec![1]);
        assert_eq!(p.lcm, 1);
        assert_eq!(p.n_a, 1);
        assert_eq!(p.n_sa, 64);
    }

    #[test]
    fn uniform_doubled_spectrum_scales_down() {
        // All eigenvalues 2: the scaling halves them onto the integer 1.
        let p = calibrate_spectrum(&[2.0, 2.0], 2, 26, 64).unwrap();
        assert_eq!(p.n_lambda, 2);
        assert_eq!(p.n_c, 1);
        assert_eq!(p.scaled_eigenvalues, vec![1, 1]);
        assert!((p.scale() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn half_integer_spectrum_doubles_until_integral() {
        let p = calibrate_spectrum(&[1.0, 1.5, 3.0], 7, 26, 64).unwrap();
        assert_eq!(p.n_lambda, 2);
        assert_eq!(p.n_c, 3);
        assert_eq!(p.scaled_eigenvalues, vec![2, 3, 6]);
        assert_eq!(p.lcm, 6);
        assert_eq!(p.divisors(), vec![3, 2, 1]);
        assert_eq!(p.n_a, 2);
        assert_eq!(p.total_qubits(), 2 + 2 + 3 + 7);
    }

    #[test]
    fn near_integral_spectra_snap_within_tolerance() {
        let p = calibrate_spectrum(&[1.0 + 4e-7, 2.0 - 3e-7], 2, 26, 64).unwrap();
        assert_eq!(p.scaled_eigenvalues, vec![1, 2]);
        // Just past the tolerance: rejected.
        let err = calibrate_spectrum(&[1.0 + 1e-3, 2.0], 2, 26, 64).unwrap_err();
        match err {
            CalibrationError::NonIntegralSpectrum { residuals, .. } => {
                assert!(residuals.iter().any(|r| (*r - 1e-3).abs() < 1e-9
                    || (*r - 2e-3).abs() < 1e-9
                    || (*r - 4e-3).abs() < 1e-9));
            }
            other => panic!("wrong error {other:?}"),
        }
    }

    #[test]
    fn irrational_ratio_reports_residual_fractions() {
        let err = calibrate_spectrum(&[1.0, std::f64::consts::SQRT_2], 2, 26, 64).unwrap_err();
        match err {
            CalibrationError::NonIntegralSpectrum { attempted_n_c, residuals } => {
                assert!(attempted_n_c >= 1);
                assert_eq!(residuals.len(), 2);
                assert!(residuals.iter().all(|r| *r <= 0.5 + 1e-12));
            }
            other => panic!("wrong error {other:?}"),
        }
    }

    #[test]
    fn budget_overflow_is_reported() {
        let err = calibrate_spectrum(&[1.0, 1.5, 3.0], 7, 10, 64).unwrap_err();
        assert!(matches!(err, CalibrationError::BudgetExceeded { .. }));
        // A spectrum whose divisors need a wide reciprocal register.
        let err = calibrate_spectrum(&[1.0, 2.0, 4.0], 20, 26, 64).unwrap_err();
        assert!(matches!(err, CalibrationError::BudgetExceeded { .. }));
    }

    #[test]
    fn fallback_params_skip_integrality() {
        let p = generalized_params(&[1.0, std::f64::consts::SQRT_2], 3, 26, Some(6)).unwrap();
        assert_eq!(p.mode, RotationMode::GeneralizedFallback);
        assert_eq!(p.n_c, 6);
        assert_eq!(p.n_a, 1);
        assert!(p.scaled_eigenvalues.is_empty());
        assert!(generalized_params(&[1.0], 22, 26, Some(6)).is_err());
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        assert!(matches!(
            calibrate_spectrum(&[], 2, 26, 64),
            Err(CalibrationError::EmptySpectrum)
        ));
        assert!(matches!(
            calibrate_spectrum(&[-1.0], 2, 26, 64),
            Err(CalibrationError::InvalidSpectrum)
        ));
        assert!(matches!(
            calibrate_spectrum(&[f64::NAN], 2, 26, 64),
            Err(CalibrationError::InvalidSpectrum)
        ));
    }
}
