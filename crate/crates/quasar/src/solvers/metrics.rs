use super::SolverError;
use crate::{CMatrix, CVector};

/// Relative root-mean-square error ‖estimate − reference‖₂ / ‖reference‖₂.
pub fn rmse(estimate: &CVector, reference: &CVector) -> Result<f64, SolverError> {
    if estimate.len() != reference.len() {
        return Err(SolverError::DimensionMismatch(format!(
            "estimate of {} entries against reference of {}",
            estimate.len(),
            reference.len()
        )));
    }
    let denom = reference.norm();
    if denom == 0.0 {
        return Err(SolverError::ZeroReference);
    }
    Ok((estimate - reference).norm() / denom)
}

/// Direction agreement |⟨v, w⟩| / (‖v‖‖w‖), invariant to complex scale.
pub fn fidelity(v: &CVector, w: &CVector) -> Result<f64, SolverError> {
    if v.len() != w.len() {
        return Err(SolverError::DimensionMismatch(format!(
            "vectors of {} and {} entries",
            v.len(),
            w.len()
        )));
    }
    let nv = v.norm();
    let nw = w.norm();
    if nv == 0.0 || nw == 0.0 {
        return Err(SolverError::ZeroReference);
    }
    // Clamp: rounding can push the quotient a few ulps past 1.
    Ok((v.dotc(w).norm() / (nv * nw)).min(1.0))
}

/// Maximum count over rows of entries with modulus above 1e−10.
pub fn row_sparsity(m: &CMatrix) -> usize {
    const THRESHOLD: f64 = 1e-10;
    (0..m.nrows())
        .map(|i| (0..m.ncols()).filter(|&j| m[(i, j)].norm() > THRESHOLD).count())
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn v(parts: &[(f64, f64)]) -> CVector {
        CVector::from_iterator(parts.len(), parts.iter().map(|&(re, im)| Complex64::new(re, im)))
    }

    #[test]
    fn rmse_matches_the_three_anchor_cases() {
        let sigma = v(&[(1.0, 0.0), (0.0, -2.0), (0.5, 0.5)]);
        assert_eq!(rmse(&sigma, &sigma).unwrap(), 0.0);
        let zero = CVector::zeros(3);
        assert!((rmse(&zero, &sigma).unwrap() - 1.0).abs() < 1e-15);
        let doubled = sigma.scale(2.0);
        assert!((rmse(&doubled, &sigma).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(rmse(&sigma, &zero), Err(SolverError::ZeroReference)));
    }

    #[test]
    fn rmse_is_scale_consistent() {
        let est = v(&[(0.9, 0.1), (0.2, -1.8), (0.4, 0.6)]);
        let truth = v(&[(1.0, 0.0), (0.0, -2.0), (0.5, 0.5)]);
        let base = rmse(&est, &truth).unwrap();
        for c in [0.5, 3.0, 1e4] {
            let scaled = rmse(&est.scale(c), &truth.scale(c)).unwrap();
            assert!((scaled - base).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_ignores_complex_scale() {
        let a = v(&[(1.0, 2.0), (-0.5, 0.25), (0.0, 1.0)]);
        assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        let rotated = a.scale(3.0) * Complex64::cis(1.234);
        assert!((fidelity(&a, &rotated).unwrap() - 1.0).abs() < 1e-12);
        let b = v(&[(0.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
        let c = v(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        assert_eq!(fidelity(&b, &c).unwrap(), 0.0);
        assert!(fidelity(&a, &CVector::zeros(3)).is_err());
    }

    #[test]
    fn row_sparsity_counts_the_densest_row() {
        let two_i = CMatrix::identity(4, 4).scale(2.0);
        assert_eq!(row_sparsity(&two_i), 1);
        let dense = CMatrix::from_element(8, 8, Complex64::new(0.3, -0.1));
        assert_eq!(row_sparsity(&dense), 8);
        let tri = CMatrix::from_fn(5, 5, |i, j| {
            if i == j {
                Complex64::new(2.0, 0.0)
            } else if i.abs_diff(j) == 1 {
                Complex64::new(0.0, 1.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        assert_eq!(row_sparsity(&tri), 3);
    }
}
