use nalgebra::Cholesky;

use super::SolverError;
use crate::{CMatrix, CVector};

/// Which reconstruction path produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodTag {
    /// Greedy orthogonal matching pursuit.
    Omp,
    /// Modulus-ranked truncation of a dense estimate.
    TopK,
    /// Classical eigenbasis solve of the regularized system.
    Oracle,
    /// Quantum eigenvalue-inversion reconstruction.
    Qra,
}

impl std::fmt::Display for MethodTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MethodTag::Omp => "omp",
            MethodTag::TopK => "top_k",
            MethodTag::Oracle => "oracle",
            MethodTag::Qra => "qra",
        })
    }
}

/// A sparse reconstruction together with its dense precursor and
/// diagnostics.
#[derive(Debug, Clone)]
pub struct RecoveryResult {
    /// Final sparse estimate; zero outside `support`.
    pub sparse: CVector,
    /// Dense estimate before sparsification. For greedy methods, equal to
    /// `sparse` (selection happens during the iteration).
    pub dense: CVector,
    /// Selected indices, sorted ascending.
    pub support: Vec<usize>,
    /// ‖Y − Φσ̄‖₂ for data-fitting methods; discarded mass for truncation.
    pub residual_norm: f64,
    pub iterations: usize,
    /// Complex multiply-accumulate count (classical work proxy).
    pub flops: u64,
    /// True when a rank-deficient least-squares step needed a ridge.
    pub used_ridge_fallback: bool,
    pub method: MethodTag,
}

/// Least squares on the selected columns via normal equations.
///
/// Returns the coefficient vector and whether a ridge fallback was needed
/// because the Gram block was numerically rank-deficient.
pub fn restricted_least_squares(
    phi: &CMatrix,
    y: &CVector,
    support: &[usize],
) -> (CVector, bool) {
    let sub = phi.select_columns(support.iter());
    let gram = sub.adjoint() * &sub;
    let rhs = sub.adjoint() * y;
    if let Some(chol) = Cholesky::new(gram.clone()) {
        // Factorization can succeed on a numerically singular block when
        // rounding leaves a tiny positive pivot; gate on the squared pivot
        // spread, which lives on the Gram matrix's own scale.
        let pivots: Vec<f64> =
            (0..support.len()).map(|i| chol.l_dirty()[(i, i)].re.powi(2)).collect();
        let largest = pivots.iter().fold(0.0f64, |a, &b| a.max(b));
        let smallest = pivots.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        if smallest > 1e-12 * largest {
            return (chol.solve(&rhs), false);
        }
    }
    // Tiny ridge scaled to the Gram magnitude restores definiteness.
    let scale = gram.diagonal().iter().map(|z| z.re).fold(0.0f64, f64::max).max(1.0);
    let ridged = gram + CMatrix::identity(support.len(), support.len()).scale(1e-10 * scale);
    let chol = Cholesky::new(ridged).expect("ridged Gram block is positive-definite");
    (chol.solve(&rhs), true)
}

/// Orthogonal matching pursuit: K rounds of correlate, select, refit,
/// subtract.
///
/// Selection maximizes |Φᴴr| over unselected columns, ties broken by
/// lowest index, so zero data still yields a deterministic support of the
/// first K indices. Iteration stops early only when the residual falls
/// strictly below 1e−9·‖Y‖₂.
pub fn omp(phi: &CMatrix, y: &CVector, k: usize) -> Result<RecoveryResult, SolverError> {
    if phi.nrows() != y.len() {
        return Err(SolverError::DimensionMismatch(format!(
            "{} measurement rows but {} data entries",
            phi.nrows(),
            y.len()
        )));
    }
    if k > phi.nrows().min(phi.ncols()) {
        return Err(SolverError::InvalidInput(format!(
            "sparsity {} exceeds min dimension {} of the {}x{} operator",
            k,
            phi.nrows().min(phi.ncols()),
            phi.nrows(),
            phi.ncols()
        )));
    }
    if phi.iter().chain(y.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(SolverError::NonFinite);
    }

    let stop = 1e-9 * y.norm();
    let mut residual = y.clone();
    let mut support: Vec<usize> = Vec::with_capacity(k);
    let mut coeffs = CVector::zeros(0);
    let mut flops: u64 = 0;
    let mut used_ridge_fallback = false;
    let mut iterations = 0;

    for _ in 0..k {
        if residual.norm() < stop {
            break;
        }
        let correlations = phi.adjoint() * &residual;
        flops += (phi.nrows() * phi.ncols()) as u64;
        let pick = (0..phi.ncols())
            .filter(|p| !support.contains(p))
            .max_by(|&a, &b| {
                correlations[a]
                    .norm_sqr()
                    .total_cmp(&correlations[b].norm_sqr())
                    .then(b.cmp(&a)) // ties keep the lowest index
            })
            .expect("k <= ncols leaves an unselected column");
        support.push(pick);

        let (x, ridge) = restricted_least_squares(phi, y, &support);
        used_ridge_fallback |= ridge;
        let s = support.len();
        flops += (s * s * phi.nrows() + s * s * s / 3 + s * phi.nrows()) as u64;

        residual = y - phi.select_columns(support.iter()) * &x;
        coeffs = x;
        iterations += 1;
    }

    let mut sparse = CVector::zeros(phi.ncols());
    for (slot, &p) in support.iter().enumerate() {
        sparse[p] = coeffs[slot];
    }
    let residual_norm = residual.norm();
    support.sort_unstable();
    Ok(RecoveryResult {
        dense: sparse.clone(),
        sparse,
        support,
        residual_norm,
        iterations,
        flops,
        used_ridge_fallback,
        method: MethodTag::Omp,
    })
}

/// Keeps the K entries of largest modulus and zeroes the rest.
///
/// Ties are broken toward the lowest index. The discarded mass is reported
/// as the residual norm.
pub fn top_k(dense: &CVector, k: usize) -> Result<RecoveryResult, SolverError> {
    if k > dense.len() {
        return Err(SolverError::InvalidInput(format!(
            "sparsity {} exceeds vector length {}",
            k,
            dense.len()
        )));
    }
    let mut order: Vec<usize> = (0..dense.len()).collect();
    order.sort_by(|&a, &b| {
        dense[b].norm_sqr().total_cmp(&dense[a].norm_sqr()).then(a.cmp(&b))
    });
    let mut support: Vec<usize> = order[..k].to_vec();
    support.sort_unstable();
    let mut sparse = CVector::zeros(dense.len());
    for &p in &support {
        sparse[p] = dense[p];
    }
    let residual_norm = (dense - &sparse).norm();
    Ok(RecoveryResult {
        sparse,
        dense: dense.clone(),
        support,
        residual_norm,
        iterations: 0,
        flops: 0,
        used_ridge_fallback: false,
        method: MethodTag::TopK,
    })
}
