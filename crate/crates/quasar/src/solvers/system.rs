use std::sync::Arc;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use super::{metrics::row_sparsity, SolverError};
use crate::{CMatrix, CVector};

/// The expensive, right-hand-side independent part of a system: matrix,
/// spectrum, and scaling constants. Shared across right-hand sides.
#[derive(Debug)]
struct SystemCore {
    xi: CMatrix,
    eta: f64,
    lambda0: f64,
    /// Ascending real eigenvalues of Ξ.
    eigenvalues: Vec<f64>,
    /// Unitary columns matching `eigenvalues`.
    eigenvectors: CMatrix,
    condition_number: f64,
    row_sparsity: usize,
}

/// Hermitian positive-definite system Ξσ = γ with Ξ = ηΦᴴΦ + λ₀I.
///
/// The eigendecomposition is computed once at build time; cloning or
/// [`RegularizedSystem::with_rhs`] reuses it, so solving many right-hand
/// sides against one matrix costs one decomposition.
#[derive(Debug, Clone)]
pub struct RegularizedSystem {
    core: Arc<SystemCore>,
    gamma: CVector,
}

fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Eigendecomposition sorted ascending by eigenvalue.
fn sorted_eigen(xi: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(xi.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&j| eig.eigenvalues[j]).collect();
    let vectors = CMatrix::from_fn(xi.nrows(), xi.ncols(), |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

impl RegularizedSystem {
    fn from_parts(
        xi: CMatrix,
        gamma: CVector,
        eta: f64,
        lambda0: f64,
        eigenvalues: Vec<f64>,
        eigenvectors: CMatrix,
    ) -> Self {
        let condition_number = eigenvalues[eigenvalues.len() - 1] / eigenvalues[0];
        let row_sparsity = row_sparsity(&xi);
        RegularizedSystem {
            core: Arc::new(SystemCore {
                xi,
                eta,
                lambda0,
                eigenvalues,
                eigenvectors,
                condition_number,
                row_sparsity,
            }),
            gamma,
        }
    }

    /// Builds a system directly from a known eigensystem of Ξ.
    ///
    /// `eigenvalues` are the eigenvalues of Ξ itself (ridge included) and
    /// `eigenvectors` must be unitary; Ξ is reassembled as V diag(λ) Vᴴ.
    /// η and λ₀ are recorded as the formal operating point.
    pub fn from_eigensystem(
        eigenvalues: &[f64],
        eigenvectors: &CMatrix,
        gamma: CVector,
        eta: f64,
        lambda0: f64,
    ) -> Result<Self, SolverError> {
        let p = eigenvalues.len();
        if p == 0 {
            return Err(SolverError::InvalidInput("empty spectrum".into()));
        }
        if eigenvectors.nrows() != p || eigenvectors.ncols() != p || gamma.len() != p {
            return Err(SolverError::DimensionMismatch(format!(
                "spectrum of {} values, eigenvector block {}x{}, rhs of {}",
                p,
                eigenvectors.nrows(),
                eigenvectors.ncols(),
                gamma.len()
            )));
        }
        if eigenvalues.iter().any(|l| !l.is_finite() || *l <= 0.0) {
            return Err(SolverError::InvalidInput(
                "eigenvalues must be finite and positive".into(),
            ));
        }
        if !(eta > 0.0 && lambda0 > 0.0 && eta.is_finite() && lambda0.is_finite()) {
            return Err(SolverError::InvalidInput("eta and lambda0 must be positive".into()));
        }
        let ortho = (eigenvectors.adjoint() * eigenvectors - CMatrix::identity(p, p)).norm();
        if ortho > 1e-9 {
            return Err(SolverError::InvalidInput(format!(
                "eigenvector block is not unitary (deviation {ortho:.3e})"
            )));
        }
        let mut sorted: Vec<(f64, usize)> =
            eigenvalues.iter().copied().zip(0..p).collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let values: Vec<f64> = sorted.iter().map(|(l, _)| *l).collect();
        let vectors = CMatrix::from_fn(p, p, |i, j| eigenvectors[(i, sorted[j].1)]);
        let scaled = {
            let mut m = vectors.clone();
            for (j, l) in values.iter().enumerate() {
                m.column_mut(j).scale_mut(*l);
            }
            m
        };
        let xi = &scaled * vectors.adjoint();
        Ok(Self::from_parts(xi, gamma, eta, lambda0, values, vectors))
    }

    /// Same matrix and spectrum, new right-hand side.
    pub fn with_rhs(&self, gamma: CVector) -> Result<Self, SolverError> {
        if gamma.len() != self.dimension() {
            return Err(SolverError::DimensionMismatch(format!(
                "rhs of {} entries for a {}-dimensional system",
                gamma.len(),
                self.dimension()
            )));
        }
        if gamma.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SolverError::NonFinite);
        }
        Ok(RegularizedSystem { core: Arc::clone(&self.core), gamma })
    }

    pub fn dimension(&self) -> usize {
        self.core.xi.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.core.xi
    }

    pub fn rhs(&self) -> &CVector {
        &self.gamma
    }

    pub fn eta(&self) -> f64 {
        self.core.eta
    }

    pub fn lambda0(&self) -> f64 {
        self.core.lambda0
    }

    /// Ascending eigenvalues of Ξ.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.core.eigenvalues
    }

    /// Unitary eigenvector columns, ordered like [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.core.eigenvectors
    }

    /// κ = λ_max / λ_min.
    pub fn condition_number(&self) -> f64 {
        self.core.condition_number
    }

    /// Maximum count of non-negligible entries over the rows of Ξ.
    pub fn row_sparsity(&self) -> usize {
        self.core.row_sparsity
    }

    /// Coordinates of the right-hand side in the eigenbasis: β = Vᴴγ.
    pub fn rhs_eigen_coords(&self) -> CVector {
        self.core.eigenvectors.adjoint() * &self.gamma
    }
}

/// Forms Ξ = ηΦᴴΦ + λ₀I and γ = ΦᴴY and eigendecomposes Ξ.
///
/// The ridge keeps every eigenvalue at or above λ₀ for any Φ, so the
/// system is always Hermitian positive-definite.
pub fn build_regularized_system(
    phi: &CMatrix,
    y: &CVector,
    eta: f64,
    lambda0: f64,
) -> Result<RegularizedSystem, SolverError> {
    if !(eta > 0.0 && lambda0 > 0.0 && eta.is_finite() && lambda0.is_finite()) {
        return Err(SolverError::InvalidInput("eta and lambda0 must be positive".into()));
    }
    if !is_finite(phi) || y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(SolverError::NonFinite);
    }
    if phi.nrows() != y.len() {
        return Err(SolverError::DimensionMismatch(format!(
            "{} measurement rows but {} data entries",
            phi.nrows(),
            y.len()
        )));
    }
    let p = phi.ncols();
    let mut xi = phi.adjoint() * phi;
    xi.scale_mut(eta);
    for i in 0..p {
        xi[(i, i)] += Complex64::new(lambda0, 0.0);
        // Hermitize exactly: the diagonal of ΦᴴΦ has tiny imaginary dust.
        xi[(i, i)] = Complex64::new(xi[(i, i)].re, 0.0);
    }
    let gamma = phi.adjoint() * y;
    let (eigenvalues, eigenvectors) = sorted_eigen(&xi);
    Ok(RegularizedSystem::from_parts(xi, gamma, eta, lambda0, eigenvalues, eigenvectors))
}

/// Solves Ξσ = γ through the eigenbasis and verifies the residual.
///
/// The relative residual ‖Ξσ − γ‖/‖γ‖ must not exceed 1e−10; a larger
/// residual reports an ill-conditioning error instead of a silent answer.
pub fn direct_solve(sys: &RegularizedSystem) -> Result<CVector, SolverError> {
    const RESIDUAL_THRESHOLD: f64 = 1e-10;
    let mut coords = sys.rhs_eigen_coords();
    for (j, l) in sys.eigenvalues().iter().enumerate() {
        coords[j] /= l;
    }
    let sigma = sys.eigenvectors() * coords;
    let gamma_norm = sys.rhs().norm();
    if gamma_norm > 0.0 {
        let residual = (sys.matrix() * &sigma - sys.rhs()).norm() / gamma_norm;
        if residual > RESIDUAL_THRESHOLD {
            return Err(SolverError::IllConditioned { residual, threshold: RESIDUAL_THRESHOLD });
        }
    }
    Ok(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1(n: usize) -> CVector {
        let mut v = CVector::zeros(n);
        v[0] = Complex64::new(1.0, 0.0);
        v
    }

    #[test]
    fn identity_forward_model_doubles_the_diagonal() {
        let phi = CMatrix::identity(2, 2);
        let sys = build_regularized_system(&phi, &e1(2), 1.0, 1.0).unwrap();
        assert!((sys.matrix() - CMatrix::identity(2, 2).scale(2.0)).norm() < 1e-14);
        assert!((sys.rhs() - e1(2)).norm() < 1e-14);
        assert!((sys.condition_number() - 1.0).abs() < 1e-12);
        let sigma = direct_solve(&sys).unwrap();
        assert!((sigma[0] - Complex64::new(0.5, 0.0)).norm() < 1e-12);
        assert!(sigma[1].norm() < 1e-12);
    }

    #[test]
    fn operating_point_scalings_are_accepted() {
        let phi = CMatrix::identity(3, 3);
        for eta in [23.0, 33.0] {
            let sys = build_regularized_system(&phi, &e1(3), eta, 1.0).unwrap();
            assert_eq!(sys.eta(), eta);
            assert_eq!(sys.lambda0(), 1.0);
            for l in sys.eigenvalues() {
                assert!((l - (eta + 1.0)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn diagonal_system_inverts_elementwise() {
        let v = CMatrix::identity(3, 3);
        let gamma = CVector::from_element(3, Complex64::new(1.0, 0.0));
        let sys =
            RegularizedSystem::from_eigensystem(&[1.0, 2.0, 4.0], &v, gamma, 1.0, 1.0).unwrap();
        let sigma = direct_solve(&sys).unwrap();
        for (got, want) in sigma.iter().zip([1.0, 0.5, 0.25]) {
            assert!((got - Complex64::new(want, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn random_systems_solve_and_stay_hermitian_pd() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        for _ in 0..20 {
            let rows = rng.gen_range(4..12);
            let cols = rng.gen_range(2..8);
            let phi = CMatrix::from_fn(rows, cols, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let y = CVector::from_fn(rows, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let sys = build_regularized_system(&phi, &y, 2.5, 0.75).unwrap();
            let herm = (sys.matrix() - sys.matrix().adjoint()).norm();
            assert!(herm < 1e-12, "Hermiticity deviation {herm}");
            for l in sys.eigenvalues() {
                assert!(*l >= 0.75 - 1e-9, "ridge floor violated by {l}");
            }
            let sigma = direct_solve(&sys).unwrap();
            let rel = (sys.matrix() * &sigma - sys.rhs()).norm() / sys.rhs().norm();
            assert!(rel <= 1e-10, "residual {rel}");
        }
    }

    #[test]
    fn with_rhs_shares_the_decomposition() {
        let phi = CMatrix::identity(4, 4);
        let sys = build_regularized_system(&phi, &e1(4), 3.0, 1.0).unwrap();
        let other = sys.with_rhs(CVector::from_element(4, Complex64::new(0.0, 2.0))).unwrap();
        assert!(Arc::ptr_eq(&sys.core, &other.core));
        let sigma = direct_solve(&other).unwrap();
        for z in sigma.iter() {
            assert!((z - Complex64::new(0.0, 0.5)).norm() < 1e-12);
        }
        assert!(sys.with_rhs(CVector::zeros(3)).is_err());
    }

    #[test]
    fn eigenbasis_coordinates_match_projection() {
        let phi = CMatrix::from_fn(5, 3, |i, j| {
            Complex64::cis(0.7 * (i * j) as f64) * Complex64::new(0.5 + j as f64, 0.0)
        });
        let y = CVector::from_fn(5, |i, _| Complex64::new(i as f64, -1.0));
        let sys = build_regularized_system(&phi, &y, 1.0, 1.0).unwrap();
        let beta = sys.rhs_eigen_coords();
        let rebuilt = sys.eigenvectors() * &beta;
        assert!((rebuilt - sys.rhs()).norm() < 1e-10);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let phi = CMatrix::identity(2, 2);
        assert!(build_regularized_system(&phi, &e1(2), 0.0, 1.0).is_err());
        assert!(build_regularized_system(&phi, &e1(2), 1.0, -1.0).is_err());
        assert!(build_regularized_system(&phi, &e1(3), 1.0, 1.0).is_err());
        let mut bad = e1(2);
        bad[1] = Complex64::new(f64::NAN, 0.0);
        assert!(build_regularized_system(&phi, &bad, 1.0, 1.0).is_err());
        let skew = CMatrix::from_fn(2, 2, |i, j| {
            if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 1.0) }
        });
        assert!(RegularizedSystem::from_eigensystem(&[1.0, 2.0], &skew, e1(2), 1.0, 1.0).is_err());
    }
}
