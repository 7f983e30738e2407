//! Seeded random test systems: Haar-distributed unitaries, systems with a
//! prescribed spectrum, and complex Gaussian data vectors.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::solvers::{RegularizedSystem, SolverError};
use crate::{CMatrix, CVector};

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha12Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    })
}

/// Standard complex Gaussian vector (independent unit-variance parts).
pub fn random_complex_vector(n: usize, seed: u64) -> CVector {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    CVector::from_fn(n, |_, _| {
        Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
    })
}

/// Haar-distributed n×n unitary.
///
/// QR of a complex Gaussian matrix with the R diagonal's phases folded
/// into Q, which removes the decomposition's phase ambiguity.
pub fn random_unitary(n: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let qr = gaussian_matrix(n, n, &mut rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// A system with exactly the given Ξ spectrum, Haar-random eigenvectors,
/// and a complex Gaussian right-hand side (so every eigenbranch carries
/// weight almost surely).
pub fn system_from_spectrum(
    eigenvalues: &[f64],
    seed: u64,
    eta: f64,
    lambda0: f64,
) -> Result<RegularizedSystem, SolverError> {
    let p = eigenvalues.len();
    let v = random_unitary(p, seed);
    let gamma = random_complex_vector(p, seed.wrapping_add(0x9e37_79b9));
    RegularizedSystem::from_eigensystem(eigenvalues, &v, gamma, eta, lambda0)
}
