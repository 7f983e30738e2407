use num_complex::Complex64;

use super::{ApertureSelection, RadarError, RadarParams, RangeHistory, SPEED_OF_LIGHT};
use crate::CMatrix;

/// How a measurement matrix was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    /// Physical chirp phases over a range-cell grid.
    PhysicalChirp,
    /// Rows of a unitary inverse DFT selected by the kept pulses.
    PartialFourier,
}

/// A measurement operator Φ together with its provenance.
///
/// Rows are vectorized samples (fast-time major over the kept pulses),
/// columns are scene cells.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix {
    pub matrix: CMatrix,
    pub kind: MatrixKind,
}

impl MeasurementMatrix {
    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    /// Gram matrix ΦᴴΦ.
    pub fn gram(&self) -> CMatrix {
        self.matrix.adjoint() * &self.matrix
    }

    /// Scales each measurement row by a real gain, one per kept pulse.
    ///
    /// Models per-pulse transmit or receive gain differences; for a
    /// partial-Fourier matrix the Gram spectrum becomes the multiset of
    /// squared gains (plus zeros), which is how an operating point with
    /// small-integer scaled eigenvalues is arranged.
    pub fn scale_rows(&mut self, gains: &[f64]) -> Result<(), RadarError> {
        if gains.len() != self.matrix.nrows() {
            return Err(RadarError::DimensionMismatch(format!(
                "{} gains for {} measurement rows",
                gains.len(),
                self.matrix.nrows()
            )));
        }
        if gains.iter().any(|g| !g.is_finite() || *g <= 0.0) {
            return Err(RadarError::InvalidParams("row gains must be positive".into()));
        }
        for (i, g) in gains.iter().enumerate() {
            self.matrix.row_mut(i).apply(|z| *z *= Complex64::new(*g, 0.0));
        }
        Ok(())
    }
}

/// Builds the physical measurement matrix for a grid of candidate range
/// histories.
///
/// Entry (n, p) is the unit-modulus chirp term a unit scatterer in cell p
/// contributes to vectorized sample n. Fast and slow time are recovered
/// from n by the same index maps as the echo vectorization, so a noiseless
/// on-grid scene satisfies Y = Φσ exactly.
pub fn build_measurement_matrix(
    params: &RadarParams,
    grid: &[RangeHistory],
    aperture: &ApertureSelection,
) -> Result<MeasurementMatrix, RadarError> {
    params.validate()?;
    if grid.is_empty() {
        return Err(RadarError::InvalidScene("empty range-cell grid".into()));
    }
    if aperture.is_empty() {
        return Err(RadarError::EmptyAperture);
    }
    if aperture.full_pulses() != params.full_pulses {
        return Err(RadarError::DimensionMismatch(format!(
            "aperture spans {} pulses, params declare {}",
            aperture.full_pulses(),
            params.full_pulses
        )));
    }

    let fast = params.fast_time_axis();
    let m_s = aperture.len();
    let rows = params.fast_time_samples * m_s;
    let matrix = CMatrix::from_fn(rows, grid.len(), |n, p| {
        let t = fast[n / m_s];
        let tau = params.slow_time(aperture.indices()[n % m_s]);
        let delay = 2.0 * grid[p].range_at(tau) / SPEED_OF_LIGHT;
        let u = t - delay;
        Complex64::cis(
            2.0 * std::f64::consts::PI * params.carrier_frequency_hz * u
                + std::f64::consts::PI * params.chirp_rate_hz_per_s * u * u,
        )
    });
    Ok(MeasurementMatrix { matrix, kind: MatrixKind::PhysicalChirp })
}

/// Builds a partial inverse-DFT dictionary: rows of the unitary size-M
/// inverse DFT matrix indexed by the kept pulses.
///
/// Entry (m, k) = exp(+i 2π m k / M) / √M with m the kept pulse index.
/// With the full aperture the result is unitary.
pub fn build_partial_fourier_dictionary(
    full_size: usize,
    aperture: &ApertureSelection,
) -> Result<MeasurementMatrix, RadarError> {
    if full_size == 0 {
        return Err(RadarError::InvalidParams("dictionary size must be positive".into()));
    }
    if aperture.is_empty() {
        return Err(RadarError::EmptyAperture);
    }
    if aperture.full_pulses() != full_size {
        return Err(RadarError::DimensionMismatch(format!(
            "aperture spans {} pulses, dictionary has {} columns",
            aperture.full_pulses(),
            full_size
        )));
    }
    let scale = 1.0 / (full_size as f64).sqrt();
    let matrix = CMatrix::from_fn(aperture.len(), full_size, |row, k| {
        let m = aperture.indices()[row];
        let angle = 2.0 * std::f64::consts::PI * (m * k % full_size) as f64 / full_size as f64;
        Complex64::from_polar(scale, angle)
    });
    Ok(MeasurementMatrix { matrix, kind: MatrixKind::PartialFourier })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radar::{synth_echo, vectorize_echo, SceneModel};

    #[test]
    fn entries_have_unit_modulus() {
        let params = RadarParams {
            carrier_frequency_hz: 9.6e9,
            chirp_rate_hz_per_s: 5.0e12,
            pulse_duration_s: 2.0e-5,
            fast_time_samples: 3,
            full_pulses: 8,
            bandwidth_hz: 1.0e8,
            prf_hz: 500.0,
        };
        let grid: Vec<RangeHistory> = (0..5)
            .map(|p| RangeHistory { base_range_m: 100.0 + p as f64, radial_velocity_mps: 1.0 })
            .collect();
        let aperture = ApertureSelection::uniform_decimation(8, 2).unwrap();
        let phi = build_measurement_matrix(&params, &grid, &aperture).unwrap();
        assert_eq!(phi.nrows(), 3 * 4);
        assert_eq!(phi.ncols(), 5);
        for z in phi.matrix.iter() {
            assert!((z.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn row_gains_set_the_gram_spectrum_to_the_squared_gains() {
        // Kept rows of a unitary inverse DFT are orthonormal, so the Gram
        // eigenvalues are exactly the squared gains plus zeros.
        let aperture = ApertureSelection::uniform_decimation(8, 2).unwrap();
        let mut phi = build_partial_fourier_dictionary(8, &aperture).unwrap();
        let g = 0.5;
        phi.scale_rows(&[g, 2.0 * g, g, 2.0 * g]).unwrap();
        let mut eigs: Vec<f64> =
            nalgebra::SymmetricEigen::new(phi.gram()).eigenvalues.iter().copied().collect();
        eigs.sort_by(f64::total_cmp);
        let expected = [0.0, 0.0, 0.0, 0.0, 0.25, 0.25, 1.0, 1.0];
        for (e, want) in eigs.iter().zip(expected.iter()) {
            assert!((e - want).abs() < 1e-12, "eigenvalue {e} vs {want}");
        }
    }

    #[test]
    fn row_gains_are_validated() {
        let aperture = ApertureSelection::full(4).unwrap();
        let mut phi = build_partial_fourier_dictionary(4, &aperture).unwrap();
        assert!(phi.scale_rows(&[1.0; 3]).is_err());
        assert!(phi.scale_rows(&[1.0, -1.0, 1.0, 1.0]).is_err());
        assert!(phi.scale_rows(&[1.0; 4]).is_ok());
    }

    #[test]
    fn full_fourier_dictionary_row_zero_is_flat() {
        let aperture = ApertureSelection::full(4).unwrap();
        let phi = build_partial_fourier_dictionary(4, &aperture).unwrap();
        for k in 0..4 {
            assert!((phi.matrix[(0, k)] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        }
        assert_eq!(phi.kind, MatrixKind::PartialFourier);
    }

    #[test]
    fn full_fourier_dictionary_is_unitary() {
        let aperture = ApertureSelection::full(8).unwrap();
        let phi = build_partial_fourier_dictionary(8, &aperture).unwrap();
        let gram = phi.gram();
        for i in 0..8 {
            for j in 0..8 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((gram[(i, j)] - Complex64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn partial_fourier_gram_diagonal_is_keep_rate() {
        let aperture = ApertureSelection::uniform_decimation(16, 4).unwrap();
        let phi = build_partial_fourier_dictionary(16, &aperture).unwrap();
        let gram = phi.gram();
        for k in 0..16 {
            assert!((gram[(k, k)].re - 4.0 / 16.0).abs() < 1e-12);
            assert!(gram[(k, k)].im.abs() < 1e-15);
        }
    }

    #[test]
    fn physical_matrix_reproduces_the_echo_synthesis() {
        let params = RadarParams {
            carrier_frequency_hz: 9.6e9,
            chirp_rate_hz_per_s: 2.0e12,
            pulse_duration_s: 4.0e-5,
            fast_time_samples: 5,
            full_pulses: 12,
            bandwidth_hz: 8.0e7,
            prf_hz: 800.0,
        };
        let grid: Vec<RangeHistory> = (0..6)
            .map(|p| RangeHistory { base_range_m: 1000.0 + 0.7 * p as f64, radial_velocity_mps: 3.0 })
            .collect();
        let scene = SceneModel::on_grid(
            &grid,
            &[(1, Complex64::new(2.0, -1.0)), (4, Complex64::new(0.3, 0.9))],
        )
        .unwrap();
        let aperture = ApertureSelection::block_missing(12, 3, 4).unwrap();
        let echo = synth_echo(&params, &scene, &aperture, None).unwrap();
        let phi = build_measurement_matrix(&params, &grid, &aperture).unwrap();
        let predicted = &phi.matrix * scene.coefficient_vector();
        let y = vectorize_echo(&echo.samples);
        let rel = (&y - &predicted).norm() / y.norm();
        assert!(rel < 1e-10, "relative mismatch {rel}");
    }

    #[test]
    fn dimension_checks_fire() {
        let aperture = ApertureSelection::full(4).unwrap();
        assert!(build_partial_fourier_dictionary(0, &aperture).is_err());
        assert!(build_partial_fourier_dictionary(8, &aperture).is_err());
    }
}
