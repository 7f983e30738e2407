use num_complex::Complex64;

use super::RadarError;
use crate::CVector;

/// Range of one scatterer as a function of slow time, in meters.
///
/// A constant plus linear law covers turntable-style geometry where each
/// grid cell maps to a fixed radial offset and rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeHistory {
    pub base_range_m: f64,
    pub radial_velocity_mps: f64,
}

impl RangeHistory {
    pub const fn stationary(base_range_m: f64) -> Self {
        Self { base_range_m, radial_velocity_mps: 0.0 }
    }

    pub fn range_at(&self, tau: f64) -> f64 {
        self.base_range_m + self.radial_velocity_mps * tau
    }
}

/// One scattering point: a grid cell, its complex coefficient, and its
/// range history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterPoint {
    pub cell: usize,
    pub coefficient: Complex64,
    pub range: RangeHistory,
}

/// A sparse scene on a cross-range grid of `P` cells.
///
/// Sparsity is derived from the points: it counts the cells holding a
/// nonzero coefficient.
#[derive(Debug, Clone)]
pub struct SceneModel {
    grid_size: usize,
    points: Vec<ScatterPoint>,
    sparsity: usize,
}

impl SceneModel {
    pub fn new(grid_size: usize, points: Vec<ScatterPoint>) -> Result<Self, RadarError> {
        if grid_size == 0 {
            return Err(RadarError::InvalidScene("grid size must be >= 1".into()));
        }
        let mut seen = vec![false; grid_size];
        for p in &points {
            if p.cell >= grid_size {
                return Err(RadarError::InvalidScene(format!(
                    "point cell {} outside grid of {} cells",
                    p.cell, grid_size
                )));
            }
            if seen[p.cell] {
                return Err(RadarError::InvalidScene(format!("duplicate point at cell {}", p.cell)));
            }
            seen[p.cell] = true;
            if !p.coefficient.re.is_finite() || !p.coefficient.im.is_finite() {
                return Err(RadarError::InvalidScene("non-finite coefficient".into()));
            }
        }
        let sparsity = points.iter().filter(|p| p.coefficient.norm() > 0.0).count();
        if sparsity == 0 {
            return Err(RadarError::InvalidScene("scene must contain a nonzero point".into()));
        }
        Ok(Self { grid_size, points, sparsity })
    }

    /// Scene whose point ranges are taken from a shared per-cell grid.
    pub fn on_grid(
        grid: &[RangeHistory],
        entries: &[(usize, Complex64)],
    ) -> Result<Self, RadarError> {
        let points = entries
            .iter()
            .map(|&(cell, coefficient)| {
                let range = *grid.get(cell).ok_or_else(|| {
                    RadarError::InvalidScene(format!("cell {cell} outside grid"))
                })?;
                Ok(ScatterPoint { cell, coefficient, range })
            })
            .collect::<Result<Vec<_>, RadarError>>()?;
        Self::new(grid.len(), points)
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn points(&self) -> &[ScatterPoint] {
        &self.points
    }

    /// Number of nonzero coefficients, K.
    pub fn sparsity(&self) -> usize {
        self.sparsity
    }

    /// Dense σ over the grid (zeros off the support).
    pub fn coefficient_vector(&self) -> CVector {
        let mut v = CVector::zeros(self.grid_size);
        for p in &self.points {
            v[p.cell] = p.coefficient;
        }
        v
    }
}
