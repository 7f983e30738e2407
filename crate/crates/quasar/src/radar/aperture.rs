use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use super::RadarError;

/// Which of the `M_all` available pulses were kept.
///
/// Indices are 0-based positions into the full pulse train, strictly
/// increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApertureSelection {
    full_pulses: usize,
    indices: Vec<usize>,
}

impl ApertureSelection {
    /// Validates an explicit index list.
    pub fn from_indices(full_pulses: usize, indices: Vec<usize>) -> Result<Self, RadarError> {
        if indices.is_empty() {
            return Err(RadarError::EmptyAperture);
        }
        for w in indices.windows(2) {
            if w[1] <= w[0] {
                return Err(RadarError::InvalidAperture(format!(
                    "indices not strictly increasing at {} -> {}",
                    w[0], w[1]
                )));
            }
        }
        if *indices.last().unwrap() >= full_pulses {
            return Err(RadarError::InvalidAperture(format!(
                "index {} outside [0, {})",
                indices.last().unwrap(),
                full_pulses
            )));
        }
        Ok(Self { full_pulses, indices })
    }

    /// Keeps every pulse.
    pub fn full(full_pulses: usize) -> Result<Self, RadarError> {
        Self::from_indices(full_pulses, (0..full_pulses).collect())
    }

    /// Keeps every `factor`-th pulse starting from the first.
    pub fn uniform_decimation(full_pulses: usize, factor: usize) -> Result<Self, RadarError> {
        if factor == 0 {
            return Err(RadarError::InvalidAperture("decimation factor must be >= 1".into()));
        }
        Self::from_indices(full_pulses, (0..full_pulses).step_by(factor).collect())
    }

    /// Keeps a seeded random subset of `keep` pulses.
    pub fn random_subset(full_pulses: usize, keep: usize, seed: u64) -> Result<Self, RadarError> {
        if keep == 0 {
            return Err(RadarError::EmptyAperture);
        }
        if keep > full_pulses {
            return Err(RadarError::InvalidAperture(format!(
                "cannot keep {keep} of {full_pulses} pulses"
            )));
        }
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut all: Vec<usize> = (0..full_pulses).collect();
        all.shuffle(&mut rng);
        let mut kept: Vec<usize> = all.into_iter().take(keep).collect();
        kept.sort_unstable();
        Self::from_indices(full_pulses, kept)
    }

    /// Drops a contiguous block `[gap_start, gap_start + gap_len)`.
    pub fn block_missing(
        full_pulses: usize,
        gap_start: usize,
        gap_len: usize,
    ) -> Result<Self, RadarError> {
        let gap = gap_start..gap_start.saturating_add(gap_len);
        Self::from_indices(full_pulses, (0..full_pulses).filter(|m| !gap.contains(m)).collect())
    }

    pub fn full_pulses(&self) -> usize {
        self.full_pulses
    }

    /// Selected pulse positions, strictly increasing.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Number of kept pulses, M_s.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Sampling rate M_s / M_all.
    pub fn rate(&self) -> f64 {
        self.indices.len() as f64 / self.full_pulses as f64
    }
}
