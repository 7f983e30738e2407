//! Knobs for the quantum reconstruction pipeline.

use crate::qsim::MAX_QUBITS;

/// How the spectrum scaling η is chosen when building Ξ = ηΦᴴΦ + λ₀I.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaStrategy {
    /// Use exactly this η.
    Fixed(f64),
    /// Search integer η over `min..=max` (ascending) for the smallest
    /// value whose scaled spectrum calibrates to exact integers.
    Auto { min: u32, max: u32 },
}

impl Default for EtaStrategy {
    fn default() -> Self {
        EtaStrategy::Auto { min: 1, max: 64 }
    }
}

/// What to do when no scaling makes the spectrum integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationStrategy {
    /// Refuse to run; the error carries a remediation hint.
    ExactOnly,
    /// Switch to the clock-keyed arcsin rotation, which tolerates
    /// non-integral spectra at reduced accuracy. `clock_qubits` pins the
    /// clock width; `None` picks a default within the budget.
    AllowFallback { clock_qubits: Option<usize> },
}

impl Default for RotationStrategy {
    fn default() -> Self {
        RotationStrategy::ExactOnly
    }
}

/// Amplitude correction applied to the selected entries after support
/// recovery.
///
/// The regularized solve shrinks coefficients by λ/(ηλ + λ₀) per
/// eigenbranch, so the raw estimate is biased toward zero. `None` keeps
/// the raw values (the solve of Ξσ̃ = γ as-is), `Diagonal` rescales each
/// entry by its own column's shrinkage factor, and `LeastSquares` refits
/// the selected columns against the data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Debias {
    #[default]
    None,
    Diagonal,
    LeastSquares,
}

/// Full pipeline configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct QraConfig {
    pub eta: EtaStrategy,
    /// Ridge λ₀ added to the scaled Gram matrix.
    pub lambda0: f64,
    /// Hard cap on total circuit width.
    pub qubit_budget: usize,
    /// Rotation divisor multiplier: N_sa = multiplier · max divisor.
    /// `None` uses the solver default (64). Larger values shrink the
    /// sine-linearization error quadratically.
    pub n_sa_multiplier: Option<u64>,
    pub rotation: RotationStrategy,
    pub debias: Debias,
}

impl Default for QraConfig {
    fn default() -> Self {
        QraConfig {
            eta: EtaStrategy::default(),
            lambda0: 1.0,
            qubit_budget: MAX_QUBITS,
            n_sa_multiplier: None,
            rotation: RotationStrategy::default(),
            debias: Debias::default(),
        }
    }
}

impl QraConfig {
    /// Convenience constructor for a fixed operating point.
    pub fn fixed(eta: f64, lambda0: f64) -> Self {
        QraConfig { eta: EtaStrategy::Fixed(eta), lambda0, ..Self::default() }
    }
}
