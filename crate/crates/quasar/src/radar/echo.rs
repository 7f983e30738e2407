use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

use super::{ApertureSelection, RadarError, RadarParams, SceneModel, SPEED_OF_LIGHT};
use crate::{CMatrix, CVector};

/// Circular complex white noise request, calibrated to an SNR in dB
/// against the mean echo power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub snr_db: f64,
    pub seed: u64,
}

/// Echo samples `S` (fast time × selected slow time) and their
/// vectorization `Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoData {
    /// L × M_s complex samples; row = fast-time index, column = kept pulse.
    pub samples: CMatrix,
    /// (L·M_s) × 1 vectorization, fast-time major.
    pub vector: CVector,
}

/// Phase of the chirp echo for one scatterer at one (fast, slow) instant.
///
/// `delay` is the two-way travel time 2R/c; the returned angle is
/// 2π f_c (t - delay) + π μ (t - delay)².
fn chirp_phase(params: &RadarParams, t: f64, delay: f64) -> f64 {
    let u = t - delay;
    2.0 * std::f64::consts::PI * params.carrier_frequency_hz * u
        + std::f64::consts::PI * params.chirp_rate_hz_per_s * u * u
}

/// Synthesizes sparse-aperture echo data for a scene.
///
/// Each sample is the coherent sum over the scene's nonzero points of a
/// unit-modulus chirp term weighted by the point coefficient. With a noise
/// spec, seeded circular complex Gaussian noise is added at the requested
/// SNR relative to mean sample power.
pub fn synth_echo(
    params: &RadarParams,
    scene: &SceneModel,
    aperture: &ApertureSelection,
    noise: Option<NoiseSpec>,
) -> Result<EchoData, RadarError> {
    params.validate()?;
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
    let mut samples = CMatrix::zeros(params.fast_time_samples, m_s);
    for (col, &m) in aperture.indices().iter().enumerate() {
        let tau = params.slow_time(m);
        for (row, &t) in fast.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for p in scene.points() {
                if p.coefficient.norm() == 0.0 {
                    continue;
                }
                let delay = 2.0 * p.range.range_at(tau) / SPEED_OF_LIGHT;
                acc += p.coefficient * Complex64::cis(chirp_phase(params, t, delay));
            }
            samples[(row, col)] = acc;
        }
    }

    if let Some(spec) = noise {
        add_noise(&mut samples, spec);
    }

    let vector = vectorize_echo(&samples);
    Ok(EchoData { samples, vector })
}

fn add_noise(samples: &mut CMatrix, spec: NoiseSpec) {
    let n = samples.len() as f64;
    let mean_power: f64 = samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / n;
    let noise_power = mean_power * 10f64.powf(-spec.snr_db / 10.0);
    // Split evenly between the quadratures.
    let normal = Normal::new(0.0, (noise_power / 2.0).sqrt()).expect("finite std dev");
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    for z in samples.iter_mut() {
        *z += Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng));
    }
}

/// Flattens echo samples into the measurement vector.
///
/// Entry n (0-based) reads S(n / M_s, n mod M_s): the fast-time index
/// advances once per M_s entries and the slow-time index cycles, which is
/// the row-major flattening of `S`.
pub fn vectorize_echo(samples: &CMatrix) -> CVector {
    let m_s = samples.ncols();
    CVector::from_fn(samples.nrows() * m_s, |n, _| samples[(n / m_s, n % m_s)])
}

/// Inverse of [`vectorize_echo`] for known dimensions.
pub fn devectorize_echo(
    vector: &CVector,
    fast_samples: usize,
    m_s: usize,
) -> Result<CMatrix, RadarError> {
    if fast_samples * m_s != vector.len() {
        return Err(RadarError::DimensionMismatch(format!(
            "{} entries cannot fill {}x{}",
            vector.len(),
            fast_samples,
            m_s
        )));
    }
    Ok(CMatrix::from_fn(fast_samples, m_s, |l, m| vector[l * m_s + m]))
}
