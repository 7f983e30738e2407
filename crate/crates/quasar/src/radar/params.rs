use super::RadarError;

/// Waveform and acquisition geometry for one collection.
///
/// Fast time runs within a pulse, slow time across pulses. The fast-time
/// axis is centered on the pulse: `L` samples uniformly spanning
/// `[-T_p/2, T_p/2]` (a single sample sits at 0). Slow time for full-pulse
/// index `m` (0-based) is `m / prf`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadarParams {
    /// Carrier frequency f_c in Hz.
    pub carrier_frequency_hz: f64,
    /// Chirp rate μ in Hz/s.
    pub chirp_rate_hz_per_s: f64,
    /// Pulse duration T_p in seconds.
    pub pulse_duration_s: f64,
    /// Fast-time samples per pulse, L.
    pub fast_time_samples: usize,
    /// Full (dense) pulse count M_all.
    pub full_pulses: usize,
    /// Transmit bandwidth in Hz. Informational; not used by the phase model.
    pub bandwidth_hz: f64,
    /// Pulse repetition frequency in Hz.
    pub prf_hz: f64,
}

impl RadarParams {
    pub fn validate(&self) -> Result<(), RadarError> {
        if self.fast_time_samples < 1 {
            return Err(RadarError::InvalidParams("L must be >= 1".into()));
        }
        if self.full_pulses < 1 {
            return Err(RadarError::InvalidParams("M_all must be >= 1".into()));
        }
        if !(self.pulse_duration_s > 0.0) {
            return Err(RadarError::InvalidParams("T_p must be > 0".into()));
        }
        if !(self.carrier_frequency_hz > 0.0) {
            return Err(RadarError::InvalidParams("f_c must be > 0".into()));
        }
        if !(self.prf_hz > 0.0) {
            return Err(RadarError::InvalidParams("prf must be > 0".into()));
        }
        Ok(())
    }

    /// Fast-time sample instants, uniform over [-T_p/2, T_p/2].
    pub fn fast_time_axis(&self) -> Vec<f64> {
        let l = self.fast_time_samples;
        if l == 1 {
            return vec![0.0];
        }
        let half = self.pulse_duration_s / 2.0;
        let step = self.pulse_duration_s / (l - 1) as f64;
        (0..l).map(|i| -half + i as f64 * step).collect()
    }

    /// Slow-time instant of full-pulse index `m` (0-based).
    pub fn slow_time(&self, m: usize) -> f64 {
        m as f64 / self.prf_hz
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(l: usize) -> RadarParams {
        RadarParams {
            carrier_frequency_hz: 1.0e9,
            chirp_rate_hz_per_s: 0.0,
            pulse_duration_s: 2.0e-4,
            fast_time_samples: l,
            full_pulses: 8,
            bandwidth_hz: 1.0e8,
            prf_hz: 500.0,
        }
    }

    #[test]
    fn fast_time_axis_spans_centered_pulse() {
        let t = params(5).fast_time_axis();
        assert_eq!(t.len(), 5);
        assert_eq!(t[0], -1.0e-4);
        assert_eq!(t[4], 1.0e-4);
        assert!(t[2].abs() < 1e-18);
    }

    #[test]
    fn single_sample_sits_at_pulse_center() {
        assert_eq!(params(1).fast_time_axis(), vec![0.0]);
    }

    #[test]
    fn slow_time_follows_prf() {
        let p = params(4);
        assert_eq!(p.slow_time(0), 0.0);
        assert_eq!(p.slow_time(3), 3.0 / 500.0);
    }

    #[test]
    fn validation_rejects_degenerate_params() {
        let mut p = params(4);
        p.pulse_duration_s = 0.0;
        assert!(p.validate().is_err());
        let mut p = params(4);
        p.fast_time_samples = 0;
        assert!(p.validate().is_err());
    }
}
