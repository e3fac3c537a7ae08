//! Transmitted tone burst: a Hanning-windowed sinusoid.
//!
//! The burst is `(cycles/2)·(1 − cos(2πft/cycles))·sin(2πft)` for
//! `t ∈ [0, cycles/f]` and zero outside, scaled by `amplitude_scale`.
//! With the default 5 cycles the leading constant is 2.5.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExcitationError {
    #[error("center_frequency must be positive, got {0} Hz")]
    InvalidFrequency(f64),
    #[error("sampling_rate ({rate} Hz) must be at least 10x center_frequency ({freq} Hz)")]
    InvalidRate { rate: f64, freq: f64 },
    #[error("cycles must be at least 1")]
    InvalidCycles,
}

/// Parameters of the excitation pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationSpec {
    /// Carrier frequency `f` in Hz.
    pub center_frequency: f64,
    /// Number of carrier cycles under the window.
    pub cycles: u32,
    /// Multiplier applied to the burst; 1.0 keeps the `cycles/2` peak
    /// envelope convention.
    pub amplitude_scale: f64,
    /// Sampling rate in Hz. Must be at least 10x the carrier to avoid
    /// gross aliasing; the default pairing is 85 kHz at 10 MHz.
    pub sampling_rate: f64,
}

impl ExcitationSpec {
    pub fn new(
        center_frequency: f64,
        cycles: u32,
        amplitude_scale: f64,
        sampling_rate: f64,
    ) -> Result<Self, ExcitationError> {
        if !(center_frequency > 0.0) {
            return Err(ExcitationError::InvalidFrequency(center_frequency));
        }
        if !(sampling_rate >= 10.0 * center_frequency) {
            return Err(ExcitationError::InvalidRate {
                rate: sampling_rate,
                freq: center_frequency,
            });
        }
        if cycles < 1 {
            return Err(ExcitationError::InvalidCycles);
        }
        Ok(Self {
            center_frequency,
            cycles,
            amplitude_scale,
            sampling_rate,
        })
    }

    /// Burst duration `cycles / f` in seconds.
    pub fn duration(&self) -> f64 {
        f64::from(self.cycles) / self.center_frequency
    }
}

/// Continuous-time burst value at time `t` seconds.
pub fn toneburst_value(spec: &ExcitationSpec, t: f64) -> f64 {
    if t < 0.0 || t > spec.duration() {
        return 0.0;
    }
    let cycles = f64::from(spec.cycles);
    let phase = 2.0 * std::f64::consts::PI * spec.center_frequency * t;
    spec.amplitude_scale * (cycles / 2.0) * (1.0 - (phase / cycles).cos()) * phase.sin()
}

/// Sampled burst: sample `n` holds the value at `t = n / sampling_rate`.
///
/// The sequence covers the full support plus one trailing sample, so its
/// length is `ceil(duration · sampling_rate) + 1` and both ends are zero.
pub fn hanning_toneburst(spec: &ExcitationSpec) -> Vec<f64> {
    let n = (spec.duration() * spec.sampling_rate).ceil() as usize + 1;
    (0..n)
        .map(|i| toneburst_value(spec, i as f64 / spec.sampling_rate))
        .collect()
}

/// Largest absolute sample of the unit-scale burst. The noise model uses
/// this as its signal reference.
pub fn burst_peak_abs(spec: &ExcitationSpec) -> f64 {
    hanning_toneburst(spec)
        .iter()
        .fold(0.0f64, |m, &v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_85k() -> ExcitationSpec {
        ExcitationSpec::new(85e3, 5, 1.0, 10e6).unwrap()
    }

    #[test]
    fn starts_at_exactly_zero() {
        for f in [85e3, 75e3, 1e3] {
            let spec = ExcitationSpec::new(f, 5, 1.0, 100.0 * f).unwrap();
            assert_eq!(toneburst_value(&spec, 0.0), 0.0);
        }
    }

    #[test]
    fn support_of_85khz_burst_at_10mhz() {
        let spec = spec_85k();
        let burst = hanning_toneburst(&spec);
        // duration 5/85kHz = 58.82 us
        assert!((spec.duration() - 58.82e-6).abs() < 5e-9);
        assert_eq!(burst.len(), 590);
        let in_support = (0..burst.len())
            .filter(|&n| (n as f64 / spec.sampling_rate) < spec.duration())
            .count();
        assert_eq!(in_support, 589);
        assert_eq!(burst[0], 0.0);
        assert_eq!(*burst.last().unwrap(), 0.0);
    }

    #[test]
    fn midpoint_is_a_carrier_zero() {
        let spec = spec_85k();
        // At t = 2.5/f the envelope is maximal (5) but sin(5π) = 0.
        let t = 2.5 / spec.center_frequency;
        assert!(toneburst_value(&spec, t).abs() < 1e-12);
    }

    #[test]
    fn envelope_bound() {
        let spec = ExcitationSpec::new(85e3, 5, 2.0, 10e6).unwrap();
        let t_end = spec.duration();
        for i in 0..=20_000 {
            let t = t_end * i as f64 / 20_000.0;
            assert!(toneburst_value(&spec, t).abs() <= 5.0 * spec.amplitude_scale + 1e-12);
        }
    }

    #[test]
    fn doubling_rate_interleaves_exactly() {
        let base = spec_85k();
        let double = ExcitationSpec::new(85e3, 5, 1.0, 2.0 * base.sampling_rate).unwrap();
        let a = hanning_toneburst(&base);
        let b = hanning_toneburst(&double);
        for (n, &v) in a.iter().enumerate() {
            assert_eq!(v, b[2 * n], "sample {n}");
        }
    }

    #[test]
    fn peak_to_peak_calibration() {
        // Scale the unit burst so its swing matches the 10 V drive pulse.
        let unit = spec_85k();
        let samples = hanning_toneburst(&unit);
        let max = samples.iter().cloned().fold(f64::MIN, f64::max);
        let min = samples.iter().cloned().fold(f64::MAX, f64::min);
        let scale = 10.0 / (max - min);
        let cal = ExcitationSpec::new(85e3, 5, scale, 10e6).unwrap();
        let s = hanning_toneburst(&cal);
        let p2p = s.iter().cloned().fold(f64::MIN, f64::max) - s.iter().cloned().fold(f64::MAX, f64::min);
        assert!((p2p - 10.0).abs() < 1e-9);
    }

    #[test]
    fn five_cycles_reproduce_fixed_constants() {
        // cycles = 5 must give 2.5·(1 − cos(2πft/5))·sin(2πft).
        let spec = spec_85k();
        let f = spec.center_frequency;
        for &t in &[3.7e-6, 11.1e-6, 29.0e-6, 44.4e-6] {
            let phase = 2.0 * std::f64::consts::PI * f * t;
            let direct = 2.5 * (1.0 - (phase / 5.0).cos()) * phase.sin();
            assert!((toneburst_value(&spec, t) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(
            ExcitationSpec::new(0.0, 5, 1.0, 1e6),
            Err(ExcitationError::InvalidFrequency(_))
        ));
        assert!(matches!(
            ExcitationSpec::new(-85e3, 5, 1.0, 1e6),
            Err(ExcitationError::InvalidFrequency(_))
        ));
        assert!(matches!(
            ExcitationSpec::new(85e3, 5, 1.0, 500e3),
            Err(ExcitationError::InvalidRate { .. })
        ));
        assert!(matches!(
            ExcitationSpec::new(85e3, 0, 1.0, 10e6),
            Err(ExcitationError::InvalidCycles)
        ));
    }
}
