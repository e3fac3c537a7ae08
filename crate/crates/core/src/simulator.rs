//! Ray-based synthetic T(0,1) propagation plus acquisition-chain emulation.
//!
//! Each receiver trace is a superposition of tone bursts placed at their
//! time-of-flight delays:
//!
//! * the direct ring-to-ring arrival,
//! * a defect scatter arrival (path through the defect),
//! * first-order pipe-end reflections when boundaries are reflective.
//!
//! The mode is non-dispersive, so a burst travels unchanged at the group
//! velocity; arrival delays are rounded to the nearest sample before the
//! burst is inserted. On top of the clean synthesis the acquisition chain
//! applies per-trace Gaussian noise (standing in for unsuppressed
//! longitudinal/flexural modes), trace averaging, mid-tread ADC
//! quantization and keep-every-Nth decimation, in that order.

use crate::excitation::{burst_peak_abs, hanning_toneburst, ExcitationError, ExcitationSpec};
use crate::geometry::{rx_distance, tx_distance, ArrayLayout, PipeSpec, SurfacePoint};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimulationError {
    #[error(transparent)]
    Excitation(#[from] ExcitationError),
    #[error("defect at z = {z} m must lie strictly between the rings (tx {tx_z} m, rx {rx_z} m)")]
    DefectOutsideSpan { z: f64, tx_z: f64, rx_z: f64 },
    #[error("trace of {samples} samples is too short for the direct arrival ({needed} samples needed)")]
    TraceTooShort { samples: usize, needed: usize },
    #[error("group velocity must be positive, got {0} m/s")]
    InvalidVelocity(f64),
    #[error("pipe ends ({near} m, {far} m) must bracket both rings (tx {tx_z} m, rx {rx_z} m)")]
    EndsDoNotBracketRings {
        near: f64,
        far: f64,
        tx_z: f64,
        rx_z: f64,
    },
    #[error("coefficient {name} = {value} must lie in [0, 1]")]
    CoefficientOutOfRange { name: &'static str, value: f64 },
    #[error("adc_bits must lie in [2, 24], got {0}")]
    InvalidAdcBits(u32),
    #[error("adc full scale must be positive, got {0} V")]
    InvalidFullScale(f64),
    #[error("num_averages must be at least 1")]
    NoAverages,
    #[error("decimation factor must be at least 1")]
    ZeroDecimation,
    #[error("decimation factor {factor} exceeds trace length {len}")]
    DecimationTooCoarse { factor: usize, len: usize },
    #[error("cannot average an empty list of traces")]
    EmptyAverage,
    #[error("traces to average have unequal lengths ({0} vs {1})")]
    RaggedTraces(usize, usize),
}

/// What the defect does to the wavefield, reduced to two scalars.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DefectKind {
    /// Material removal; mainly re-radiates a scattered wavepacket.
    Notch,
    /// Clamped mass; mainly attenuates the direct arrival.
    AddedMass,
}

/// A single surface defect.
///
/// `scatter_amplitude` is the fraction of the incident amplitude
/// re-radiated toward the receivers; `transmission_loss` is the
/// fractional amplitude drop of the direct wave crossing the defect's
/// axial plane.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectSpec {
    pub kind: DefectKind,
    pub position: SurfacePoint,
    pub scatter_amplitude: f64,
    pub transmission_loss: f64,
}

/// Axial boundary handling at the pipe ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryMode {
    /// Free ends: first-order tx→end→rx reflections are synthesized.
    Reflective,
    /// Absorbing ends: no edge reflections.
    LowReflecting,
}

/// Wave-propagation parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationSpec {
    /// Group velocity of the torsional mode in m/s (3130 for steel).
    pub group_velocity: f64,
    pub boundary_mode: BoundaryMode,
    /// Amplitude of each first-order edge reflection, in [0, 1].
    pub edge_reflection_coefficient: f64,
    /// Axial positions of the pipe ends in metres, (near, far). Must
    /// bracket both transducer rings.
    pub pipe_end_positions: (f64, f64),
    /// Additive white Gaussian noise level. The SNR is defined against
    /// the peak of the clean direct arrival:
    /// `noise_std = direct_peak · 10^(−snr_db/20)`. `None` disables noise.
    pub mode_leakage_snr_db: Option<f64>,
}

/// Acquisition-chain parameters. The chain runs noise → averaging →
/// ADC quantization → decimation.
#[derive(Debug, Clone, PartialEq)]
pub struct AcquisitionSpec {
    /// Sampling rate of the synthesis/capture front end in Hz.
    pub sampling_rate: f64,
    /// Samples recorded per channel before decimation.
    pub samples_per_channel: usize,
    /// Number of noisy traces averaged per measurement.
    pub num_averages: usize,
    /// Keep-every-Nth decimation factor (1 = none).
    pub decimation_factor: usize,
    /// ADC resolution in bits (mid-tread quantizer).
    pub adc_bits: u32,
    /// Full-scale input span of the ADC in volts; codes span
    /// `[−full_scale/2, +full_scale/2]`.
    pub adc_full_scale: f64,
}

impl AcquisitionSpec {
    /// Sampling rate of the stored samples after decimation.
    pub fn effective_sampling_rate(&self) -> f64 {
        self.sampling_rate / self.decimation_factor as f64
    }

    /// Stored samples per channel after decimation.
    pub fn effective_samples_per_channel(&self) -> usize {
        self.samples_per_channel / self.decimation_factor
    }

    fn validate(&self) -> Result<(), SimulationError> {
        if self.num_averages == 0 {
            return Err(SimulationError::NoAverages);
        }
        if self.decimation_factor == 0 {
            return Err(SimulationError::ZeroDecimation);
        }
        if !(2..=24).contains(&self.adc_bits) {
            return Err(SimulationError::InvalidAdcBits(self.adc_bits));
        }
        if !(self.adc_full_scale > 0.0) {
            return Err(SimulationError::InvalidFullScale(self.adc_full_scale));
        }
        Ok(())
    }
}

/// Which condition a record was captured under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Baseline,
    Damage,
}

/// Per-receiver sampled voltage traces plus acquisition metadata.
///
/// `channels[m]` is receiver `m`'s trace; all rows have equal length,
/// which is `acquisition.effective_samples_per_channel()` for sets
/// produced by [`simulate`]. Sample 0 of every trace corresponds to
/// excitation onset.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveformSet {
    pub channels: Vec<Vec<f64>>,
    pub acquisition: AcquisitionSpec,
    pub label: Label,
    /// Digest of the [`ArrayLayout`] the set was recorded under.
    pub layout_digest: u32,
}

impl WaveformSet {
    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    /// Length of the stored traces (post-decimation samples).
    pub fn samples_per_channel(&self) -> usize {
        self.channels.first().map_or(0, Vec::len)
    }

    pub fn effective_sampling_rate(&self) -> f64 {
        self.acquisition.effective_sampling_rate()
    }

    /// Copy with every trace cut to at most `samples` stored samples,
    /// keeping the acquisition bookkeeping consistent.
    pub fn truncated(&self, samples: usize) -> WaveformSet {
        let keep = samples.min(self.samples_per_channel());
        let mut out = self.clone();
        for ch in &mut out.channels {
            ch.truncate(keep);
        }
        out.acquisition.samples_per_channel = keep * self.acquisition.decimation_factor;
        out
    }
}

/// Mid-tread uniform quantization to `2^bits` levels spanning
/// `[−full_scale/2, +full_scale/2]`, saturating at the rails. Zero input
/// maps to zero output exactly.
pub fn apply_adc(trace: &mut [f64], bits: u32, full_scale: f64) {
    let lsb = full_scale / f64::from(1u64 << bits as u64 as u32);
    let max_code = (1i64 << (bits - 1)) - 1;
    let min_code = -(1i64 << (bits - 1));
    for v in trace {
        let code = (*v / lsb).round();
        let code = code.clamp(min_code as f64, max_code as f64);
        *v = code * lsb;
    }
}

/// Keep-every-`factor`-th sample starting at index 0. Output length is
/// `floor(len/factor)`; the caller tracks the reduced effective rate.
pub fn decimate(trace: &[f64], factor: usize) -> Result<Vec<f64>, SimulationError> {
    if factor == 0 {
        return Err(SimulationError::ZeroDecimation);
    }
    if factor > trace.len() {
        return Err(SimulationError::DecimationTooCoarse {
            factor,
            len: trace.len(),
        });
    }
    let keep = trace.len() / factor;
    Ok((0..keep).map(|i| trace[i * factor]).collect())
}

/// Element-wise arithmetic mean of equally long traces.
pub fn average_traces(realizations: &[Vec<f64>]) -> Result<Vec<f64>, SimulationError> {
    let first = realizations.first().ok_or(SimulationError::EmptyAverage)?;
    let len = first.len();
    let mut sum = vec![0.0f64; len];
    for r in realizations {
        if r.len() != len {
            return Err(SimulationError::RaggedTraces(len, r.len()));
        }
        for (acc, v) in sum.iter_mut().zip(r) {
            *acc += v;
        }
    }
    let n = realizations.len() as f64;
    for v in &mut sum {
        *v /= n;
    }
    Ok(sum)
}

fn add_burst(trace: &mut [f64], burst: &[f64], start: usize, amplitude: f64) {
    if amplitude == 0.0 || start >= trace.len() {
        return;
    }
    let n = burst.len().min(trace.len() - start);
    for (t, b) in trace[start..start + n].iter_mut().zip(&burst[..n]) {
        *t += amplitude * b;
    }
}

fn validate_defect(defect: &DefectSpec, layout: &ArrayLayout) -> Result<(), SimulationError> {
    let z = defect.position.z();
    if !(z > layout.tx_ring.z && z < layout.rx_ring.z) {
        return Err(SimulationError::DefectOutsideSpan {
            z,
            tx_z: layout.tx_ring.z,
            rx_z: layout.rx_ring.z,
        });
    }
    for (name, value) in [
        ("scatter_amplitude", defect.scatter_amplitude),
        ("transmission_loss", defect.transmission_loss),
    ] {
        if !(0.0..=1.0).contains(&value) {
            return Err(SimulationError::CoefficientOutOfRange { name, value });
        }
    }
    Ok(())
}

fn validate_propagation(
    propagation: &PropagationSpec,
    layout: &ArrayLayout,
) -> Result<(), SimulationError> {
    if !(propagation.group_velocity > 0.0) {
        return Err(SimulationError::InvalidVelocity(propagation.group_velocity));
    }
    if !(0.0..=1.0).contains(&propagation.edge_reflection_coefficient) {
        return Err(SimulationError::CoefficientOutOfRange {
            name: "edge_reflection_coefficient",
            value: propagation.edge_reflection_coefficient,
        });
    }
    if propagation.boundary_mode == BoundaryMode::Reflective {
        let (near, far) = propagation.pipe_end_positions;
        if !(near <= layout.tx_ring.z && far >= layout.rx_ring.z) {
            return Err(SimulationError::EndsDoNotBracketRings {
                near,
                far,
                tx_z: layout.tx_ring.z,
                rx_z: layout.rx_ring.z,
            });
        }
    }
    Ok(())
}

/// Noise-free ray synthesis at the full acquisition rate, one trace per
/// receiver, before any acquisition-chain processing.
///
/// The burst is sampled at `acquisition.sampling_rate`; the excitation's
/// own `sampling_rate` field is not used here.
pub fn synthesize_clean(
    pipe: &PipeSpec,
    layout: &ArrayLayout,
    excitation: &ExcitationSpec,
    propagation: &PropagationSpec,
    acquisition: &AcquisitionSpec,
    defect: Option<&DefectSpec>,
) -> Result<Vec<Vec<f64>>, SimulationError> {
    validate_propagation(propagation, layout)?;
    if let Some(d) = defect {
        validate_defect(d, layout)?;
    }

    let spec = ExcitationSpec::new(
        excitation.center_frequency,
        excitation.cycles,
        excitation.amplitude_scale,
        acquisition.sampling_rate,
    )?;
    let burst = hanning_toneburst(&spec);
    let fs = acquisition.sampling_rate;
    let n = acquisition.samples_per_channel;
    let velocity = propagation.group_velocity;

    let direct_delay = layout.separation() / velocity;
    let direct_start = (direct_delay * fs).round() as usize;
    if direct_start + burst.len() > n {
        return Err(SimulationError::TraceTooShort {
            samples: n,
            needed: direct_start + burst.len(),
        });
    }
    let direct_amplitude = match defect {
        Some(d) => 1.0 - d.transmission_loss,
        None => 1.0,
    };

    let rx_positions = layout.rx_positions();
    let mut channels = Vec::with_capacity(rx_positions.len());
    for rx in &rx_positions {
        let mut trace = vec![0.0f64; n];
        add_burst(&mut trace, &burst, direct_start, direct_amplitude);

        if let Some(d) = defect {
            let path = tx_distance(&d.position, layout) + rx_distance(&d.position, rx, pipe);
            let start = (path / velocity * fs).round() as usize;
            add_burst(&mut trace, &burst, start, d.scatter_amplitude);
        }

        if propagation.boundary_mode == BoundaryMode::Reflective {
            let (near, far) = propagation.pipe_end_positions;
            for end in [near, far] {
                let path = (end - layout.tx_ring.z).abs() + (end - rx.z()).abs();
                let start = (path / velocity * fs).round() as usize;
                add_burst(&mut trace, &burst, start, propagation.edge_reflection_coefficient);
            }
        }

        channels.push(trace);
    }
    Ok(channels)
}

fn noise_rng(seed: u64, channel: usize, realization: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((channel as u64) << 32) | realization as u64);
    rng
}

/// Full synthetic acquisition: clean synthesis, then per-realization
/// noise, averaging, ADC quantization and decimation.
///
/// Deterministic given `rng_seed`: each (channel, realization) pair draws
/// from its own counter-derived stream, so the result does not depend on
/// evaluation order.
pub fn simulate(
    pipe: &PipeSpec,
    layout: &ArrayLayout,
    excitation: &ExcitationSpec,
    propagation: &PropagationSpec,
    acquisition: &AcquisitionSpec,
    defect: Option<&DefectSpec>,
    rng_seed: u64,
) -> Result<WaveformSet, SimulationError> {
    acquisition.validate()?;
    let clean = synthesize_clean(pipe, layout, excitation, propagation, acquisition, defect)?;

    let noise_std = propagation.mode_leakage_snr_db.map(|snr_db| {
        let spec = ExcitationSpec::new(
            excitation.center_frequency,
            excitation.cycles,
            excitation.amplitude_scale,
            acquisition.sampling_rate,
        )
        .expect("validated by synthesize_clean");
        burst_peak_abs(&spec) * 10f64.powf(-snr_db / 20.0)
    });

    let mut channels = Vec::with_capacity(clean.len());
    for (m, clean_trace) in clean.iter().enumerate() {
        let mut averaged = match noise_std {
            None => clean_trace.clone(),
            Some(std) => {
                let normal = Normal::new(0.0, std).expect("finite std");
                let realizations: Vec<Vec<f64>> = (0..acquisition.num_averages)
                    .map(|r| {
                        let mut rng = noise_rng(rng_seed, m, r);
                        clean_trace.iter().map(|&v| v + normal.sample(&mut rng)).collect()
                    })
                    .collect();
                average_traces(&realizations)?
            }
        };
        apply_adc(&mut averaged, acquisition.adc_bits, acquisition.adc_full_scale);
        channels.push(decimate(&averaged, acquisition.decimation_factor)?);
    }

    Ok(WaveformSet {
        channels,
        acquisition: acquisition.clone(),
        label: if defect.is_some() { Label::Damage } else { Label::Baseline },
        layout_digest: layout.digest(),
    })
}

/// Baseline/damage pair for one scenario. The baseline uses `rng_seed`,
/// the damage record `rng_seed + 1`, so their noise realizations are
/// independent as they would be in separate measurements.
pub fn simulate_pair(
    pipe: &PipeSpec,
    layout: &ArrayLayout,
    excitation: &ExcitationSpec,
    propagation: &PropagationSpec,
    acquisition: &AcquisitionSpec,
    defect: &DefectSpec,
    rng_seed: u64,
) -> Result<(WaveformSet, WaveformSet), SimulationError> {
    let baseline = simulate(pipe, layout, excitation, propagation, acquisition, None, rng_seed)?;
    let damage = simulate(
        pipe,
        layout,
        excitation,
        propagation,
        acquisition,
        Some(defect),
        rng_seed.wrapping_add(1),
    )?;
    Ok((baseline, damage))
}
