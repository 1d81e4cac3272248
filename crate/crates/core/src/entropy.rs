// SPDX-License-Identifier: Apache-2.0

//! Simulated path-delay entropy source.
//!
//! A device is modeled as rows x cols stages of 80 candidate segments each,
//! with two segment-delay tables per stage (rising and falling edges) and a
//! per-tap output-routing offset. A challenge selects one segment per stage
//! and the edge polarity; the path index selects the output tap. Per-device
//! segment delays are the static entropy; additive Gaussian measurement
//! noise on the digitized count is the dynamic entropy.
//!
//! The timing phase runs the 128-challenge schedule twice over the tap
//! halves: measurements 0..2047 take taps 0..15 of every challenge and fill
//! the first set, measurements 2048..4095 take taps 16..31 and fill the
//! second. Entries at equal index in the two sets therefore measure the same
//! challenge configuration through neighboring taps, which is what lets the
//! differencing stage expose (and the spread-factor chain remove) the
//! iteration-pair correlations the correlation scan looks for.

use crate::bits::BitBuf;
use crate::error::{Error, Result};
use crate::rng::GaussianStream;
use crate::sequence::{Challenge, CHALLENGES_PER_PHASE, PATHS_PER_CHALLENGE, SET_SIZE};
use serde::{Deserialize, Serialize};

/// Nominal per-segment delay mean, picoseconds.
const SEG_MEAN_PS: f64 = 1800.0;
/// Per-segment process-variation sigma, picoseconds.
const SEG_SIGMA_PS: f64 = 260.0;
/// Output-tap routing spread, picoseconds. Small against the segment spread:
/// the 32 taps are short routing stubs, not configurable logic.
const TAP_SIGMA_PS: f64 = 40.0;
/// Calibration maps the achievable nominal range onto these TDC counts.
const CAL_LO: f64 = 310.0;
const CAL_HI: f64 = 990.0;
/// TDC saturation.
pub const DV_MAX: u16 = 4095;

pub const MEASUREMENTS_PER_PHASE: usize = CHALLENGES_PER_PHASE * PATHS_PER_CHALLENGE;

/// One digitized path delay (12-bit TDC count, roughly 18 ps per count).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DelayValue(pub u16);

impl DelayValue {
    pub fn lsb(self) -> u8 {
        (self.0 & 1) as u8
    }
}

/// Stage/segment/tap shape of a simulated device.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Geometry {
    pub rows: usize,
    pub cols: usize,
    pub segments_per_stage: usize,
}

impl Default for Geometry {
    fn default() -> Self {
        Geometry {
            rows: 3,
            cols: 2,
            segments_per_stage: 80,
        }
    }
}

impl Geometry {
    pub fn stages(&self) -> usize {
        self.rows * self.cols
    }
}

/// Environmental operating point applied at measurement time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvCondition {
    /// Additive shift in TDC counts (temperature / DC supply level).
    pub temp_offset: f64,
    /// Multiplicative factor on all nominal delays.
    pub supply_scale: f64,
}

impl Default for EnvCondition {
    fn default() -> Self {
        EnvCondition {
            temp_offset: 0.0,
            supply_scale: 1.0,
        }
    }
}

impl EnvCondition {
    pub fn validate(&self) -> Result<()> {
        if self.supply_scale <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "supply_scale must be positive, got {}",
                self.supply_scale
            )));
        }
        Ok(())
    }
}

/// Measurement-noise configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Standard deviation of the zero-mean Gaussian noise, in TDC counts.
    pub sigma: f64,
    pub noise_seed: u64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            sigma: 1.0,
            noise_seed: 1,
        }
    }
}

impl NoiseModel {
    /// A fresh stream for one timing phase. Distinct phases get distinct
    /// substreams so they can run concurrently yet reproducibly.
    pub fn stream(&self, phase_index: u64) -> NoiseStream {
        let mut s = self.noise_seed;
        let mut seed = 0u64;
        for _ in 0..=phase_index {
            seed = crate::rng::splitmix64(&mut s);
        }
        NoiseStream {
            gauss: GaussianStream::new(seed),
            sigma: self.sigma,
        }
    }
}

/// Owned per-phase noise source; one draw per measurement.
#[derive(Clone, Debug)]
pub struct NoiseStream {
    gauss: GaussianStream,
    sigma: f64,
}

impl NoiseStream {
    pub fn draw(&mut self) -> f64 {
        // A draw is consumed even at sigma = 0 so call sequences stay aligned
        // across noise configurations.
        self.gauss.sample() * self.sigma
    }
}

/// Seed-plus-geometry form of a fingerprint, the JSON exchange format.
/// The delay tables are regenerated on import.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviceSpec {
    pub device_seed: u64,
    pub geometry: Geometry,
}

/// Per-device delay tables emulating process variation.
#[derive(Clone, Debug)]
pub struct DeviceFingerprint {
    pub device_seed: u64,
    pub geometry: Geometry,
    /// segment_ps[polarity][stage][segment], picoseconds.
    segment_ps: [Vec<Vec<f64>>; 2],
    /// Per-tap routing offsets, picoseconds (zero-mean).
    tap_ps: Vec<f64>,
    /// Affine picoseconds -> counts calibration.
    cal_gain: f64,
    cal_offset: f64,
}

/// Builds the deterministic fingerprint for a device seed.
pub fn build_device(device_seed: u64, geometry: Geometry) -> Result<DeviceFingerprint> {
    if geometry.rows == 0 || geometry.cols == 0 || geometry.segments_per_stage == 0 {
        return Err(Error::InvalidGeometry(format!("{geometry:?}")));
    }
    let stages = geometry.stages();
    let mut gauss = GaussianStream::new(device_seed);
    let mut segment_ps: [Vec<Vec<f64>>; 2] = [Vec::new(), Vec::new()];
    for table in &mut segment_ps {
        for _ in 0..stages {
            let stage: Vec<f64> = (0..geometry.segments_per_stage)
                .map(|_| SEG_MEAN_PS + SEG_SIGMA_PS * gauss.sample())
                .collect();
            table.push(stage);
        }
    }
    let tap_ps: Vec<f64> = (0..PATHS_PER_CHALLENGE)
        .map(|_| TAP_SIGMA_PS * gauss.sample())
        .collect();

    // Calibrate so the full achievable nominal range, including tap extremes,
    // lands on [CAL_LO, CAL_HI] counts. Stages select independently, so the
    // extremes are per-stage extrema sums.
    let mut min_ps = 0.0f64;
    let mut max_ps = 0.0f64;
    for stage in 0..stages {
        let lo = segment_ps
            .iter()
            .flat_map(|t| &t[stage])
            .cloned()
            .fold(f64::INFINITY, f64::min);
        let hi = segment_ps
            .iter()
            .flat_map(|t| &t[stage])
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        min_ps += lo;
        max_ps += hi;
    }
    let tap_lo = tap_ps.iter().cloned().fold(f64::INFINITY, f64::min);
    let tap_hi = tap_ps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    min_ps += tap_lo;
    max_ps += tap_hi;
    if max_ps <= min_ps {
        return Err(Error::InvalidGeometry(
            "degenerate delay table: no spread across segments".into(),
        ));
    }
    let cal_gain = (CAL_HI - CAL_LO) / (max_ps - min_ps);
    let cal_offset = CAL_LO - cal_gain * min_ps;

    Ok(DeviceFingerprint {
        device_seed,
        geometry,
        segment_ps,
        tap_ps,
        cal_gain,
        cal_offset,
    })
}

impl DeviceFingerprint {
    pub fn spec(&self) -> DeviceSpec {
        DeviceSpec {
            device_seed: self.device_seed,
            geometry: self.geometry,
        }
    }

    pub fn from_spec(spec: &DeviceSpec) -> Result<Self> {
        build_device(spec.device_seed, spec.geometry)
    }

    pub fn segment_delay_ps(&self, polarity: usize, stage: usize, segment: usize) -> f64 {
        self.segment_ps[polarity][stage][segment]
    }

    /// Calibrated nominal delay in counts for (challenge, tap), before any
    /// environment effect or noise.
    pub fn nominal_counts(&self, challenge: Challenge, path_idx: usize) -> f64 {
        assert!(path_idx < PATHS_PER_CHALLENGE);
        let pol = challenge.polarity();
        let mut ps = self.tap_ps[path_idx];
        for stage in 0..self.geometry.stages() {
            let seg = (challenge.stage_field(stage) as usize) % self.geometry.segments_per_stage;
            ps += self.segment_ps[pol][stage][seg];
        }
        self.cal_gain * ps + self.cal_offset
    }
}

/// One timing phase's output: the two 2048-element delay sets, the LSB
/// stream in measurement order, and the saturation health counter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimingRecord {
    pub dv_a: Vec<DelayValue>,
    pub dv_b: Vec<DelayValue>,
    pub lsb_stream: BitBuf,
    pub clamp_events: u32,
}

/// Measures one path: digitize(nominal * scale + offset + noise), saturating
/// to the 12-bit counter range. Consumes exactly one noise draw.
pub fn measure_path(
    device: &DeviceFingerprint,
    challenge: Challenge,
    path_idx: usize,
    env: &EnvCondition,
    noise: &mut NoiseStream,
) -> (DelayValue, bool) {
    let nominal = device.nominal_counts(challenge, path_idx);
    let analog = nominal * env.supply_scale + env.temp_offset + noise.draw();
    let rounded = analog.round();
    let clamped = !(0.0..=DV_MAX as f64).contains(&rounded);
    let dv = rounded.clamp(0.0, DV_MAX as f64) as u16;
    (DelayValue(dv), clamped)
}

/// Runs the 4096 measurements of one phase: taps 0..15 of each challenge in
/// schedule order (set A), then taps 16..31 (set B).
pub fn timing_phase(
    device: &DeviceFingerprint,
    challenges: &[Challenge],
    env: &EnvCondition,
    noise: &mut NoiseStream,
) -> TimingRecord {
    assert_eq!(challenges.len(), CHALLENGES_PER_PHASE);
    let half = PATHS_PER_CHALLENGE / 2;
    let mut dv_a = Vec::with_capacity(SET_SIZE);
    let mut dv_b = Vec::with_capacity(SET_SIZE);
    let mut lsb_stream = BitBuf::with_capacity(MEASUREMENTS_PER_PHASE);
    let mut clamp_events = 0u32;
    for pass in 0..2 {
        for &challenge in challenges {
            for t in 0..half {
                let path_idx = pass * half + t;
                let (dv, clamped) = measure_path(device, challenge, path_idx, env, noise);
                if clamped {
                    clamp_events += 1;
                }
                lsb_stream.push(dv.lsb());
                if pass == 0 {
                    dv_a.push(dv);
                } else {
                    dv_b.push(dv);
                }
            }
        }
    }
    TimingRecord {
        dv_a,
        dv_b,
        lsb_stream,
        clamp_events,
    }
}
