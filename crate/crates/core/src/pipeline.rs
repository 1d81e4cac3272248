// SPDX-License-Identifier: Apache-2.0

//! End-to-end orchestration: boot-strap, timing, and sponge phases per
//! cycle, plus the experiment drivers behind the CLI subcommands.
//!
//! One cycle is: a boot-strap timing phase seeded with 1 whose delay values
//! are discarded and whose nonce is kept; the challenge generator reseeded
//! from the nonce's first 64 bits; a second timing phase whose delay values
//! are kept; then 2048 sponge iterations yielding 2^22 bits. Cycles repeat
//! until the bit budget is covered (output is whole cycles, so it may
//! overshoot the budget by up to one cycle).

use crate::bits::BitBuf;
use crate::entropy::{
    build_device, timing_phase, DeviceFingerprint, EnvCondition, Geometry, NoiseModel, TimingRecord,
};
use crate::error::{Error, Result};
use crate::nonce::{distill, NonceBuffer};
use crate::sequence::{challenge_schedule, Lfsr64, SelectorConfig, LFSR64_TAPS};
use crate::sponge::{
    sponge_run, CollectTrace, NoTrace, ParamPolicy, RangeMode, SpongeOptions, SpongeReport,
    TraceSink, BITS_PER_RUN,
};
use crate::stats::estimators::{estimate_all, EstimatorSet};
use crate::stats::pearson::{pcc_scan, PairSampling, PccReport};
use serde::Serialize;
use std::time::Instant;

/// Full run configuration; every field has a CLI flag or config key.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub device_seed: u64,
    pub noise_seed: u64,
    pub noise_sigma: f64,
    pub temp_offset: f64,
    pub supply_scale: f64,
    pub geometry: Geometry,
    pub chaining_enabled: bool,
    pub rc_randomized: bool,
    pub tcc_randomized: bool,
    /// Used for iterations when the corresponding randomization is off.
    pub fixed_rc: u32,
    pub fixed_tcc: u32,
    /// Literal compensation-bound arithmetic (comparison runs only).
    pub literal_gpev_bounds: bool,
    /// Challenge-generator tap mask (experimentation; default is the
    /// validated maximal-length set).
    pub lfsr64_taps: u64,
    /// Selector tap mask and de Bruijn extension (experimentation).
    pub selector: SelectorConfig,
    pub bit_budget: u64,
    pub permutations: u32,
    pub pcc_pairs: usize,
    pub pcc_seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            device_seed: 1,
            noise_seed: 1,
            noise_sigma: 1.0,
            temp_offset: 0.0,
            supply_scale: 1.0,
            geometry: Geometry::default(),
            chaining_enabled: true,
            rc_randomized: true,
            tcc_randomized: true,
            fixed_rc: 160,
            fixed_tcc: 14,
            literal_gpev_bounds: false,
            lfsr64_taps: LFSR64_TAPS,
            selector: SelectorConfig::default(),
            bit_budget: BITS_PER_RUN as u64,
            permutations: 1_000,
            pcc_pairs: 100_000,
            pcc_seed: 1,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.env().validate()?;
        if !(128..=191).contains(&self.fixed_rc) {
            return Err(Error::InvalidConfig(format!(
                "fixed_rc {} outside [128, 191]",
                self.fixed_rc
            )));
        }
        if !(8..=22).contains(&self.fixed_tcc) || !self.fixed_tcc.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "fixed_tcc {} not an even value in [8, 22]",
                self.fixed_tcc
            )));
        }
        if self.noise_sigma < 0.0 {
            return Err(Error::InvalidConfig("noise_sigma must be >= 0".into()));
        }
        if self.bit_budget == 0 {
            return Err(Error::InvalidConfig("bit_budget must be > 0".into()));
        }
        if self.lfsr64_taps & (1 << 63) == 0 {
            return Err(Error::InvalidConfig(
                "lfsr64_taps must include bit 63".into(),
            ));
        }
        self.selector.validate()?;
        Ok(())
    }

    pub fn env(&self) -> EnvCondition {
        EnvCondition {
            temp_offset: self.temp_offset,
            supply_scale: self.supply_scale,
        }
    }

    pub fn noise_model(&self) -> NoiseModel {
        NoiseModel {
            sigma: self.noise_sigma,
            noise_seed: self.noise_seed,
        }
    }

    pub fn device(&self) -> Result<DeviceFingerprint> {
        build_device(self.device_seed, self.geometry)
    }

    pub fn sponge_options(&self) -> SpongeOptions {
        SpongeOptions {
            chaining_enabled: self.chaining_enabled,
            params: ParamPolicy {
                fixed_rc: (!self.rc_randomized).then_some(self.fixed_rc),
                fixed_tcc: (!self.tcc_randomized).then_some(self.fixed_tcc),
            },
            range_mode: if self.literal_gpev_bounds {
                RangeMode::LiteralBounds
            } else {
                RangeMode::TrimmedSpan
            },
            selector: self.selector,
        }
    }

    pub fn cycles(&self) -> u64 {
        self.bit_budget.div_ceil(BITS_PER_RUN as u64)
    }
}

/// Deterministic per-run accounting (reproducible for a fixed config).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RunCounters {
    pub bits_emitted: u64,
    pub cycles: u64,
    pub clamp_events: u64,
    pub positive_outputs: u64,
    pub negative_outputs: u64,
    pub zero_outputs: u64,
}

/// Wall-clock figures; informational only, never part of any pass/fail.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RunTimings {
    pub timing_phase_ms: f64,
    pub sponge_ms: f64,
    pub total_ms: f64,
    pub throughput_bits_per_sec: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RunReport {
    pub counters: RunCounters,
    pub timings: RunTimings,
}

/// One cycle's intermediate products, reused by the experiment drivers.
pub struct CycleData {
    pub nonce: NonceBuffer,
    pub timing: TimingRecord,
    pub boot_clamps: u32,
}

/// Executes phase 1 (boot-strap + timing) of cycle `cycle_idx`.
pub fn phase_one(device: &DeviceFingerprint, cfg: &RunConfig, cycle_idx: u64) -> CycleData {
    let env = cfg.env();
    let noise = cfg.noise_model();
    // Boot-strap: generator seeded with 1, delay values discarded.
    let mut lfsr = Lfsr64::with_taps(1, cfg.lfsr64_taps);
    let sched = challenge_schedule(&mut lfsr);
    let boot = timing_phase(device, &sched, &env, &mut noise.stream(2 * cycle_idx));
    let nonce = distill(&boot.lsb_stream);
    // Keeper phase: generator reseeded from the nonce.
    let mut lfsr = Lfsr64::with_taps(nonce.derive_seed(), cfg.lfsr64_taps);
    let sched = challenge_schedule(&mut lfsr);
    let timing = timing_phase(device, &sched, &env, &mut noise.stream(2 * cycle_idx + 1));
    CycleData {
        nonce,
        timing,
        boot_clamps: boot.clamp_events,
    }
}

/// Runs the pipeline, handing each cycle's bits to `sink` as they are
/// produced (suitable for piping into external test tools).
pub fn run_trng_with(
    cfg: &RunConfig,
    mut sink: impl FnMut(&BitBuf) -> Result<()>,
) -> Result<RunReport> {
    cfg.validate()?;
    let device = cfg.device()?;
    let opts = cfg.sponge_options();
    let mut counters = RunCounters::default();
    let mut timing_ms = 0.0;
    let mut sponge_ms = 0.0;
    let started = Instant::now();
    for cycle in 0..cfg.cycles() {
        let t0 = Instant::now();
        let data = phase_one(&device, cfg, cycle);
        timing_ms += t0.elapsed().as_secs_f64() * 1e3;
        let t1 = Instant::now();
        let mut out = BitBuf::with_capacity(BITS_PER_RUN);
        let rep: SpongeReport =
            sponge_run(&data.timing, &data.nonce, &opts, &mut out, &mut NoTrace)?;
        sponge_ms += t1.elapsed().as_secs_f64() * 1e3;
        counters.bits_emitted += out.len() as u64;
        counters.cycles += 1;
        counters.clamp_events += (data.boot_clamps + data.timing.clamp_events) as u64;
        counters.positive_outputs += rep.positive_outputs;
        counters.negative_outputs += rep.negative_outputs;
        counters.zero_outputs += rep.zero_outputs;
        sink(&out)?;
    }
    let total_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(RunReport {
        timings: RunTimings {
            timing_phase_ms: timing_ms,
            sponge_ms,
            total_ms,
            throughput_bits_per_sec: counters.bits_emitted as f64 / (total_ms / 1e3),
        },
        counters,
    })
}

/// Convenience wrapper collecting all bits in memory.
pub fn run_trng(cfg: &RunConfig) -> Result<(BitBuf, RunReport)> {
    let mut all = BitBuf::with_capacity(cfg.cycles() as usize * BITS_PER_RUN);
    let report = run_trng_with(cfg, |chunk| {
        all.extend(chunk);
        Ok(())
    })?;
    Ok((all, report))
}

#[derive(Clone, Debug, Serialize)]
pub struct PccExperimentReport {
    pub chained: PccReport,
    pub unchained: PccReport,
    pub pairs_requested: usize,
}

/// Runs the sponge twice over one cycle's data, with and without
/// spread-factor chaining, and scans pair correlations of the residue sets
/// with a shared sampling seed.
pub fn experiment_pcc(cfg: &RunConfig) -> Result<PccExperimentReport> {
    cfg.validate()?;
    let device = cfg.device()?;
    let data = phase_one(&device, cfg, 0);
    let sampling = if cfg.pcc_pairs == 0 {
        PairSampling::AllPairs
    } else {
        PairSampling::Random {
            pairs: cfg.pcc_pairs,
            seed: cfg.pcc_seed,
        }
    };
    let run = |chaining: bool| -> Result<PccReport> {
        let mut opts = cfg.sponge_options();
        opts.chaining_enabled = chaining;
        let mut trace = CollectTrace::default();
        let mut out = BitBuf::with_capacity(BITS_PER_RUN);
        sponge_run(&data.timing, &data.nonce, &opts, &mut out, &mut trace)?;
        pcc_scan(&trace.rows, sampling)
    };
    Ok(PccExperimentReport {
        chained: run(true)?,
        unchained: run(false)?,
        pairs_requested: cfg.pcc_pairs,
    })
}

/// Runs the sponge over one cycle with an arbitrary trace sink (used by the
/// CLI to stream residue sets to disk).
pub fn traced_cycle(cfg: &RunConfig, trace: &mut dyn TraceSink) -> Result<(BitBuf, SpongeReport)> {
    cfg.validate()?;
    let device = cfg.device()?;
    let data = phase_one(&device, cfg, 0);
    let mut out = BitBuf::with_capacity(BITS_PER_RUN);
    let rep = sponge_run(
        &data.timing,
        &data.nonce,
        &cfg.sponge_options(),
        &mut out,
        trace,
    )?;
    Ok((out, rep))
}

#[derive(Clone, Debug, Serialize)]
pub struct RcTccCell {
    pub device_seed: u64,
    pub rc_randomized: bool,
    pub tcc_randomized: bool,
    pub estimates: EstimatorSet,
    pub suite_minimum: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RcTccReport {
    pub bits_per_sequence: u64,
    pub cells: Vec<RcTccCell>,
}

impl RcTccReport {
    /// Median suite minimum for one (rc, tcc) randomization cell.
    pub fn median_minimum(&self, rc_on: bool, tcc_on: bool) -> f64 {
        let mut vals: Vec<f64> = self
            .cells
            .iter()
            .filter(|c| c.rc_randomized == rc_on && c.tcc_randomized == tcc_on)
            .map(|c| c.suite_minimum)
            .collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if vals.is_empty() {
            return f64::NAN;
        }
        let mid = vals.len() / 2;
        if vals.len() % 2 == 1 {
            vals[mid]
        } else {
            0.5 * (vals[mid - 1] + vals[mid])
        }
    }
}

/// Parameter-randomization ablation: per device, the same cycle data is
/// post-processed under the four (rc, tcc) randomization settings and the
/// non-IID estimator subset is applied to each output.
pub fn experiment_rc_tcc(cfg: &RunConfig, device_seeds: &[u64]) -> Result<RcTccReport> {
    assert!(device_seeds.len() >= 2, "need at least two devices");
    cfg.validate()?;
    let cycles = cfg.cycles();
    let mut cells = Vec::with_capacity(device_seeds.len() * 4);
    for &seed in device_seeds {
        let mut dev_cfg = cfg.clone();
        dev_cfg.device_seed = seed;
        let device = dev_cfg.device()?;
        // Delay values held constant across the four configurations.
        let data: Vec<CycleData> = (0..cycles)
            .map(|c| phase_one(&device, &dev_cfg, c))
            .collect();
        for (rc_on, tcc_on) in [(false, false), (false, true), (true, false), (true, true)] {
            let mut run_cfg = dev_cfg.clone();
            run_cfg.rc_randomized = rc_on;
            run_cfg.tcc_randomized = tcc_on;
            let opts = run_cfg.sponge_options();
            let mut bits = BitBuf::with_capacity(cycles as usize * BITS_PER_RUN);
            for d in &data {
                sponge_run(&d.timing, &d.nonce, &opts, &mut bits, &mut NoTrace)?;
            }
            let unpacked = bits.to_bit_bytes();
            let estimates =
                estimate_all(&unpacked[..cfg.bit_budget.min(bits.len() as u64) as usize]);
            cells.push(RcTccCell {
                device_seed: seed,
                rc_randomized: rc_on,
                tcc_randomized: tcc_on,
                estimates,
                suite_minimum: estimates.minimum(),
            });
        }
    }
    Ok(RcTccReport {
        bits_per_sequence: cfg.bit_budget,
        cells,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EnvDivergence {
    pub temp_offset: f64,
    pub supply_scale: f64,
    pub differing_bits: u64,
    pub total_bits: u64,
    pub hamming_fraction: f64,
}

/// Environment-attack sweep: reruns the full pipeline under each condition
/// with the same noise seed and reports output divergence vs the baseline.
pub fn experiment_env_attack(
    cfg: &RunConfig,
    sweep: &[EnvCondition],
) -> Result<Vec<EnvDivergence>> {
    let mut base_cfg = cfg.clone();
    base_cfg.temp_offset = 0.0;
    base_cfg.supply_scale = 1.0;
    let (base_bits, _) = run_trng(&base_cfg)?;
    let base = base_bits.as_bytes();
    sweep
        .iter()
        .map(|env| {
            let mut case = cfg.clone();
            case.temp_offset = env.temp_offset;
            case.supply_scale = env.supply_scale;
            let (bits, _) = run_trng(&case)?;
            let differing: u64 = bits
                .as_bytes()
                .iter()
                .zip(base)
                .map(|(a, b)| (a ^ b).count_ones() as u64)
                .sum();
            let total = bits.len().min(base_bits.len()) as u64;
            Ok(EnvDivergence {
                temp_offset: env.temp_offset,
                supply_scale: env.supply_scale,
                differing_bits: differing,
                total_bits: total,
                hamming_fraction: differing as f64 / total as f64,
            })
        })
        .collect()
}

/// Concatenates nonce bits from repeated boot-strap phases until `nbits`
/// are available (dynamic-entropy quality experiments).
pub fn export_nonce_bits(cfg: &RunConfig, nbits: usize) -> Result<BitBuf> {
    cfg.validate()?;
    let device = cfg.device()?;
    let env = cfg.env();
    let noise = cfg.noise_model();
    let mut out = BitBuf::with_capacity(nbits);
    let mut phase = 0u64;
    while out.len() < nbits {
        let mut lfsr = Lfsr64::with_taps(1, cfg.lfsr64_taps);
        let sched = challenge_schedule(&mut lfsr);
        let rec = timing_phase(&device, &sched, &env, &mut noise.stream(phase));
        let nonce = distill(&rec.lsb_stream);
        for i in 0..nonce.bits().len() {
            if out.len() == nbits {
                break;
            }
            out.push(nonce.bits().get(i));
        }
        phase += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> RunConfig {
        RunConfig::default()
    }

    #[test]
    fn one_cycle_budget_yields_exactly_one_run() {
        let cfg = small_cfg();
        assert_eq!(cfg.cycles(), 1);
        let (bits, report) = run_trng(&cfg).unwrap();
        assert_eq!(bits.len(), BITS_PER_RUN);
        assert_eq!(report.counters.cycles, 1);
        assert_eq!(report.counters.bits_emitted, BITS_PER_RUN as u64);
    }

    #[test]
    fn ten_megabyte_budget_takes_twenty_cycles() {
        let mut cfg = small_cfg();
        cfg.bit_budget = 80_000_000;
        assert_eq!(cfg.cycles(), 20);
    }

    #[test]
    fn identical_configs_reproduce_bitstreams_and_counters() {
        let cfg = small_cfg();
        let (b1, r1) = run_trng(&cfg).unwrap();
        let (b2, r2) = run_trng(&cfg).unwrap();
        assert_eq!(b1, b2);
        assert_eq!(r1.counters, r2.counters);
    }

    #[test]
    fn config_validation_rejects_bad_fixed_params() {
        let mut cfg = small_cfg();
        cfg.rc_randomized = false;
        cfg.fixed_rc = 200;
        assert!(cfg.validate().is_err());
        cfg.fixed_rc = 160;
        cfg.fixed_tcc = 9;
        assert!(cfg.validate().is_err());
        cfg.fixed_tcc = 23;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn nonce_export_is_deterministic_and_sized() {
        let cfg = small_cfg();
        let n1 = export_nonce_bits(&cfg, 1_000).unwrap();
        let n2 = export_nonce_bits(&cfg, 1_000).unwrap();
        assert_eq!(n1, n2);
        assert_eq!(n1.len(), 1_000);
    }
}
