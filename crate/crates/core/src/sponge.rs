// SPDX-License-Identifier: Apache-2.0

//! The soft-data sponge loop: pairwise differencing, global process and
//! environmental variation (GPEV) compensation, spread-factor chaining, and
//! bit squeezing. One loop makes 2048 iterations of 2048 bits from one
//! timing record, 2^22 bits total.
//!
//! All value processing past the differencing stage is exact fixed-point
//! arithmetic (see [`crate::fixed`]); a run is reproducible byte for byte.

use crate::bits::BitBuf;
use crate::entropy::TimingRecord;
use crate::error::{Error, Result};
use crate::fixed::{round_to_odd, Fx4, FRAC_ONE};
use crate::nonce::{IterationParams, NonceBuffer};
use crate::sequence::{pair_seeds, select_indices_with, SelectorConfig, SET_SIZE};

pub const ITERATIONS_PER_RUN: usize = SET_SIZE;
pub const BITS_PER_RUN: usize = SET_SIZE * SET_SIZE;

/// Raw signed differences of one iteration, in whole TDC counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DvdRaw(pub Vec<i32>);

/// GPEV-compensated soft values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DvdCompensated(pub Vec<Fx4>);

/// Spread-factor-chained residues, each in (-TCC/2, TCC/2].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DvdChained(pub Vec<Fx4>);

/// The chained internal state: one spread factor per lane, each in [-64, 64).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SfState {
    sf: Vec<Fx4>,
}

impl SfState {
    /// All-zero state, the loop's starting point.
    pub fn zeroed() -> Self {
        SfState {
            sf: vec![Fx4::ZERO; SET_SIZE],
        }
    }

    pub fn values(&self) -> &[Fx4] {
        &self.sf
    }
}

/// Wraps a soft value into [-64, 64) by modular truncation of the high bits.
pub fn wrap_pm64(v: Fx4) -> Fx4 {
    let span = 128 * FRAC_ONE;
    let half = 64 * FRAC_ONE;
    Fx4::from_raw((v.raw() + half).rem_euclid(span) - half)
}

/// Pairwise differencing for one iteration: the two selectors start from the
/// iteration's seed pair and walk their full cycles in lockstep.
pub fn dv_diff(timing: &TimingRecord, iteration: usize) -> DvdRaw {
    dv_diff_with(timing, iteration, SelectorConfig::default())
}

/// [`dv_diff`] with an explicit selector configuration.
pub fn dv_diff_with(timing: &TimingRecord, iteration: usize, selector: SelectorConfig) -> DvdRaw {
    let (seed_a, seed_b) = pair_seeds(iteration);
    let pairs = select_indices_with(seed_a, seed_b, selector);
    DvdRaw(
        pairs
            .iter()
            .map(|&(ia, ib)| timing.dv_a[ia as usize].0 as i32 - timing.dv_b[ib as usize].0 as i32)
            .collect(),
    )
}

/// How the compensation range is derived from the raw extremes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RangeMode {
    /// Symmetric inward trim: range = 0.95 * (max - min). Robust to the sign
    /// of the extremes; the production default.
    #[default]
    TrimmedSpan,
    /// Literal bound arithmetic (max - 0.05*max, min + 0.05*min), which
    /// widens the window when min < 0. Kept for comparison runs.
    LiteralBounds,
}

/// GPEV compensation: remove the set mean, rescale by the trimmed range and
/// the iteration's range constant, and quantize onto the odd fixed-point
/// sublattice.
///
/// The arithmetic is one fused exact-rational operation per element:
///   dvd_c = odd_round( 16 * rc * (n*dvd - sum) / (n * range) )
/// so there is no intermediate rounding. Mean removal makes the result
/// invariant, bit for bit, to any constant shift of the inputs.
pub fn gpev_compensate(dvd: &DvdRaw, rc: u32, mode: RangeMode) -> Result<DvdCompensated> {
    assert!((128..=191).contains(&rc), "rc {rc} out of range");
    let n = dvd.0.len() as i128;
    assert!(n > 0);
    let sum: i128 = dvd.0.iter().map(|&v| v as i128).sum();
    let max = *dvd.0.iter().max().unwrap() as i128;
    let min = *dvd.0.iter().min().unwrap() as i128;
    // Range in twentieths of a count: TrimmedSpan gives 19*(max-min),
    // LiteralBounds gives 19*max - 21*min.
    let range20 = match mode {
        RangeMode::TrimmedSpan => 19 * (max - min),
        RangeMode::LiteralBounds => 19 * max - 21 * min,
    };
    if range20 < 20 {
        return Err(Error::DegenerateRange {
            span: range20 as f64 / 20.0,
        });
    }
    let scale = 16 * rc as i128 * 20;
    let den = n * range20;
    let out = dvd
        .0
        .iter()
        .map(|&v| {
            let num = scale * (n * v as i128 - sum);
            Fx4::from_raw(round_to_odd(num, den))
        })
        .collect();
    Ok(DvdCompensated(out))
}

/// Exact-rational reference for the unquantized compensated value, used by
/// oracle tests: returns (numerator, denominator) of dvd_c in soft units.
pub fn gpev_exact_rational(dvd: &[i32], rc: u32, mode: RangeMode, idx: usize) -> (i128, i128) {
    let n = dvd.len() as i128;
    let sum: i128 = dvd.iter().map(|&v| v as i128).sum();
    let max = *dvd.iter().max().unwrap() as i128;
    let min = *dvd.iter().min().unwrap() as i128;
    let range20 = match mode {
        RangeMode::TrimmedSpan => 19 * (max - min),
        RangeMode::LiteralBounds => 19 * max - 21 * min,
    };
    (20 * rc as i128 * (n * dvd[idx] as i128 - sum), n * range20)
}

/// One spread-factor pass: subtract the incoming spread factor, reduce by
/// whole trim codes into (-TCC/2, TCC/2], and on an odd reduction count
/// reflect the residue about zero and absorb the move into the spread
/// factor (wrapped into [-64, 64)).
pub fn sf_chain(dvd_c: &DvdCompensated, sf: &mut SfState, tcc: u32) -> DvdChained {
    assert!(
        (8..=22).contains(&tcc) && tcc.is_multiple_of(2),
        "tcc {tcc} invalid"
    );
    let t16 = (tcc as i64) * FRAC_ONE;
    let half = t16 / 2;
    let out = dvd_c
        .0
        .iter()
        .zip(sf.sf.iter_mut())
        .map(|(&c, sf_x)| {
            let v = (c - *sf_x).raw();
            // Residue in (-t16/2, t16/2]; k is the signed reduction count.
            let m = v.rem_euclid(t16);
            let r = if m > half { m - t16 } else { m };
            let k = (v - r) / t16;
            if k & 1 != 0 {
                // Reflect about zero within the interval. The boundary
                // residue +TCC/2 is its own reflection modulo the trim code
                // (-TCC/2 renormalizes back to +TCC/2), so its offset is 0.
                // Odd-lattice inputs never reach it; this keeps the function
                // total for arbitrary soft values.
                let out = if r == half { half } else { -r };
                // offset = out - r; the spread factor absorbs the move.
                *sf_x = wrap_pm64(Fx4::from_raw(sf_x.raw() + (out - r)));
                Fx4::from_raw(out)
            } else {
                Fx4::from_raw(r)
            }
        })
        .collect();
    DvdChained(out)
}

/// Squeezes one bit per residue: negative -> 0, positive -> 1, exact zero ->
/// the alternating toggle. The toggle persists across iterations.
pub fn bit_gen(dvd_cs: &DvdChained, zero_toggle: &mut u8, out: &mut BitBuf) {
    for &v in &dvd_cs.0 {
        let bit = match v.signum() {
            s if s < 0 => 0,
            s if s > 0 => 1,
            _ => {
                let b = *zero_toggle;
                *zero_toggle ^= 1;
                b
            }
        };
        out.push(bit);
    }
}

/// Fixed or nonce-randomized parameter policy for a sponge run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct ParamPolicy {
    /// None = randomize from the nonce; Some(v) = hold constant.
    pub fixed_rc: Option<u32>,
    pub fixed_tcc: Option<u32>,
}

impl ParamPolicy {
    pub fn resolve(&self, nonce: &NonceBuffer, iteration: usize) -> IterationParams {
        let derived = nonce.derive_params(iteration);
        IterationParams {
            rc: self.fixed_rc.unwrap_or(derived.rc),
            tcc: self.fixed_tcc.unwrap_or(derived.tcc),
        }
    }
}

/// Options for one sponge run.
#[derive(Clone, Copy, Debug)]
pub struct SpongeOptions {
    pub chaining_enabled: bool,
    pub params: ParamPolicy,
    pub range_mode: RangeMode,
    pub selector: SelectorConfig,
}

impl Default for SpongeOptions {
    fn default() -> Self {
        SpongeOptions {
            chaining_enabled: true,
            params: ParamPolicy::default(),
            range_mode: RangeMode::default(),
            selector: SelectorConfig::default(),
        }
    }
}

/// Per-run health counters and final state.
#[derive(Clone, Debug, Default)]
pub struct SpongeReport {
    pub iterations: usize,
    pub zero_outputs: u64,
    pub positive_outputs: u64,
    pub negative_outputs: u64,
}

/// Observer invoked once per iteration with that iteration's parameters and
/// chained residues; must not mutate sponge state.
pub trait TraceSink {
    fn record(&mut self, iteration: usize, params: IterationParams, dvd_cs: &DvdChained);

    /// Post-update spread-factor state; default ignores it.
    fn record_sf(&mut self, _iteration: usize, _sf: &SfState) {}
}

/// No-op sink.
pub struct NoTrace;

impl TraceSink for NoTrace {
    fn record(&mut self, _: usize, _: IterationParams, _: &DvdChained) {}
}

/// Collects every iteration's residues as f64 rows (for correlation scans).
#[derive(Default)]
pub struct CollectTrace {
    pub params: Vec<IterationParams>,
    pub rows: Vec<Vec<f64>>,
}

impl TraceSink for CollectTrace {
    fn record(&mut self, _iteration: usize, params: IterationParams, dvd_cs: &DvdChained) {
        self.params.push(params);
        self.rows
            .push(dvd_cs.0.iter().map(|v| v.to_f64()).collect());
    }
}

/// Runs the full 2048-iteration sponge loop over one timing record,
/// appending 2^22 bits to `out`.
pub fn sponge_run(
    timing: &TimingRecord,
    nonce: &NonceBuffer,
    opts: &SpongeOptions,
    out: &mut BitBuf,
    trace: &mut dyn TraceSink,
) -> Result<SpongeReport> {
    let mut sf = SfState::zeroed();
    let mut zero_toggle = 0u8;
    let mut report = SpongeReport::default();
    for iteration in 0..ITERATIONS_PER_RUN {
        let params = opts.params.resolve(nonce, iteration);
        let dvd = dv_diff_with(timing, iteration, opts.selector);
        let dvd_c = gpev_compensate(&dvd, params.rc, opts.range_mode)?;
        let dvd_cs = if opts.chaining_enabled {
            sf_chain(&dvd_c, &mut sf, params.tcc)
        } else {
            DvdChained(dvd_c.0.clone())
        };
        for &v in &dvd_cs.0 {
            match v.signum() {
                s if s < 0 => report.negative_outputs += 1,
                s if s > 0 => report.positive_outputs += 1,
                _ => report.zero_outputs += 1,
            }
        }
        bit_gen(&dvd_cs, &mut zero_toggle, out);
        trace.record(iteration, params, &dvd_cs);
        trace.record_sf(iteration, &sf);
        report.iterations += 1;
    }
    Ok(report)
}

/// 64-bin chi-square statistic for uniformity of the trim-normalized
/// residues, pooled over all iterations.
///
/// Residues live on the odd sixteenths of (-TCC/2, TCC/2], so each
/// iteration contributes 8*TCC equally likely lattice points; the expected
/// bin masses follow that lattice rather than a continuous uniform (bins do
/// not divide the lattice evenly for every trim code). 63 degrees of
/// freedom.
pub fn residue_uniformity_chi2(trace: &CollectTrace) -> f64 {
    const BINS: usize = 64;
    let mut observed = vec![0u64; BINS];
    let mut expected = vec![0f64; BINS];
    let clamp_bin = |b: isize| -> usize { b.clamp(0, BINS as isize - 1) as usize };
    for (row, params) in trace.rows.iter().zip(&trace.params) {
        let t16 = (params.tcc as i64) * FRAC_ONE;
        let half = t16 / 2;
        for &v in row {
            let u = v / params.tcc as f64;
            observed[clamp_bin(((u + 0.5) * BINS as f64).floor() as isize)] += 1;
        }
        let mass = row.len() as f64 / half as f64;
        let mut raw = -half + 1;
        while raw <= half {
            let u = raw as f64 / t16 as f64;
            expected[clamp_bin(((u + 0.5) * BINS as f64).floor() as isize)] += mass;
            raw += 2;
        }
    }
    observed
        .iter()
        .zip(&expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum()
}

/// Trace sink asserting the containment invariants on every iteration:
/// residues in (-TCC/2, TCC/2] and spread factors in [-64, 64).
#[derive(Default)]
pub struct ContainmentCheck {
    pub residue_violations: u64,
    pub sf_violations: u64,
    pub checked: u64,
}

impl TraceSink for ContainmentCheck {
    fn record(&mut self, _iteration: usize, params: IterationParams, dvd_cs: &DvdChained) {
        let half = (params.tcc as i64) * FRAC_ONE / 2;
        for v in &dvd_cs.0 {
            self.checked += 1;
            if !(v.raw() > -half && v.raw() <= half) {
                self.residue_violations += 1;
            }
        }
    }

    fn record_sf(&mut self, _iteration: usize, sf: &SfState) {
        for v in sf.values() {
            if !(-64 * FRAC_ONE..64 * FRAC_ONE).contains(&v.raw()) {
                self.sf_violations += 1;
            }
        }
    }
}

/// Binary trace record format: little-endian u32 iteration index, u32 rc,
/// u32 tcc, then 2048 little-endian i32 raw fixed-point residues.
pub mod trace_io {
    use super::*;
    use std::io::{Read, Write};

    pub struct TraceWriter<W: Write> {
        w: W,
    }

    impl<W: Write> TraceWriter<W> {
        pub fn new(w: W) -> Self {
            TraceWriter { w }
        }
    }

    impl<W: Write> TraceSink for TraceWriter<W> {
        fn record(&mut self, iteration: usize, params: IterationParams, dvd_cs: &DvdChained) {
            let mut buf = Vec::with_capacity(12 + 4 * dvd_cs.0.len());
            buf.extend_from_slice(&(iteration as u32).to_le_bytes());
            buf.extend_from_slice(&params.rc.to_le_bytes());
            buf.extend_from_slice(&params.tcc.to_le_bytes());
            for v in &dvd_cs.0 {
                buf.extend_from_slice(&(v.raw() as i32).to_le_bytes());
            }
            self.w.write_all(&buf).expect("trace write failed");
        }
    }

    /// Reads records written by [`TraceWriter`] until EOF.
    pub fn read_trace<R: Read>(mut r: R) -> std::io::Result<Vec<(u32, IterationParams, Vec<Fx4>)>> {
        let mut out = Vec::new();
        let mut head = [0u8; 12];
        loop {
            match r.read_exact(&mut head) {
                Ok(()) => {}
                Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => break,
                Err(e) => return Err(e),
            }
            let iteration = u32::from_le_bytes(head[0..4].try_into().unwrap());
            let rc = u32::from_le_bytes(head[4..8].try_into().unwrap());
            let tcc = u32::from_le_bytes(head[8..12].try_into().unwrap());
            let mut body = vec![0u8; 4 * SET_SIZE];
            r.read_exact(&mut body)?;
            let vals = body
                .chunks_exact(4)
                .map(|c| Fx4::from_raw(i32::from_le_bytes(c.try_into().unwrap()) as i64))
                .collect();
            out.push((iteration, IterationParams { rc, tcc }, vals));
        }
        Ok(out)
    }
}

/// Quantizes with plain half-away rounding; only used to document how the
/// odd-lattice quantizer relates to it in tests.
#[cfg(test)]
pub(crate) fn gpev_half_away_raw(num: i128, den: i128) -> i64 {
    crate::fixed::round_half_away(num, den)
}
