// SPDX-License-Identifier: Apache-2.0

//! SP 800-90B IID permutation testing.
//!
//! Eleven test statistics are computed on the original bit sequence and on
//! seeded Fisher-Yates permutations of it. For each statistic, C0 counts
//! permutations with a strictly smaller statistic and C1 counts ties; the
//! statistic fails if C0 + C1 <= 0.0005 * permutations or
//! C0 >= 0.9995 * permutations.
//!
//! Binary inputs are converted per statistic: directional and lag statistics
//! run on 8-bit block popcounts (conversion I), the collision statistics on
//! 8-bit block values (conversion II), the median-run statistics and the
//! excursion on the raw bits. Permutations shuffle the raw bits; conversions
//! are re-applied per permutation. The compression statistic is the DEFLATE
//! length of the space-separated ASCII encoding.
//!
//! Periodicity and covariance are evaluated at lags {1, 2, 8, 16, 32}; the
//! named verdict aggregates the five lags and reports the lag with the
//! smallest pass margin.

use crate::rng::{fisher_yates, Xoshiro256};
use flate2::write::DeflateEncoder;
use flate2::Compression;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;

pub const STATISTIC_NAMES: [&str; 11] = [
    "excursion",
    "num_directional_runs",
    "len_directional_runs",
    "num_increases_decreases",
    "num_runs_median",
    "len_runs_median",
    "avg_collision",
    "max_collision",
    "periodicity",
    "covariance",
    "compression",
];

pub const LAGS: [usize; 5] = [1, 2, 8, 16, 32];
/// Raw statistic vector width: single-valued stats plus 5 lags each for
/// periodicity and covariance.
const RAW_STATS: usize = 9 + 2 * 5;

#[derive(Clone, Debug, Serialize)]
pub struct IidCounter {
    pub name: String,
    pub c0: u32,
    pub c1: u32,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IidReport {
    pub permutations: u32,
    pub counters: Vec<IidCounter>,
    pub all_pass: bool,
}

/// Per-statistic raw values; order documented in `raw_index`.
fn raw_index(stat: usize, lag_idx: usize) -> usize {
    match stat {
        0..=7 => stat,
        8 => 8 + lag_idx,              // periodicity lags
        9 => 8 + LAGS.len() + lag_idx, // covariance lags
        10 => 8 + 2 * LAGS.len(),
        _ => unreachable!(),
    }
}

/// Conversion I: popcounts of non-overlapping 8-bit blocks.
fn conversion_one(bits: &[u8]) -> Vec<u8> {
    bits.chunks_exact(8).map(|c| c.iter().sum::<u8>()).collect()
}

/// Conversion II: values of non-overlapping 8-bit blocks.
fn conversion_two(bits: &[u8]) -> Vec<u8> {
    bits.chunks_exact(8)
        .map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | b))
        .collect()
}

fn excursion(bits: &[u8]) -> f64 {
    let n = bits.len() as f64;
    let ones: u64 = bits.iter().map(|&b| b as u64).sum();
    let mean = ones as f64 / n;
    let mut running = 0.0f64;
    let mut max_dev = 0.0f64;
    for &b in bits {
        running += b as f64 - mean;
        max_dev = max_dev.max(running.abs());
    }
    max_dev
}

/// Directional runs over a sample sequence: sign of successive differences
/// (ties count as "up").
fn directional_stats(samples: &[u8]) -> (f64, f64, f64) {
    let mut runs = 1u64;
    let mut longest = 0u64;
    let mut current = 1u64;
    let mut ups = 0u64;
    let mut downs = 0u64;
    let mut prev_dir = None;
    for w in samples.windows(2) {
        let dir = w[1] >= w[0];
        if dir {
            ups += 1;
        } else {
            downs += 1;
        }
        match prev_dir {
            Some(p) if p == dir => current += 1,
            Some(_) => {
                runs += 1;
                longest = longest.max(current);
                current = 1;
            }
            None => {}
        }
        prev_dir = Some(dir);
    }
    longest = longest.max(current);
    (runs as f64, longest as f64, ups.max(downs) as f64)
}

/// Runs with respect to the (binary) median 0.5: runs of equal bits.
fn median_run_stats(bits: &[u8]) -> (f64, f64) {
    let mut runs = 1u64;
    let mut longest = 1u64;
    let mut current = 1u64;
    for w in bits.windows(2) {
        if w[0] == w[1] {
            current += 1;
        } else {
            runs += 1;
            longest = longest.max(current);
            current = 1;
        }
    }
    longest = longest.max(current);
    (runs as f64, longest as f64)
}

/// Average and maximum collision distances over 8-bit symbols.
fn collision_stats(symbols: &[u8]) -> (f64, f64) {
    let mut seen = [false; 256];
    let mut lens = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;
    while i < symbols.len() {
        let s = symbols[i] as usize;
        if seen[s] {
            lens.push((i - start + 1) as u64);
            seen = [false; 256];
            start = i + 1;
        } else {
            seen[s] = true;
        }
        i += 1;
    }
    if lens.is_empty() {
        return (0.0, 0.0);
    }
    let sum: u64 = lens.iter().sum();
    let max = *lens.iter().max().unwrap();
    (sum as f64 / lens.len() as f64, max as f64)
}

fn periodicity(samples: &[u8], lag: usize) -> f64 {
    if samples.len() <= lag {
        return 0.0;
    }
    (0..samples.len() - lag)
        .filter(|&i| samples[i] == samples[i + lag])
        .count() as f64
}

fn covariance(samples: &[u8], lag: usize) -> f64 {
    if samples.len() <= lag {
        return 0.0;
    }
    (0..samples.len() - lag)
        .map(|i| samples[i] as u64 * samples[i + lag] as u64)
        .sum::<u64>() as f64
}

/// DEFLATE length of the space-separated ASCII bit encoding.
fn compression_len(bits: &[u8]) -> f64 {
    let mut text = Vec::with_capacity(bits.len() * 2);
    for &b in bits {
        text.push(b'0' + b);
        text.push(b' ');
    }
    let mut enc = DeflateEncoder::new(Vec::new(), Compression::fast());
    enc.write_all(&text).expect("in-memory deflate");
    enc.finish().expect("in-memory deflate").len() as f64
}

/// All raw statistics for one bit sequence.
fn compute_raw(bits: &[u8]) -> [f64; RAW_STATS] {
    let conv1 = conversion_one(bits);
    let conv2 = conversion_two(bits);
    let mut out = [0.0f64; RAW_STATS];
    out[0] = excursion(bits);
    let (ndr, ldr, incdec) = directional_stats(&conv1);
    out[1] = ndr;
    out[2] = ldr;
    out[3] = incdec;
    let (nrm, lrm) = median_run_stats(bits);
    out[4] = nrm;
    out[5] = lrm;
    let (avg_c, max_c) = collision_stats(&conv2);
    out[6] = avg_c;
    out[7] = max_c;
    for (li, &lag) in LAGS.iter().enumerate() {
        out[raw_index(8, li)] = periodicity(&conv1, lag);
        out[raw_index(9, li)] = covariance(&conv1, lag);
    }
    out[raw_index(10, 0)] = compression_len(bits);
    out
}

/// Runs the permutation suite. `permutations` of at least 100 are required;
/// the counter thresholds scale with the permutation count.
pub fn iid_permutation_suite(bits: &[u8], permutations: u32, seed: u64) -> IidReport {
    assert!(permutations >= 100, "need at least 100 permutations");
    let original = compute_raw(bits);

    let counts: Vec<[u32; 2]> = (0..permutations)
        .into_par_iter()
        .map(|p| {
            // Independent, seeded substream per permutation index.
            let mut rng =
                Xoshiro256::new(seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(p as u64 + 1)));
            let mut shuffled = bits.to_vec();
            fisher_yates(&mut rng, &mut shuffled);
            let stats = compute_raw(&shuffled);
            let mut row = [[0u32; 2]; RAW_STATS];
            for i in 0..RAW_STATS {
                if stats[i] < original[i] {
                    row[i][0] = 1;
                } else if stats[i] == original[i] {
                    row[i][1] = 1;
                }
            }
            row
        })
        .reduce(
            || [[0u32; 2]; RAW_STATS],
            |mut acc, row| {
                for (a, r) in acc.iter_mut().zip(row) {
                    a[0] += r[0];
                    a[1] += r[1];
                }
                acc
            },
        )
        .to_vec();

    let lo = (permutations as f64 * 0.0005).floor() as u32;
    let hi = (permutations as f64 * 0.9995).ceil() as u32;
    let verdict = |c0: u32, c1: u32| -> bool { c0 + c1 > lo && c0 < hi };

    let mut counters = Vec::with_capacity(11);
    for (si, name) in STATISTIC_NAMES.iter().enumerate() {
        let (c0, c1, pass) = if si == 8 || si == 9 {
            // Aggregate the five lags; report the worst-margin lag.
            let mut worst: Option<(u32, u32, bool, i64)> = None;
            for li in 0..LAGS.len() {
                let [c0, c1] = counts[raw_index(si, li)];
                let pass = verdict(c0, c1);
                // Margin: distance from the nearer failure boundary.
                let margin = ((c0 + c1).saturating_sub(lo) as i64).min(hi as i64 - c0 as i64);
                if worst.is_none_or(|w| margin < w.3) {
                    worst = Some((c0, c1, pass, margin));
                }
            }
            let w = worst.unwrap();
            let all_pass = (0..LAGS.len()).all(|li| {
                let [c0, c1] = counts[raw_index(si, li)];
                verdict(c0, c1)
            });
            (w.0, w.1, all_pass)
        } else {
            let [c0, c1] = counts[raw_index(si, 0)];
            (c0, c1, verdict(c0, c1))
        };
        counters.push(IidCounter {
            name: (*name).into(),
            c0,
            c1,
            pass,
        });
    }
    let all_pass = counters.iter().all(|c| c.pass);
    IidReport {
        permutations,
        counters,
        all_pass,
    }
}
