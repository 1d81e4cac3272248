// SPDX-License-Identifier: Apache-2.0

//! AIS 20/31 statistical tests T0 through T8.
//!
//! Window layout over the input sequence is sequential and disjoint:
//!
//! | test  | bits used                          |
//! |-------|------------------------------------|
//! | T0    | 65536 x 48 = 3,145,728             |
//! | T1-T5 | 257 blocks x 20,000 = 5,140,000    |
//! | T6    | 100,000                            |
//! | T7    | 2 x 100,000                        |
//! | T8    | (2560 + 256,000) x 8 = 2,068,480   |
//!
//! for a total of 10,654,208 bits. T1-T5 thresholds are the classic
//! 20,000-bit block bounds; T6/T7/T8 use the published pass conditions
//! (0.025 / 0.020, 15.13, and an entropy floor of 7.976 bits per byte).

use crate::bits::BitBuf;
use serde::Serialize;

pub const T0_STRINGS: usize = 1 << 16;
pub const T0_STRING_BITS: usize = 48;
pub const BLOCK_BITS: usize = 20_000;
pub const PROCEDURE_A_BLOCKS: usize = 257;
pub const T6_BITS: usize = 100_000;
pub const T7_HALF_BITS: usize = 100_000;
pub const T8_BLOCK_BITS: usize = 8;
pub const T8_INIT_BLOCKS: usize = 2_560;
pub const T8_TEST_BLOCKS: usize = 256_000;

pub const T0_BITS: usize = T0_STRINGS * T0_STRING_BITS;
pub const PROCEDURE_A_BITS: usize = PROCEDURE_A_BLOCKS * BLOCK_BITS;
pub const T8_BITS: usize = (T8_INIT_BLOCKS + T8_TEST_BLOCKS) * T8_BLOCK_BITS;
pub const SUITE_BITS: usize = T0_BITS + PROCEDURE_A_BITS + T6_BITS + 2 * T7_HALF_BITS + T8_BITS;

pub const T1_LO: u32 = 9_654; // pass iff lo < ones < hi
pub const T1_HI: u32 = 10_346;
pub const T2_LO: f64 = 1.03;
pub const T2_HI: f64 = 57.4;
pub const T3_BOUNDS: [(u32, u32); 6] = [
    (2_267, 2_733),
    (1_079, 1_421),
    (502, 748),
    (223, 402),
    (90, 223),
    (90, 223),
];
pub const T4_MAX_RUN: u32 = 33; // a run of 34 or more fails
pub const T5_LO: u32 = 2_326;
pub const T5_HI: u32 = 2_674;
pub const T6A_BOUND: f64 = 0.025;
pub const T6B_BOUND: f64 = 0.020;
pub const T7_BOUND: f64 = 15.13;
pub const T8_FLOOR: f64 = 7.976;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VerdictStatus {
    Pass,
    Fail,
    InsufficientData,
}

/// One test's outcome: statistic value(s), the pass condition it was held
/// to, and the verdict.
#[derive(Clone, Debug, Serialize)]
pub struct TestVerdict {
    pub name: String,
    pub statistics: Vec<f64>,
    pub threshold: String,
    pub status: VerdictStatus,
}

impl TestVerdict {
    pub fn passed(&self) -> bool {
        self.status == VerdictStatus::Pass
    }

    fn insufficient(name: &str, needed: usize, got: usize) -> Self {
        TestVerdict {
            name: name.into(),
            statistics: vec![],
            threshold: format!("needs {needed} bits, got {got}"),
            status: VerdictStatus::InsufficientData,
        }
    }
}

fn status(pass: bool) -> VerdictStatus {
    if pass {
        VerdictStatus::Pass
    } else {
        VerdictStatus::Fail
    }
}

/// T0: the first 65536 non-overlapping 48-bit words are pairwise distinct.
pub fn t0_disjointness(bits: &[u8]) -> bool {
    assert!(bits.len() >= T0_BITS);
    let mut words: Vec<u64> = (0..T0_STRINGS)
        .map(|w| {
            let mut v = 0u64;
            for b in 0..T0_STRING_BITS {
                v = (v << 1) | bits[w * T0_STRING_BITS + b] as u64;
            }
            v
        })
        .collect();
    words.sort_unstable();
    words.windows(2).all(|w| w[0] != w[1])
}

/// T1: monobit count over one 20,000-bit block.
pub fn t1_monobit(block: &[u8]) -> (u32, bool) {
    assert_eq!(block.len(), BLOCK_BITS);
    let ones: u32 = block.iter().map(|&b| b as u32).sum();
    (ones, ones > T1_LO && ones < T1_HI)
}

/// T2: poker statistic over the block's 5000 nibbles.
pub fn t2_poker(block: &[u8]) -> (f64, bool) {
    assert_eq!(block.len(), BLOCK_BITS);
    let mut freq = [0u32; 16];
    for nib in block.chunks_exact(4) {
        let v = (nib[0] << 3) | (nib[1] << 2) | (nib[2] << 1) | nib[3];
        freq[v as usize] += 1;
    }
    let sum_sq: u64 = freq.iter().map(|&f| f as u64 * f as u64).sum();
    let x = 16.0 / 5_000.0 * sum_sq as f64 - 5_000.0;
    (x, x > T2_LO && x < T2_HI)
}

fn run_lengths(block: &[u8]) -> ([u32; 6], [u32; 6], u32) {
    // Bucketed run counts per symbol (lengths 1..=5 and 6+), plus the
    // longest run seen.
    let mut runs = [[0u32; 6]; 2];
    let mut longest = 0u32;
    let mut i = 0;
    while i < block.len() {
        let sym = block[i];
        let mut len = 1u32;
        while i + (len as usize) < block.len() && block[i + len as usize] == sym {
            len += 1;
        }
        let bucket = (len.min(6) - 1) as usize;
        runs[sym as usize][bucket] += 1;
        longest = longest.max(len);
        i += len as usize;
    }
    (runs[0], runs[1], longest)
}

/// T3: run-length table within bounds for both symbols.
pub fn t3_runs(block: &[u8]) -> ([u32; 6], [u32; 6], bool) {
    assert_eq!(block.len(), BLOCK_BITS);
    let (zero_runs, one_runs, _) = run_lengths(block);
    let ok = |runs: &[u32; 6]| {
        runs.iter()
            .zip(T3_BOUNDS.iter())
            .all(|(&n, &(lo, hi))| n >= lo && n <= hi)
    };
    let pass = ok(&zero_runs) && ok(&one_runs);
    (zero_runs, one_runs, pass)
}

/// T4: no run of 34 or more equal bits.
pub fn t4_long_run(block: &[u8]) -> (u32, bool) {
    assert_eq!(block.len(), BLOCK_BITS);
    let (_, _, longest) = run_lengths(block);
    (longest, longest <= T4_MAX_RUN)
}

/// Packs bits (one per byte) into u64 words, MSB-first, zero padded.
fn pack_words(bits: &[u8]) -> Vec<u64> {
    let mut words = vec![0u64; bits.len().div_ceil(64) + 1];
    for (i, &b) in bits.iter().enumerate() {
        if b != 0 {
            words[i / 64] |= 1u64 << (63 - i % 64);
        }
    }
    words
}

/// Reads the 64-bit window starting at bit `pos` from packed words.
#[inline]
fn word_at(words: &[u64], pos: usize) -> u64 {
    let idx = pos / 64;
    let sh = pos % 64;
    if sh == 0 {
        words[idx]
    } else {
        (words[idx] << sh) | (words[idx + 1] >> (64 - sh))
    }
}

/// Hamming distance between bit windows [a, a+len) and [b, b+len).
fn xor_count(words: &[u64], a: usize, b: usize, len: usize) -> u32 {
    let mut count = 0u32;
    let full = len / 64;
    for w in 0..full {
        count += (word_at(words, a + w * 64) ^ word_at(words, b + w * 64)).count_ones();
    }
    let rem = len % 64;
    if rem > 0 {
        let mask = !0u64 << (64 - rem);
        count +=
            ((word_at(words, a + full * 64) ^ word_at(words, b + full * 64)) & mask).count_ones();
    }
    count
}

/// T5: autocorrelation. The shift with the most extreme statistic on the
/// block's first half is re-tested on the second half.
pub fn t5_autocorrelation(block: &[u8]) -> (u32, u32, bool) {
    assert_eq!(block.len(), BLOCK_BITS);
    let words = pack_words(block);
    let mut best_tau = 1usize;
    let mut best_dev = 0u32;
    for tau in 1..=5_000usize {
        let z = xor_count(&words, 0, tau, 5_000);
        let dev = z.abs_diff(2_500);
        if dev > best_dev {
            best_dev = dev;
            best_tau = tau;
        }
    }
    let z = xor_count(&words, 10_000, 10_000 + best_tau, 5_000);
    (best_tau as u32, z, (T5_LO..=T5_HI).contains(&z))
}

/// T6: uniform distribution: the ones frequency and the conditional
/// successor frequencies after 0 and after 1.
pub fn t6_uniform(bits: &[u8]) -> (f64, f64, bool) {
    assert_eq!(bits.len(), T6_BITS);
    let ones: usize = bits.iter().map(|&b| b as usize).sum();
    let p1 = ones as f64 / bits.len() as f64;
    let mut n0 = 0u64;
    let mut n01 = 0u64;
    let mut n1 = 0u64;
    let mut n11 = 0u64;
    for w in bits.windows(2) {
        if w[0] == 0 {
            n0 += 1;
            n01 += w[1] as u64;
        } else {
            n1 += 1;
            n11 += w[1] as u64;
        }
    }
    let p01 = n01 as f64 / n0 as f64;
    let p11 = n11 as f64 / n1 as f64;
    let a = (p1 - 0.5).abs();
    let b = (p01 - p11).abs();
    (a, b, a < T6A_BOUND && b < T6B_BOUND)
}

/// 2x2 homogeneity chi-square for successor counts after `ctx` in two
/// disjoint samples.
fn context_chi2(half1: &[u8], half2: &[u8], ctx: &[u8]) -> f64 {
    let count = |bits: &[u8]| -> (f64, f64) {
        let mut c0 = 0u64;
        let mut c1 = 0u64;
        for w in bits.windows(ctx.len() + 1) {
            if &w[..ctx.len()] == ctx {
                if w[ctx.len()] == 0 {
                    c0 += 1;
                } else {
                    c1 += 1;
                }
            }
        }
        (c0 as f64, c1 as f64)
    };
    let (a0, a1) = count(half1);
    let (b0, b1) = count(half2);
    let n = a0 + a1 + b0 + b1;
    if n == 0.0 {
        return f64::INFINITY;
    }
    let mut chi = 0.0;
    for (row0, row1) in [(a0, a1), (b0, b1)] {
        let rowsum = row0 + row1;
        for (col, obs) in [(a0 + b0, row0), (a1 + b1, row1)] {
            let exp = rowsum * col / n;
            if exp > 0.0 {
                chi += (obs - exp) * (obs - exp) / exp;
            }
        }
    }
    chi
}

/// T7: homogeneity of the successor distributions after every 1-bit and
/// 2-bit context, compared across the two halves.
pub fn t7_homogeneity(half1: &[u8], half2: &[u8]) -> (Vec<f64>, bool) {
    assert_eq!(half1.len(), T7_HALF_BITS);
    assert_eq!(half2.len(), T7_HALF_BITS);
    let contexts: [&[u8]; 6] = [&[0], &[1], &[0, 0], &[0, 1], &[1, 0], &[1, 1]];
    let stats: Vec<f64> = contexts
        .iter()
        .map(|ctx| context_chi2(half1, half2, ctx))
        .collect();
    let pass = stats.iter().all(|&t| t < T7_BOUND);
    (stats, pass)
}

/// T8: Coron's entropy estimate over 8-bit blocks; 2560 initialization
/// blocks, 256,000 test blocks.
pub fn t8_entropy(bits: &[u8]) -> (f64, bool) {
    assert!(bits.len() >= T8_BITS);
    let total = T8_INIT_BLOCKS + T8_TEST_BLOCKS;
    // g(i) = (1/ln 2) * sum_{k=1}^{i-1} 1/k, tabulated incrementally.
    let inv_ln2 = std::f64::consts::LOG2_E;
    let mut g = vec![0.0f64; total + 1];
    for i in 2..=total {
        g[i] = g[i - 1] + 1.0 / (i - 1) as f64;
    }
    let mut last_seen = [0usize; 256]; // 0 = not seen yet (positions are 1-based)
    let mut acc = 0.0f64;
    for n in 1..=total {
        let base = (n - 1) * T8_BLOCK_BITS;
        let mut v = 0usize;
        for b in 0..T8_BLOCK_BITS {
            v = (v << 1) | bits[base + b] as usize;
        }
        if n > T8_INIT_BLOCKS {
            let dist = if last_seen[v] == 0 {
                n
            } else {
                n - last_seen[v]
            };
            acc += g[dist];
        }
        last_seen[v] = n;
    }
    let f = inv_ln2 * acc / T8_TEST_BLOCKS as f64;
    (f, f >= T8_FLOOR)
}

/// Runs the full suite with the documented window layout, producing nine
/// verdicts (T0 through T8). Windows that do not fit yield an explicit
/// insufficient-data verdict.
pub fn ais31_suite(seq: &BitBuf) -> Vec<TestVerdict> {
    let bits = seq.to_bit_bytes();
    let mut verdicts = Vec::with_capacity(9);
    let mut offset = 0usize;

    // T0
    if bits.len() >= T0_BITS {
        let pass = t0_disjointness(&bits[..T0_BITS]);
        verdicts.push(TestVerdict {
            name: "T0 disjointness".into(),
            statistics: vec![if pass { 1.0 } else { 0.0 }],
            threshold: "65536 48-bit words pairwise distinct".into(),
            status: status(pass),
        });
    } else {
        verdicts.push(TestVerdict::insufficient(
            "T0 disjointness",
            T0_BITS,
            bits.len(),
        ));
    }
    offset += T0_BITS;

    // T1-T5 over 257 disjoint blocks, evaluated in parallel.
    if bits.len() >= offset + PROCEDURE_A_BITS {
        use rayon::prelude::*;
        let passed = (0..PROCEDURE_A_BLOCKS)
            .into_par_iter()
            .map(|blk| {
                let block = &bits[offset + blk * BLOCK_BITS..offset + (blk + 1) * BLOCK_BITS];
                [
                    t1_monobit(block).1 as u32,
                    t2_poker(block).1 as u32,
                    t3_runs(block).2 as u32,
                    t4_long_run(block).1 as u32,
                    t5_autocorrelation(block).2 as u32,
                ]
            })
            .reduce(
                || [0u32; 5],
                |mut acc, row| {
                    for (a, r) in acc.iter_mut().zip(row) {
                        *a += r;
                    }
                    acc
                },
            );
        let names = [
            "T1 monobit",
            "T2 poker",
            "T3 runs",
            "T4 long run",
            "T5 autocorrelation",
        ];
        for (name, &ok) in names.iter().zip(passed.iter()) {
            verdicts.push(TestVerdict {
                name: (*name).into(),
                statistics: vec![ok as f64],
                threshold: format!("{PROCEDURE_A_BLOCKS}/{PROCEDURE_A_BLOCKS} blocks"),
                status: status(ok as usize == PROCEDURE_A_BLOCKS),
            });
        }
    } else {
        for name in [
            "T1 monobit",
            "T2 poker",
            "T3 runs",
            "T4 long run",
            "T5 autocorrelation",
        ] {
            verdicts.push(TestVerdict::insufficient(
                name,
                offset + PROCEDURE_A_BITS,
                bits.len(),
            ));
        }
    }
    offset += PROCEDURE_A_BITS;

    // T6
    if bits.len() >= offset + T6_BITS {
        let (a, b, pass) = t6_uniform(&bits[offset..offset + T6_BITS]);
        verdicts.push(TestVerdict {
            name: "T6 uniform distribution".into(),
            statistics: vec![a, b],
            threshold: format!("|P(1)-0.5| < {T6A_BOUND}, |P(01)-P(11)| < {T6B_BOUND}"),
            status: status(pass),
        });
    } else {
        verdicts.push(TestVerdict::insufficient(
            "T6 uniform distribution",
            offset + T6_BITS,
            bits.len(),
        ));
    }
    offset += T6_BITS;

    // T7
    if bits.len() >= offset + 2 * T7_HALF_BITS {
        let h1 = &bits[offset..offset + T7_HALF_BITS];
        let h2 = &bits[offset + T7_HALF_BITS..offset + 2 * T7_HALF_BITS];
        let (stats, pass) = t7_homogeneity(h1, h2);
        verdicts.push(TestVerdict {
            name: "T7 homogeneity".into(),
            statistics: stats,
            threshold: format!("all < {T7_BOUND}"),
            status: status(pass),
        });
    } else {
        verdicts.push(TestVerdict::insufficient(
            "T7 homogeneity",
            offset + 2 * T7_HALF_BITS,
            bits.len(),
        ));
    }
    offset += 2 * T7_HALF_BITS;

    // T8
    if bits.len() >= offset + T8_BITS {
        let (h, pass) = t8_entropy(&bits[offset..offset + T8_BITS]);
        verdicts.push(TestVerdict {
            name: "T8 entropy".into(),
            statistics: vec![h],
            threshold: format!(">= {T8_FLOOR}"),
            status: status(pass),
        });
    } else {
        verdicts.push(TestVerdict::insufficient(
            "T8 entropy",
            offset + T8_BITS,
            bits.len(),
        ));
    }

    verdicts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Xoshiro256;

    fn random_bits(n: usize, seed: u64) -> Vec<u8> {
        let mut rng = Xoshiro256::new(seed);
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let w = rng.next_u64();
            for b in 0..64 {
                if out.len() == n {
                    break;
                }
                out.push(((w >> b) & 1) as u8);
            }
        }
        out
    }

    /// Builds a 20,000-bit block with exactly `ones` ones, spread so that no
    /// pathological runs appear.
    fn block_with_ones(ones: u32) -> Vec<u8> {
        let mut block = random_bits(BLOCK_BITS, 99);
        let current: u32 = block.iter().map(|&b| b as u32).sum();
        let mut delta = ones as i64 - current as i64;
        let mut idx = 0usize;
        while delta != 0 {
            if delta > 0 && block[idx] == 0 {
                block[idx] = 1;
                delta -= 1;
            } else if delta < 0 && block[idx] == 1 {
                block[idx] = 0;
                delta += 1;
            }
            idx = (idx + 7) % BLOCK_BITS;
        }
        block
    }

    #[test]
    fn t1_boundaries_exact() {
        assert!(!t1_monobit(&block_with_ones(9_654)).1);
        assert!(t1_monobit(&block_with_ones(9_655)).1);
        assert!(t1_monobit(&block_with_ones(10_345)).1);
        assert!(!t1_monobit(&block_with_ones(10_346)).1);
    }

    #[test]
    fn t1_all_zero_block_fails() {
        let (ones, pass) = t1_monobit(&vec![0u8; BLOCK_BITS]);
        assert_eq!(ones, 0);
        assert!(!pass);
    }

    #[test]
    fn t2_uniform_nibbles_hit_statistic_floor() {
        // 5000 nibbles as even as possible (312 or 313 each):
        // X = 16/5000 * (8*312^2 + 8*313^2) - 5000 = 0.0128, which fails
        // the lower bound (too uniform), exactly as hand-computed.
        let mut block = Vec::with_capacity(BLOCK_BITS);
        for i in 0..5_000u32 {
            let v = (i % 16) as u8;
            block.extend_from_slice(&[(v >> 3) & 1, (v >> 2) & 1, (v >> 1) & 1, v & 1]);
        }
        let (x, pass) = t2_poker(&block);
        let expect = 16.0 / 5000.0 * (8.0 * 312.0 * 312.0 + 8.0 * 313.0 * 313.0) - 5000.0;
        assert!((x - expect).abs() < 1e-9);
        assert!(!pass, "perfectly uniform poker statistic must fail low");
    }

    #[test]
    fn t2_random_block_passes() {
        assert!(t2_poker(&random_bits(BLOCK_BITS, 3)).1);
    }

    #[test]
    fn t3_t4_random_block_passes() {
        let block = random_bits(BLOCK_BITS, 4);
        assert!(t3_runs(&block).2);
        assert!(t4_long_run(&block).1);
    }

    #[test]
    fn t4_boundary_run_lengths() {
        let mut block = random_bits(BLOCK_BITS, 5);
        // Embed a 33-run: still passes.
        for i in 0..33 {
            block[4_000 + i] = 1;
        }
        block[3_999] = 0;
        block[4_033] = 0;
        assert!(t4_long_run(&block).1);
        // Extend to 34: fails.
        block[4_033] = 1;
        block[4_034] = 0;
        assert!(!t4_long_run(&block).1);
    }

    #[test]
    fn t3_alternating_block_fails() {
        let block: Vec<u8> = (0..BLOCK_BITS).map(|i| (i % 2) as u8).collect();
        // All runs have length 1 (10,000 runs per symbol), far past bounds.
        let (z, o, pass) = t3_runs(&block);
        assert_eq!(z[0], 10_000);
        assert_eq!(o[0], 10_000);
        assert!(!pass);
    }

    #[test]
    fn t5_random_block_passes_and_alternating_fails() {
        assert!(t5_autocorrelation(&random_bits(BLOCK_BITS, 6)).2);
        let block: Vec<u8> = (0..BLOCK_BITS).map(|i| (i % 2) as u8).collect();
        // Any odd shift gives Z = 5000, even shifts Z = 0; both saturate.
        assert!(!t5_autocorrelation(&block).2);
    }

    #[test]
    fn t5_boundary_statistic() {
        // First half forces tau = 1 (alternating => Z_1 = 5000 extreme);
        // second half built so the lag-1 XOR count hits an exact target.
        let build = |target: u32| -> Vec<u8> {
            let mut block: Vec<u8> = (0..10_000).map(|i| (i % 2) as u8).collect();
            let mut second = vec![0u8; 10_000];
            let mut bit = 0u8;
            let mut transitions = 0u32;
            for (i, slot) in second.iter_mut().enumerate().take(5_001) {
                if transitions < target && i > 0 {
                    bit ^= 1;
                    transitions += 1;
                }
                *slot = bit;
            }
            assert_eq!(transitions, target);
            block.extend_from_slice(&second);
            block
        };
        let (tau, z, pass) = t5_autocorrelation(&build(2_326));
        assert_eq!((tau, z, pass), (1, 2_326, true));
        let (tau, z, pass) = t5_autocorrelation(&build(2_325));
        assert_eq!((tau, z, pass), (1, 2_325, false));
        let (tau, z, pass) = t5_autocorrelation(&build(2_674));
        assert_eq!((tau, z, pass), (1, 2_674, true));
        let (tau, z, pass) = t5_autocorrelation(&build(2_675));
        assert_eq!((tau, z, pass), (1, 2_675, false));
    }

    #[test]
    fn t0_detects_duplicates() {
        let bits = random_bits(T0_BITS, 8);
        assert!(t0_disjointness(&bits));
        let mut dup = bits;
        // Copy word 0 onto word 17.
        for b in 0..T0_STRING_BITS {
            dup[17 * T0_STRING_BITS + b] = dup[b];
        }
        assert!(!t0_disjointness(&dup));
    }

    #[test]
    fn t6_balanced_random_passes() {
        let (a, b, pass) = t6_uniform(&random_bits(T6_BITS, 9));
        assert!(pass, "stats {a} {b}");
    }

    #[test]
    fn t6_biased_fails() {
        let bits: Vec<u8> = random_bits(T6_BITS, 10)
            .into_iter()
            .enumerate()
            .map(|(i, b)| if i % 10 < 3 { 1 } else { b })
            .collect();
        let (a, _, pass) = t6_uniform(&bits);
        assert!(a >= T6A_BOUND || !pass);
        assert!(!pass);
    }

    #[test]
    fn t7_homogeneous_halves_pass() {
        let h1 = random_bits(T7_HALF_BITS, 11);
        let h2 = random_bits(T7_HALF_BITS, 12);
        let (stats, pass) = t7_homogeneity(&h1, &h2);
        assert!(pass, "stats {stats:?}");
    }

    #[test]
    fn t7_heterogeneous_halves_fail() {
        let h1 = random_bits(T7_HALF_BITS, 13);
        // Second half biased after context 1.
        let mut h2 = random_bits(T7_HALF_BITS, 14);
        for i in 1..h2.len() {
            if h2[i - 1] == 1 && i % 3 != 0 {
                h2[i] = 1;
            }
        }
        let (_, pass) = t7_homogeneity(&h1, &h2);
        assert!(!pass);
    }

    #[test]
    fn t8_random_near_eight_constant_fails() {
        let bits = random_bits(T8_BITS, 15);
        let (h, pass) = t8_entropy(&bits);
        assert!(pass, "entropy {h}");
        assert!((h - 8.0).abs() < 0.05, "entropy {h} not near 8");
        let zeros = vec![0u8; T8_BITS];
        let (h0, pass0) = t8_entropy(&zeros);
        assert!(!pass0);
        assert!(h0 < 0.1);
    }

    #[test]
    fn suite_reports_insufficient_data() {
        let seq: BitBuf = (0..1000).map(|i| (i % 2) as u8).collect();
        let verdicts = ais31_suite(&seq);
        assert_eq!(verdicts.len(), 9);
        assert!(verdicts
            .iter()
            .all(|v| v.status == VerdictStatus::InsufficientData));
    }
}
