// SPDX-License-Identifier: Apache-2.0

//! Embedded certification suite: AIS 20/31 procedure tests, the SP 800-90B
//! IID permutation tests and min-entropy estimators, and the Pearson
//! correlation scan over sponge residue sets.

pub mod ais31;
pub mod estimators;
pub mod iid;
pub mod pearson;

pub use ais31::{ais31_suite, TestVerdict, VerdictStatus};
pub use estimators::{
    collision_estimate, compression_estimate, estimate_all, markov_estimate, mcv_estimate,
    EstimatorSet,
};
pub use iid::{iid_permutation_suite, IidReport};
pub use pearson::{default_sampling, pcc_scan, pearson, PairSampling, PccReport};

/// Simple monobit z-test at significance alpha = 0.01: |2*ones - n| must
/// not exceed 2.5758 * sqrt(n).
pub fn monobit_passes(bits: &[u8]) -> (f64, bool) {
    let n = bits.len() as f64;
    let ones: u64 = bits.iter().map(|&b| b as u64).sum();
    let z = (2.0 * ones as f64 - n).abs() / n.sqrt();
    (z, z <= 2.5758)
}

/// 4-bit poker chi-square at alpha = 0.01 (15 degrees of freedom,
/// critical value 30.578).
pub fn poker_passes(bits: &[u8]) -> (f64, bool) {
    let m = bits.len() / 4;
    assert!(m >= 80, "poker test needs at least 320 bits");
    let mut freq = [0u64; 16];
    for nib in bits.chunks_exact(4) {
        let v = (nib[0] << 3) | (nib[1] << 2) | (nib[2] << 1) | nib[3];
        freq[v as usize] += 1;
    }
    let sum_sq: u64 = freq.iter().map(|&f| f * f).sum();
    let x = 16.0 / m as f64 * sum_sq as f64 - m as f64;
    (x, x <= 30.578)
}
