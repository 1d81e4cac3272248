// SPDX-License-Identifier: Apache-2.0

//! Nonce distillation and parameter derivation.
//!
//! The low-order bit of every path-delay measurement carries the dynamic
//! entropy; XOR-ing twelve consecutive low bits distills one full-entropy
//! nonce bit, giving 341 bits per 4096-measurement phase (the trailing four
//! low bits are discarded). The buffer feeds the challenge generator seed
//! (bits 0..64) and twenty 9-bit parameter slots (bits 64..244) that
//! randomize the range constant and trim code; one slot serves every 20th
//! iteration, so parameters repeat with period 20. Bits 244..341 are kept
//! for audit but not consumed.

use crate::bits::BitBuf;

pub const NONCE_BITS: usize = 341;
pub const DISTILL_GROUP: usize = 12;
pub const SEED_WINDOW: usize = 64;
pub const PARAM_SLOTS: usize = 20;
pub const PARAM_SLOT_BITS: usize = 9;
pub const PARAM_WINDOW_START: usize = SEED_WINDOW;
pub const PARAM_WINDOW_END: usize = SEED_WINDOW + PARAM_SLOTS * PARAM_SLOT_BITS;

/// The distilled 341-bit dynamic-entropy buffer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonceBuffer {
    bits: BitBuf,
}

/// Per-iteration randomized post-processing parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IterationParams {
    /// Range constant, 128..=191.
    pub rc: u32,
    /// Trim code constant, even, 8..=22.
    pub tcc: u32,
}

/// XORs each run of 12 consecutive measurement low bits into one nonce bit.
pub fn distill(lsb_stream: &BitBuf) -> NonceBuffer {
    assert_eq!(
        lsb_stream.len(),
        NONCE_BITS * DISTILL_GROUP + 4,
        "distillation expects exactly 4096 low bits"
    );
    let mut bits = BitBuf::with_capacity(NONCE_BITS);
    for k in 0..NONCE_BITS {
        let mut acc = 0u8;
        for j in 0..DISTILL_GROUP {
            acc ^= lsb_stream.get(k * DISTILL_GROUP + j);
        }
        bits.push(acc);
    }
    NonceBuffer { bits }
}

impl NonceBuffer {
    /// Rebuilds a buffer from raw bits (test and import paths).
    pub fn from_bits(bits: BitBuf) -> Self {
        assert_eq!(bits.len(), NONCE_BITS);
        NonceBuffer { bits }
    }

    pub fn bits(&self) -> &BitBuf {
        &self.bits
    }

    /// Bit `i` contributes 2^i within its window.
    fn window_value(&self, start: usize, width: usize) -> u64 {
        let mut v = 0u64;
        for i in 0..width {
            v |= (self.bits.get(start + i) as u64) << i;
        }
        v
    }

    /// Challenge-generator seed: bits [0, 64).
    pub fn derive_seed(&self) -> u64 {
        self.window_value(0, SEED_WINDOW)
    }

    /// Parameters for `iteration`: slot `iteration mod 20` holds six RC bits
    /// then three TCC bits.
    pub fn derive_params(&self, iteration: usize) -> IterationParams {
        let slot = iteration % PARAM_SLOTS;
        let base = PARAM_WINDOW_START + slot * PARAM_SLOT_BITS;
        let rc = 128 + self.window_value(base, 6) as u32;
        let tcc = 8 + 2 * self.window_value(base + 6, 3) as u32;
        IterationParams { rc, tcc }
    }

    pub fn to_hex(&self) -> String {
        self.bits
            .as_bytes()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
