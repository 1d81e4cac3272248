// SPDX-License-Identifier: Apache-2.0

//! Deterministic pseudo-random streams used by the simulation and the test
//! machinery (device fingerprints, measurement noise, permutation shuffles,
//! pair subsampling).
//!
//! The generators are self-contained so that a given seed produces the same
//! byte stream on every build. Nothing here is cryptographic; the TRNG's
//! randomness comes from the modeled measurement noise, not from these.

/// SplitMix64 step, used for seed expansion.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// xoshiro256++ with SplitMix64 seed expansion.
#[derive(Clone, Debug)]
pub struct Xoshiro256 {
    s: [u64; 4],
}

impl Xoshiro256 {
    pub fn new(seed: u64) -> Self {
        let mut sm = seed;
        let mut s = [0u64; 4];
        for slot in &mut s {
            *slot = splitmix64(&mut sm);
        }
        // SplitMix64 never yields four zero words for any seed, but the
        // generator must not start from the all-zero state regardless.
        if s == [0; 4] {
            s[0] = 1;
        }
        Self { s }
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[0].wrapping_add(s[3]).rotate_left(23).wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform in (0, 1]: 53 mantissa bits, never exactly zero.
    pub fn next_unit_open(&mut self) -> f64 {
        (((self.next_u64() >> 11) + 1) as f64) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Uniform in [0, 1).
    pub fn next_unit(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Uniform integer in [0, n) by rejection, bias-free.
    pub fn next_below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        let zone = u64::MAX - (u64::MAX - n + 1) % n;
        loop {
            let v = self.next_u64();
            if v <= zone {
                return v % n;
            }
        }
    }
}

/// Zero-mean unit-variance Gaussian stream (Box-Muller, spare cached).
#[derive(Clone, Debug)]
pub struct GaussianStream {
    rng: Xoshiro256,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: Xoshiro256::new(seed),
            spare: None,
        }
    }

    pub fn sample(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.rng.next_unit_open();
        let u2 = self.rng.next_unit();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

/// In-place Fisher-Yates shuffle driven by an explicit generator.
pub fn fisher_yates<T>(rng: &mut Xoshiro256, data: &mut [T]) {
    let n = data.len();
    if n < 2 {
        return;
    }
    for i in (1..n).rev() {
        let j = rng.next_below(i as u64 + 1) as usize;
        data.swap(i, j);
    }
}
