// SPDX-License-Identifier: Apache-2.0

//! Pseudo-random sequencing machinery: the 64-bit challenge-generation LFSR,
//! the per-phase challenge schedule, and the dual 11-bit selectors that drive
//! the pairwise differencing.
//!
//! The 64-bit generator uses the maximal-length Fibonacci tap set
//! {64, 63, 61, 60}. The 11-bit selectors use the primitive trinomial
//! x^11 + x^2 + 1 extended to a de Bruijn counter: the feedback bit is
//! inverted when the low ten bits are zero, which splices the all-zero state
//! into the cycle. That makes the cycle length exactly 2048, so seed 0 is a
//! legal starting state and one cycle visits every index once.

pub const CHALLENGES_PER_PHASE: usize = 128;
pub const PATHS_PER_CHALLENGE: usize = 32;
/// Elements per differencing set, and the selector cycle length.
pub const SET_SIZE: usize = 2048;

/// One 64-bit challenge word. Bit 0 selects rising/falling propagation; the
/// following 7-bit fields select one segment per stage.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Challenge {
    pub word: u64,
}

impl Challenge {
    /// Edge polarity: 0 = rising, 1 = falling.
    pub fn polarity(self) -> usize {
        (self.word & 1) as usize
    }

    /// Segment selector field for `stage` (7 bits starting at bit 1).
    pub fn stage_field(self, stage: usize) -> u64 {
        (self.word >> (1 + 7 * stage)) & 0x7f
    }
}

/// Feedback tap mask of the challenge generator: taps 64, 63, 61, 60
/// (1-indexed), a standard maximal-length set.
pub const LFSR64_TAPS: u64 = (1 << 63) | (1 << 62) | (1 << 60) | (1 << 59);

/// Maximal-length 64-bit Fibonacci LFSR. The tap mask is overridable for
/// experimentation; only the default is validated as maximal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lfsr64 {
    state: u64,
    taps: u64,
}

impl Lfsr64 {
    /// Seeds the register. Zero is the lock-up state of an XOR LFSR, so a
    /// zero seed maps to 1 (the same state the boot-strap phase uses).
    pub fn seed(seed: u64) -> Self {
        Self::with_taps(seed, LFSR64_TAPS)
    }

    /// The tap mask must include bit 63 so the shifted-out bit feeds back
    /// (otherwise the step is not invertible).
    pub fn with_taps(seed: u64, taps: u64) -> Self {
        assert!(taps & (1 << 63) != 0, "tap mask must include bit 63");
        Lfsr64 {
            state: if seed == 0 { 1 } else { seed },
            taps,
        }
    }

    pub fn state(self) -> u64 {
        self.state
    }

    /// One shift; the feedback bit is the tap parity.
    pub fn step(&mut self) -> u64 {
        let s = self.state;
        let fb = (s & self.taps).count_ones() as u64 & 1;
        self.state = (s << 1) | fb;
        self.state
    }

    /// Next challenge word: the state after one full 64-shift refresh, so
    /// successive words do not overlap bitwise.
    pub fn next_word(&mut self) -> u64 {
        for _ in 0..64 {
            self.step();
        }
        self.state
    }
}

/// Generates the per-phase schedule of 128 challenges and returns the
/// advanced generator state.
pub fn challenge_schedule(lfsr: &mut Lfsr64) -> Vec<Challenge> {
    (0..CHALLENGES_PER_PHASE)
        .map(|_| Challenge {
            word: lfsr.next_word(),
        })
        .collect()
}

/// Tap mask of the 11-bit selectors: taps 11 and 2 (the primitive
/// trinomial x^11 + x^2 + 1).
pub const SELECTOR_TAPS: u16 = (1 << 10) | (1 << 1);

/// Selector behavior, overridable for experimentation. The default is the
/// validated de Bruijn counter; without the extension the period drops to
/// 2047 and state 0 locks up, as for a plain LFSR.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SelectorConfig {
    pub taps: u16,
    pub de_bruijn: bool,
}

impl Default for SelectorConfig {
    fn default() -> Self {
        SelectorConfig {
            taps: SELECTOR_TAPS,
            de_bruijn: true,
        }
    }
}

impl SelectorConfig {
    pub fn validate(&self) -> crate::error::Result<()> {
        if self.taps & (1 << 10) == 0 || self.taps & !0x7ff != 0 {
            return Err(crate::error::Error::InvalidConfig(format!(
                "selector taps {:#x} must be an 11-bit mask including bit 10",
                self.taps
            )));
        }
        Ok(())
    }
}

/// 11-bit selector: primitive trinomial x^11 + x^2 + 1, de Bruijn extended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Selector11 {
    state: u16,
    config: SelectorConfig,
}

impl Selector11 {
    const MASK: u16 = 0x7ff;

    /// Any value in [0, 2047] is a valid state, including 0.
    pub fn seed(seed: u16) -> Self {
        Self::with_config(seed, SelectorConfig::default())
    }

    pub fn with_config(seed: u16, config: SelectorConfig) -> Self {
        Selector11 {
            state: seed & Self::MASK,
            config,
        }
    }

    pub fn state(self) -> u16 {
        self.state
    }

    pub fn step(&mut self) -> u16 {
        let s = self.state;
        let mut fb = (s & self.config.taps).count_ones() as u16 & 1;
        // De Bruijn extension: invert the feedback when the ten bits that
        // survive the shift are all zero, splicing state 0 into the cycle.
        if self.config.de_bruijn && s & 0x3ff == 0 {
            fb ^= 1;
        }
        self.state = ((s << 1) | fb) & Self::MASK;
        self.state
    }
}

/// Selector seeds for one sponge iteration: the first selector counts up
/// from 0 while the second counts down from 2047.
pub fn pair_seeds(iteration: usize) -> (u16, u16) {
    assert!(iteration < SET_SIZE, "iteration {iteration} out of range");
    (iteration as u16, (SET_SIZE - 1 - iteration) as u16)
}

/// Runs the two selectors in lockstep for one full cycle and returns the
/// 2048 index pairs. Each component visits every index exactly once.
pub fn select_indices(seed_a: u16, seed_b: u16) -> Vec<(u16, u16)> {
    select_indices_with(seed_a, seed_b, SelectorConfig::default())
}

/// [`select_indices`] with an explicit selector configuration.
pub fn select_indices_with(seed_a: u16, seed_b: u16, config: SelectorConfig) -> Vec<(u16, u16)> {
    let mut a = Selector11::with_config(seed_a, config);
    let mut b = Selector11::with_config(seed_b, config);
    let mut out = Vec::with_capacity(SET_SIZE);
    for _ in 0..SET_SIZE {
        out.push((a.state(), b.state()));
        a.step();
        b.step();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lfsr64_seed_rules() {
        assert_eq!(Lfsr64::seed(1).state(), 1);
        assert_eq!(Lfsr64::seed(0).state(), 1);
        assert_eq!(Lfsr64::seed(0xdead).state(), 0xdead);
    }

    #[test]
    fn lfsr64_no_short_cycle() {
        // Spot check of the maximal-length claim: no state repeat in 10^6
        // steps from the boot-strap seed.
        let mut l = Lfsr64::seed(1);
        let start = l.state();
        for _ in 0..1_000_000u32 {
            l.step();
            assert_ne!(l.state(), 0, "lock-up state reached");
            assert_ne!(l.state(), start, "premature cycle");
        }
    }

    #[test]
    fn schedule_is_deterministic() {
        let mut a = Lfsr64::seed(7);
        let mut b = Lfsr64::seed(7);
        assert_eq!(challenge_schedule(&mut a), challenge_schedule(&mut b));
    }

    #[test]
    fn schedule_has_no_duplicates() {
        let mut l = Lfsr64::seed(1);
        let sched = challenge_schedule(&mut l);
        let mut words: Vec<u64> = sched.iter().map(|c| c.word).collect();
        words.sort_unstable();
        words.dedup();
        assert_eq!(words.len(), CHALLENGES_PER_PHASE);
    }

    #[test]
    fn schedules_from_nearby_seeds_differ() {
        let mut l1 = Lfsr64::seed(1);
        let mut l2 = Lfsr64::seed(2);
        let s1 = challenge_schedule(&mut l1);
        let s2 = challenge_schedule(&mut l2);
        let differing = s1.iter().zip(&s2).filter(|(a, b)| a != b).count();
        assert!(differing >= 120, "only {differing} of 128 words differ");
    }

    #[test]
    fn selector_cycle_is_de_bruijn() {
        // One cycle from any seed visits all 2048 states exactly once and
        // returns to the seed.
        for seed in [0u16, 1, 2, 1024, 2047] {
            let mut sel = Selector11::seed(seed);
            let mut seen = vec![false; SET_SIZE];
            for _ in 0..SET_SIZE {
                let s = sel.state() as usize;
                assert!(!seen[s], "state {s} revisited within a cycle");
                seen[s] = true;
                sel.step();
            }
            assert_eq!(sel.state(), seed, "cycle length is not 2048");
            assert!(seen.iter().all(|&v| v));
        }
    }

    #[test]
    fn pair_seeds_quoted_assignments() {
        assert_eq!(pair_seeds(0), (0, 2047));
        assert_eq!(pair_seeds(1), (1, 2046));
        assert_eq!(pair_seeds(2047), (2047, 0));
    }

    #[test]
    #[should_panic]
    fn pair_seeds_rejects_out_of_range() {
        pair_seeds(2048);
    }

    #[test]
    fn pair_seeds_sum_is_constant() {
        for it in 0..SET_SIZE {
            let (a, b) = pair_seeds(it);
            assert_eq!(a as usize + b as usize, SET_SIZE - 1);
        }
    }

    #[test]
    fn select_indices_components_are_bijections() {
        let pairs = select_indices(5, 2042);
        let mut seen_a = vec![false; SET_SIZE];
        let mut seen_b = vec![false; SET_SIZE];
        for &(ia, ib) in &pairs {
            seen_a[ia as usize] = true;
            seen_b[ib as usize] = true;
        }
        assert!(seen_a.iter().all(|&v| v));
        assert!(seen_b.iter().all(|&v| v));
    }

    #[test]
    fn select_indices_deterministic_and_duplicate_free() {
        let p1 = select_indices(0, 2047);
        let p2 = select_indices(0, 2047);
        assert_eq!(p1, p2);
        let mut sorted = p1.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), SET_SIZE);
    }

    #[test]
    fn plain_lfsr_mode_has_period_2047_and_locks_at_zero() {
        let plain = SelectorConfig {
            taps: SELECTOR_TAPS,
            de_bruijn: false,
        };
        let mut sel = Selector11::with_config(1, plain);
        let mut period = 0usize;
        loop {
            sel.step();
            period += 1;
            if sel.state() == 1 {
                break;
            }
            assert!(period <= SET_SIZE, "no cycle found");
        }
        assert_eq!(period, SET_SIZE - 1);
        let mut stuck = Selector11::with_config(0, plain);
        stuck.step();
        assert_eq!(stuck.state(), 0);
    }

    #[test]
    fn custom_taps_change_the_sequence_deterministically() {
        // x^11 + x^9 + 1, the reciprocal primitive trinomial.
        let alt = SelectorConfig {
            taps: (1 << 10) | (1 << 8),
            de_bruijn: true,
        };
        alt.validate().unwrap();
        let p1 = select_indices_with(0, 2047, alt);
        let p2 = select_indices_with(0, 2047, alt);
        assert_eq!(p1, p2);
        assert_ne!(p1, select_indices(0, 2047));
        // Still a de Bruijn counter: full coverage per component.
        let mut seen = vec![false; SET_SIZE];
        for &(ia, _) in &p1 {
            seen[ia as usize] = true;
        }
        assert!(seen.iter().all(|&v| v));
    }

    #[test]
    fn selector_config_validation() {
        assert!(SelectorConfig::default().validate().is_ok());
        assert!(SelectorConfig {
            taps: 1 << 9,
            de_bruijn: true
        }
        .validate()
        .is_err());
        assert!(SelectorConfig {
            taps: 0xffff,
            de_bruijn: true
        }
        .validate()
        .is_err());
    }

    #[test]
    fn lfsr64_custom_taps_diverge_from_default() {
        let mut a = Lfsr64::seed(1);
        let mut b = Lfsr64::with_taps(1, (1 << 63) | (1 << 62) | (1 << 61) | 1);
        let wa: Vec<u64> = (0..8).map(|_| a.next_word()).collect();
        let wb: Vec<u64> = (0..8).map(|_| b.next_word()).collect();
        assert_ne!(wa, wb);
    }

    #[test]
    fn swapped_seeds_swap_the_pair_stream() {
        // Both selectors share one step function, so iteration k and its
        // complement 2047-k walk the same unordered pairs in swapped order.
        let fwd = select_indices(3, 2044);
        let swp = select_indices(2044, 3);
        for (&(a1, b1), &(a2, b2)) in fwd.iter().zip(&swp) {
            assert_eq!((a1, b1), (b2, a2));
        }
    }
}
