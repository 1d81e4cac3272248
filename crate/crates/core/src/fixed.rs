// SPDX-License-Identifier: Apache-2.0

//! Exact fixed-point soft values with four fractional bits.
//!
//! The whole sponge loop (compensation, trim-code reduction, reflection,
//! spread-factor accumulation) runs on this lattice so that a run is
//! reproducible bit for bit. With an even trim code the interval boundaries
//! `±TCC/2` sit exactly on the lattice, and all operations below stay in
//! `i64` range by wide margin.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

/// Fractional bits of the soft-value lattice.
pub const FRAC_BITS: u32 = 4;
/// Lattice denominator: values are `raw / 16`.
pub const FRAC_ONE: i64 = 1 << FRAC_BITS;

/// A soft value on the 1/16 lattice.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Fx4(i64);

impl Fx4 {
    pub const ZERO: Fx4 = Fx4(0);

    pub const fn from_raw(raw: i64) -> Self {
        Fx4(raw)
    }

    pub const fn from_int(v: i64) -> Self {
        Fx4(v * FRAC_ONE)
    }

    pub const fn raw(self) -> i64 {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / FRAC_ONE as f64
    }

    pub fn abs(self) -> Self {
        Fx4(self.0.abs())
    }

    /// Strict sign: -1, 0, or +1.
    pub fn signum(self) -> i32 {
        self.0.signum() as i32
    }
}

impl Add for Fx4 {
    type Output = Fx4;
    fn add(self, rhs: Fx4) -> Fx4 {
        Fx4(self.0 + rhs.0)
    }
}

impl Sub for Fx4 {
    type Output = Fx4;
    fn sub(self, rhs: Fx4) -> Fx4 {
        Fx4(self.0 - rhs.0)
    }
}

impl Neg for Fx4 {
    type Output = Fx4;
    fn neg(self) -> Fx4 {
        Fx4(-self.0)
    }
}

impl AddAssign for Fx4 {
    fn add_assign(&mut self, rhs: Fx4) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Fx4 {
    fn sub_assign(&mut self, rhs: Fx4) {
        self.0 -= rhs.0;
    }
}

impl fmt::Debug for Fx4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

impl fmt::Display for Fx4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

/// Rounds the exact rational `num/den` (with `den > 0`) half away from zero.
pub fn round_half_away(num: i128, den: i128) -> i64 {
    debug_assert!(den > 0);
    let q = num.div_euclid(den);
    let r = num.rem_euclid(den); // 0 <= r < den
    let up = match (2 * r).cmp(&den) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        // Exact half: away from zero.
        std::cmp::Ordering::Equal => num >= 0,
    };
    (if up { q + 1 } else { q }) as i64
}

/// Rounds the exact rational `num/den` (with `den > 0`) to the nearest odd
/// integer. A value exactly on an even integer is equidistant from both odd
/// neighbors; the tie goes away from zero (zero itself maps to +1).
///
/// Quantizing compensated values onto the odd sublattice keeps the sponge's
/// residues clear of both zero and the `±TCC/2` boundary: the trim code is
/// even, so `16 * TCC/2` is even and an odd value can never land on it. This
/// removes the boundary tie case entirely and makes the positive and negative
/// residue counts structurally equal.
pub fn round_to_odd(num: i128, den: i128) -> i64 {
    debug_assert!(den > 0);
    let q = num.div_euclid(den);
    let r = num.rem_euclid(den); // value = q + r/den, 0 <= r < den
    if q & 1 != 0 {
        // x in [odd, odd+1): the lower odd is strictly nearer (or exact).
        q as i64
    } else if r != 0 {
        // x in (even, even+1): the upper odd is strictly nearer.
        (q + 1) as i64
    } else if q == 0 {
        1
    } else if q > 0 {
        (q + 1) as i64
    } else {
        (q - 1) as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fx4_arithmetic_is_exact() {
        let a = Fx4::from_raw(7);
        let b = Fx4::from_raw(-20);
        assert_eq!((a + b).raw(), -13);
        assert_eq!((a - b).raw(), 27);
        assert_eq!((-a).raw(), -7);
        assert_eq!(Fx4::from_int(3).to_f64(), 3.0);
    }

    #[test]
    fn half_away_rounding() {
        assert_eq!(round_half_away(5, 2), 3); // 2.5 -> 3
        assert_eq!(round_half_away(-5, 2), -3); // -2.5 -> -3
        assert_eq!(round_half_away(7, 3), 2);
        assert_eq!(round_half_away(-7, 3), -2);
        assert_eq!(round_half_away(0, 7), 0);
    }

    #[test]
    fn odd_rounding_basics() {
        // 1077.89 is nearer to 1077 than to 1079.
        assert_eq!(round_to_odd(107789, 100), 1077);
        assert_eq!(round_to_odd(-107789, 100), -1077);
        // Values in (even, even+1) snap up to the odd above.
        assert_eq!(round_to_odd(41, 10), 5); // 4.1 -> 5
        assert_eq!(round_to_odd(-41, 10), -5);
        // Odd integers are fixed points.
        assert_eq!(round_to_odd(3, 1), 3);
        assert_eq!(round_to_odd(-9, 1), -9);
        // Even integers tie away from zero; zero goes to +1.
        assert_eq!(round_to_odd(2, 1), 3);
        assert_eq!(round_to_odd(-2, 1), -3);
        assert_eq!(round_to_odd(0, 5), 1);
    }

    proptest! {
        #[test]
        fn odd_round_is_odd_and_within_one(num in -1_000_000i128..1_000_000, den in 1i128..1000) {
            let v = round_to_odd(num, den);
            prop_assert!(v % 2 != 0);
            // |num/den - v| <= 1 exactly: |num - v*den| <= den.
            prop_assert!((num - v as i128 * den).abs() <= den);
        }

        #[test]
        fn odd_round_neighbors_are_no_closer(num in -1_000_000i128..1_000_000, den in 1i128..1000) {
            let v = round_to_odd(num, den) as i128;
            let d = (num - v * den).abs();
            prop_assert!((num - (v - 2) * den).abs() >= d);
            prop_assert!((num - (v + 2) * den).abs() >= d);
        }

        #[test]
        fn half_away_within_half(num in -1_000_000i128..1_000_000, den in 1i128..1000) {
            let v = round_half_away(num, den) as i128;
            // |num/den - v| <= 1/2 exactly: |2*(num - v*den)| <= den.
            prop_assert!((2 * (num - v * den)).abs() <= den);
        }
    }
}
