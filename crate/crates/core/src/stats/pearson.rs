// SPDX-License-Identifier: Apache-2.0

//! Pearson correlation and the all-pairs / sampled-pairs scan over chained
//! residue sets.

use crate::error::{Error, Result};
use crate::num::Real;
use crate::rng::Xoshiro256;
use rayon::prelude::*;
use serde::Serialize;

/// Sample Pearson correlation coefficient of two equal-length vectors.
pub fn pearson<T: Real>(a: &[T], b: &[T]) -> Result<T> {
    assert_eq!(a.len(), b.len());
    assert!(a.len() >= 2, "need at least two samples");
    let n = T::from_usize_(a.len());
    let ma = a.iter().fold(T::zero(), |s, &x| s + x) / n;
    let mb = b.iter().fold(T::zero(), |s, &x| s + x) / n;
    let mut cov = T::zero();
    let mut va = T::zero();
    let mut vb = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        let dx = x - ma;
        let dy = y - mb;
        cov += dx * dy;
        va += dx * dx;
        vb += dy * dy;
    }
    if va.is_zero() || vb.is_zero() {
        return Err(Error::UndefinedCorrelation);
    }
    let r = cov / (va * vb).sqrt();
    // Guard against rounding excursions beyond the mathematical range.
    Ok(r.min(T::one()).max(-T::one()))
}

/// Pair sampling policy for the scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairSampling {
    AllPairs,
    /// Seeded uniform sample of unordered pairs (with replacement across
    /// draws, duplicates deduplicated).
    Random {
        pairs: usize,
        seed: u64,
    },
}

/// Default policy: exhaustive for small set counts, sampled above.
pub fn default_sampling(sets: usize, seed: u64) -> PairSampling {
    if sets <= 256 {
        PairSampling::AllPairs
    } else {
        PairSampling::Random {
            pairs: 100_000,
            seed,
        }
    }
}

pub const PCC_HISTOGRAM_BINS: usize = 64;

#[derive(Clone, Debug, Serialize)]
pub struct PccReport {
    pub pairs_examined: usize,
    pub max_abs_r: f64,
    /// Pair achieving the maximum, as (set_i, set_j).
    pub max_pair: (usize, usize),
    /// 64 equal bins over [-1, 1].
    pub histogram: Vec<u64>,
    /// Pairs with |r| above 0.5.
    pub high_pairs: Vec<(usize, usize, f64)>,
    /// Pairs skipped because one side was constant.
    pub degenerate_pairs: usize,
}

fn normalize_rows(sets: &[Vec<f64>]) -> Vec<Option<Vec<f64>>> {
    sets.par_iter()
        .map(|row| {
            let n = row.len() as f64;
            let mean = row.iter().sum::<f64>() / n;
            let mut var = 0.0;
            let centered: Vec<f64> = row.iter().map(|&x| x - mean).collect();
            for &d in &centered {
                var += d * d;
            }
            if var == 0.0 {
                return None;
            }
            let inv = 1.0 / var.sqrt();
            Some(centered.into_iter().map(|d| d * inv).collect())
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Scans correlations over pairs of residue sets.
pub fn pcc_scan(sets: &[Vec<f64>], sampling: PairSampling) -> Result<PccReport> {
    assert!(sets.len() >= 2, "need at least two sets");
    let rows = normalize_rows(sets);
    let pairs: Vec<(usize, usize)> = match sampling {
        PairSampling::AllPairs => {
            let mut v = Vec::with_capacity(sets.len() * (sets.len() - 1) / 2);
            for i in 0..sets.len() {
                for j in (i + 1)..sets.len() {
                    v.push((i, j));
                }
            }
            v
        }
        PairSampling::Random { pairs, seed } => {
            let mut rng = Xoshiro256::new(seed);
            let mut v = Vec::with_capacity(pairs);
            let n = sets.len() as u64;
            while v.len() < pairs {
                let i = rng.next_below(n) as usize;
                let j = rng.next_below(n) as usize;
                if i != j {
                    v.push((i.min(j), i.max(j)));
                }
            }
            v.sort_unstable();
            v.dedup();
            v
        }
    };

    struct Acc {
        max_abs_r: f64,
        max_pair: (usize, usize),
        histogram: Vec<u64>,
        high_pairs: Vec<(usize, usize, f64)>,
        degenerate: usize,
    }
    impl Acc {
        fn new() -> Self {
            Acc {
                max_abs_r: 0.0,
                max_pair: (0, 0),
                histogram: vec![0; PCC_HISTOGRAM_BINS],
                high_pairs: Vec::new(),
                degenerate: 0,
            }
        }
        fn merge(mut self, other: Acc) -> Acc {
            // Tie on the statistic resolved by pair order, so the parallel
            // reduction is order-independent.
            if other.max_abs_r > self.max_abs_r
                || (other.max_abs_r == self.max_abs_r && other.max_pair < self.max_pair)
            {
                self.max_abs_r = other.max_abs_r;
                self.max_pair = other.max_pair;
            }
            for (a, b) in self.histogram.iter_mut().zip(&other.histogram) {
                *a += b;
            }
            self.high_pairs.extend(other.high_pairs);
            self.degenerate += other.degenerate;
            self
        }
    }

    let acc = pairs
        .par_chunks(4096)
        .map(|chunk| {
            let mut acc = Acc::new();
            for &(i, j) in chunk {
                let (Some(ri), Some(rj)) = (&rows[i], &rows[j]) else {
                    acc.degenerate += 1;
                    continue;
                };
                let r = dot(ri, rj).clamp(-1.0, 1.0);
                let bin = (((r + 1.0) / 2.0) * PCC_HISTOGRAM_BINS as f64) as usize;
                acc.histogram[bin.min(PCC_HISTOGRAM_BINS - 1)] += 1;
                if r.abs() > acc.max_abs_r || (r.abs() == acc.max_abs_r && (i, j) < acc.max_pair) {
                    acc.max_abs_r = r.abs();
                    acc.max_pair = (i, j);
                }
                if r.abs() > 0.5 {
                    acc.high_pairs.push((i, j, r));
                }
            }
            acc
        })
        .reduce(Acc::new, Acc::merge);

    let mut high_pairs = acc.high_pairs;
    // Total order (statistic, then pair) keeps the report independent of
    // the parallel merge order.
    high_pairs.sort_by(|a, b| {
        b.2.abs()
            .partial_cmp(&a.2.abs())
            .unwrap()
            .then_with(|| (a.0, a.1).cmp(&(b.0, b.1)))
    });
    Ok(PccReport {
        pairs_examined: pairs.len(),
        max_abs_r: acc.max_abs_r,
        max_pair: acc.max_pair,
        histogram: acc.histogram,
        high_pairs,
        degenerate_pairs: acc.degenerate,
    })
}
