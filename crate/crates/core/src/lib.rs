// SPDX-License-Identifier: Apache-2.0

//! Software model of the SiRF PUF-TRNG bit-generation algorithm.
//!
//! The pipeline pairs a simulated path-delay entropy source (static entropy
//! from per-device process variation, dynamic entropy from measurement
//! noise) with a soft-data sponge construction: pseudo-random pairwise
//! differencing of 2048-element delay sets, mean/range compensation against
//! environmental effects, spread-factor chaining that removes the
//! correlations produced by reusing the delay sets, and sign-based bit
//! squeezing. An embedded certification suite covers AIS 20/31 tests T0-T8,
//! an SP 800-90B subset (IID permutation testing and four min-entropy
//! estimators), and a Pearson correlation scan over the sponge's residue
//! sets.
//!
//! Bit sequences are packed MSB-first ([`bits::BitBuf`]); sponge arithmetic
//! is exact fixed-point ([`fixed::Fx4`]); statistics kernels are generic
//! over the float width ([`num::Real`]) and concretely run at [`Scalar`].

pub mod bits;
pub mod entropy;
pub mod error;
pub mod fixed;
pub mod nonce;
pub mod num;
pub mod pipeline;
pub mod rng;
pub mod sequence;
pub mod sponge;
pub mod stats;

pub use error::{Error, Result};

/// Concrete float scalar used across the statistics suite.
pub type Scalar = f64;
/// One digitized path delay in TDC counts.
pub type Dv = entropy::DelayValue;
/// Soft value on the 1/16 fixed-point lattice.
pub type Soft = fixed::Fx4;
