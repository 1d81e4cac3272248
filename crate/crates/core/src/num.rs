// SPDX-License-Identifier: Apache-2.0

//! Scalar abstraction for the floating-point statistics kernels.
//!
//! The sponge itself is exact fixed-point and is not generic; descriptive
//! statistics (correlation, moments, chi-square machinery) work for any
//! float width. Concrete code uses the [`crate::Scalar`] alias.

use num_traits::{Float, FromPrimitive, NumAssign};

/// Float scalar for statistics kernels (f32 or f64).
pub trait Real:
    Float + NumAssign + FromPrimitive + std::fmt::Debug + Send + Sync + 'static
{
    fn from_usize_(v: usize) -> Self {
        Self::from_usize(v).expect("count representable in scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}
