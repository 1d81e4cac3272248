// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// The DVD distribution collapsed to (near-)constant: the compensation
    /// range is below one TDC count, which signals a dead entropy source.
    #[error("degenerate DVD range: {span} counts (need >= 1)")]
    DegenerateRange { span: f64 },

    /// A fingerprint geometry with zero rows, columns, segments, or taps.
    #[error("invalid device geometry: {0}")]
    InvalidGeometry(String),

    /// Pearson correlation of a constant vector is undefined.
    #[error("undefined correlation: input vector is constant")]
    UndefinedCorrelation,

    /// A statistical test was handed fewer bits than its block regime needs.
    #[error("insufficient data: {test} needs {needed} bits, got {got}")]
    InsufficientData {
        test: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
