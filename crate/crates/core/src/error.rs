// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension {d}: qudit dimension must be at least 2")]
    InvalidDimension { d: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("density matrix trace {trace} differs from 1")]
    BadTrace { trace: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// An analytic value left its proven range by more than numerical dust.
    #[error("internal consistency violated: {quantity} = {value} outside [{lower}, {upper}]")]
    Consistency {
        quantity: &'static str,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Values within this distance of a proven bound are clipped onto it.
pub(crate) const CLIP_TOL: f64 = 1e-9;

/// Clip `value` into `[lower, upper]` when it overshoots by at most
/// [`CLIP_TOL`]; larger excursions are reported as an error.
pub(crate) fn clip_to_bounds(
    quantity: &'static str,
    value: f64,
    lower: f64,
    upper: f64,
) -> Result<f64> {
    clip_with_tol(quantity, value, lower, upper, CLIP_TOL)
}

pub(crate) fn clip_with_tol(
    quantity: &'static str,
    value: f64,
    lower: f64,
    upper: f64,
    tol: f64,
) -> Result<f64> {
    if value.is_nan() || value < lower - tol || value > upper + tol {
        return Err(Error::Consistency {
            quantity,
            value,
            lower,
            upper,
        });
    }
    Ok(value.clamp(lower, upper))
}
