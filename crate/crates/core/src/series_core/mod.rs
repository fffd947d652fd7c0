//! Exact truncated power series over ℚ(i), differential forms, and the
//! exterior calculus used by every other module.
//!
//! Values are immutable once built and every operation is a pure function,
//! so they can be shared freely across threads.

mod error;
mod field;
mod forms;
mod gaussian;
mod index;
mod series;
pub mod text;

pub use error::SeriesError;
pub use field::{contract, VectorFieldGerm};
pub use forms::{d_of_function, exterior_derivative, wedge, wedge13, OneForm2, OneForm3, Saturate, TwoForm3};
pub use gaussian::GaussianRational;
pub use index::{MultiIndex, MultiIndex2, MultiIndex3};
pub use series::{TruncatedSeries, TruncatedSeries2, TruncatedSeries3};

/// Arithmetic on two series, as named operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Sub,
    Mul,
}

/// `lhs op rhs`, exact up to the common truncation order.
pub fn series_arith<const N: usize>(
    lhs: &TruncatedSeries<N>,
    rhs: &TruncatedSeries<N>,
    op: SeriesOp,
) -> Result<TruncatedSeries<N>, SeriesError> {
    match op {
        SeriesOp::Add => lhs.checked_add(rhs),
        SeriesOp::Sub => lhs.checked_sub(rhs),
        SeriesOp::Mul => lhs.checked_mul(rhs),
    }
}
