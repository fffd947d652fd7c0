//! Integrability analysis for non-degenerate generic germs of holomorphic
//! vector fields on (ℂ³,0).
//!
//! * [`series_core`]: exact truncated series over ℚ(i) and differential forms.
//! * [`resonance`]: eigenvalue combinatorics, monomial first integrals and
//!   adapted meromorphic invariants.
//! * [`resolution`]: blow-up resolution of plane foliation germs.
//! * [`distribution`]: tangent codimension-one distributions and the jet
//!   solver for their integrability equation.
//! * [`holonomy`]: floating-point loop lifting and periodicity tests.

pub mod distribution;
pub mod holonomy;
pub mod resolution;
pub mod resonance;
pub mod series_core;
#[cfg(test)]
mod testing;

pub use series_core::{GaussianRational, MultiIndex, TruncatedSeries, TruncatedSeries2, TruncatedSeries3, VectorFieldGerm};
