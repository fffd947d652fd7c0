//! Blow-up resolution of plane foliation germs `ω = A dv₂ + B dv₁`:
//! point blow-ups in two charts, singularity classification from the dual
//! linear part, resolution trees and dicriticalness.
//!
//! Singular points are located on each exceptional divisor only at real
//! rational chart coordinates and at the second chart's origin; any other
//! roots are counted in `unlocated_roots`. Branches are not followed past a
//! dicritical divisor.

mod blowup;
mod classify;
mod germ;
mod tree;

use thiserror::Error;

use crate::series_core::SeriesError;

pub use blowup::{blowup_once, Blowup, DivisorPoint};
pub use classify::{classify_origin, classify_singularity, SingularityClass, SingularityKind};
pub use germ::{family_restriction, ChartLabel, PlaneFoliationGerm};
pub use tree::{
    compare_trees, dicritical_parameter_search, euclid_length, euclid_skeleton, resolve, scan_parameters, BlowupRecord,
    BudgetKind, ResolutionNode, ResolutionTree, TreeDecodeError,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ResolutionError {
    #[error("zero form")]
    ZeroForm,
    #[error("the origin is not a singular point")]
    NotSingular,
    #[error("eigenvalues are not of the shape (m, n, -k) with positive integers")]
    NotNormalShape,
    #[error("truncation order too low to continue")]
    TruncationBudget,
    #[error("{kind} budget exceeded after {blowups} blow-ups")]
    Budget { kind: BudgetKind, blowups: usize, partial: Box<ResolutionTree> },
    #[error(transparent)]
    Series(#[from] SeriesError),
}
