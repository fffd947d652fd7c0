use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("truncation orders differ ({lhs} vs {rhs})")]
    OrderMismatch { lhs: u32, rhs: u32 },
    #[error("series has zero constant term and is not a unit")]
    NonUnit,
    #[error("substitution image for variable {var} has a nonzero constant term")]
    InvalidSubstitution { var: usize },
    #[error("cannot saturate the zero form")]
    DegenerateInput,
    #[error("eigenvalue {index} is zero")]
    ZeroEigenvalue { index: usize },
    #[error("a{index} has a nonzero constant term")]
    NotInMaximalIdeal { index: usize },
    #[error("component {index} is not divisible by x{}; the coordinate plane is not invariant", index + 1)]
    NonInvariantPlane { index: usize },
    #[error("component {index} has linear part other than lambda*x{}", index + 1)]
    NotDiagonal { index: usize },
}
