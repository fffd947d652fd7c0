use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::germ::PlaneFoliationGerm;
use super::ResolutionError;
use crate::series_core::{GaussianRational, MultiIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularityKind {
    Regular,
    Reduced,
    NonReduced,
    SaddleNode,
}

impl SingularityKind {
    /// Whether resolution stops here. Saddle-nodes count as reduced.
    pub fn is_terminal(self) -> bool {
        !matches!(self, SingularityKind::NonReduced)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SingularityKind::Regular => "regular",
            SingularityKind::Reduced => "reduced",
            SingularityKind::NonReduced => "non_reduced",
            SingularityKind::SaddleNode => "saddle_node",
        }
    }
}

/// `linear_type` is the eigenvalue ratio `p/q` of a non-reduced point in
/// lowest terms. It is absent for non-reduced points with nilpotent linear
/// part.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SingularityClass {
    pub kind: SingularityKind,
    pub linear_type: Option<(u64, u64)>,
}

impl SingularityClass {
    pub const REGULAR: Self = Self { kind: SingularityKind::Regular, linear_type: None };
    pub const REDUCED: Self = Self { kind: SingularityKind::Reduced, linear_type: None };
    pub const SADDLE_NODE: Self = Self { kind: SingularityKind::SaddleNode, linear_type: None };
    /// Non-reduced with nilpotent (or zero) linear part.
    pub const NILPOTENT: Self = Self { kind: SingularityKind::NonReduced, linear_type: None };

    pub fn non_reduced(p: u64, q: u64) -> Self {
        Self { kind: SingularityKind::NonReduced, linear_type: Some((p, q)) }
    }
}

fn positive_type(r: &BigRational) -> Option<(u64, u64)> {
    if !r.is_positive() {
        return None;
    }
    Some((r.numer().to_u64()?, r.denom().to_u64()?))
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer().sqrt(), r.denom().sqrt());
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRational::new(n, d))
}

fn coeff(s: &crate::series_core::TruncatedSeries2, e: [u32; 2]) -> GaussianRational {
    s.coeff(&MultiIndex(e))
}

/// Classification of the germ at its origin from the linear part
/// `J = [[A_v₁, A_v₂], [−B_v₁, −B_v₂]]` of the dual field.
pub fn classify_origin(g: &PlaneFoliationGerm) -> SingularityClass {
    if !g.is_singular_at_origin() {
        return SingularityClass::REGULAR;
    }
    let j11 = coeff(g.a(), [1, 0]);
    let j12 = coeff(g.a(), [0, 1]);
    let j21 = -coeff(g.b(), [1, 0]);
    let j22 = -coeff(g.b(), [0, 1]);
    let tr = &j11 + &j22;
    let det = &j11 * &j22 - &j12 * &j21;
    if det.is_zero() {
        return if tr.is_zero() {
            SingularityClass::NILPOTENT
        } else {
            SingularityClass::SADDLE_NODE
        };
    }
    let ratio_class = |r: Option<BigRational>| match r.as_ref().and_then(positive_type) {
        Some((p, q)) => SingularityClass::non_reduced(p, q),
        None => SingularityClass::REDUCED,
    };
    if j12.is_zero() || j21.is_zero() {
        // Triangular: the eigenvalues are the diagonal entries.
        return ratio_class(j11.real_ratio(&j22));
    }
    // Eigenvalue ratio r satisfies r + 1/r + 2 = tr²/det.
    let Some(s) = (&tr * &tr).real_ratio(&det) else {
        return SingularityClass::REDUCED;
    };
    let four = BigRational::from_integer(BigInt::from(4));
    if s < four {
        return SingularityClass::REDUCED;
    }
    let Some(root) = rational_sqrt(&(&s * (&s - &four))) else {
        return SingularityClass::REDUCED;
    };
    let two = BigRational::from_integer(BigInt::from(2));
    let r = (&s - &two + root) / two;
    ratio_class(Some(r))
}

/// Classification at `point` in the germ's chart coordinates.
pub fn classify_singularity(g: &PlaneFoliationGerm, point: &[GaussianRational; 2]) -> Result<SingularityClass, ResolutionError> {
    if point.iter().all(|p| p.is_zero()) {
        return Ok(classify_origin(g));
    }
    Ok(classify_origin(&g.translated(point)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series_core::text::parse_series;

    fn germ(a: &str, b: &str, order: u32) -> PlaneFoliationGerm {
        PlaneFoliationGerm::new(parse_series(a, order).unwrap(), parse_series(b, order).unwrap()).unwrap()
    }

    #[test]
    fn examples() {
        // 2x dt + t dx in coordinates (x, t)
        assert_eq!(classify_origin(&germ("2*x", "y", 3)), SingularityClass::REDUCED);
        assert_eq!(classify_origin(&PlaneFoliationGerm::omega_mn(3, 2, 4)), SingularityClass::non_reduced(3, 2));
        assert_eq!(classify_origin(&PlaneFoliationGerm::omega_mn(2, 4, 4)), SingularityClass::non_reduced(1, 2));
        assert_eq!(classify_origin(&germ("1", "0", 3)), SingularityClass::REGULAR);
        // saddle-node: x dy − y² dx
        assert_eq!(classify_origin(&germ("x", "-y^2", 3)), SingularityClass::SADDLE_NODE);
        // nilpotent: y dy + x² dx → Z = (y, −x²), J nilpotent
        assert_eq!(classify_origin(&germ("y", "x^2", 3)).linear_type, None);
        assert_eq!(classify_origin(&germ("y", "x^2", 3)).kind, SingularityKind::NonReduced);
        // complex ratio
        assert_eq!(classify_origin(&germ("(1+i)*x", "-y", 3)), SingularityClass::REDUCED);
    }

    #[test]
    fn non_diagonal_linear_part() {
        // Z = (x + y, 2y) is triangular: ratio J₁₁/J₂₂ = 1/2.
        assert_eq!(classify_origin(&germ("x + y", "-2*y", 3)), SingularityClass::non_reduced(1, 2));
        // Z = (y, −x): eigenvalues ±i → ratio −1, reduced
        assert_eq!(classify_origin(&germ("y", "x", 3)), SingularityClass::REDUCED);
        // Z = (x + 2y, 3x + 2y): eigenvalues 4, −1 → reduced
        assert_eq!(classify_origin(&germ("x + 2*y", "-3*x - 2*y", 3)), SingularityClass::REDUCED);
        // Z = (2x + y, x + 2y): eigenvalues 3, 1, ordered (max, min)
        assert_eq!(classify_origin(&germ("2*x + y", "-x - 2*y", 3)), SingularityClass::non_reduced(3, 1));
    }

    #[test]
    fn translated_points() {
        // ω = (x − 1) dy − y dx has a singular point at (1, 0) of type (1, 1).
        let g = germ("x - 1", "-y", 3);
        assert_eq!(classify_origin(&g), SingularityClass::REGULAR);
        let p = [GaussianRational::from_int(1), GaussianRational::from_int(0)];
        assert_eq!(classify_singularity(&g, &p).unwrap(), SingularityClass::non_reduced(1, 1));
    }
}
