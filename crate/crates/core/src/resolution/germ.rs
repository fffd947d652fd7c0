use num_traits::One;
use serde::{Deserialize, Serialize};

use super::ResolutionError;
use crate::series_core::{GaussianRational, MultiIndex, OneForm2, Saturate, TruncatedSeries2, TruncatedSeries3, VectorFieldGerm};

/// Which chart of a point blow-up: `Chart1` is `v₂ = v₁·t` with coordinates
/// `(v₁, t)`, `Chart2` is `v₁ = u·v₂` with coordinates `(u, v₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ChartLabel {
    Chart1,
    Chart2,
}

impl ChartLabel {
    /// Index of the variable cutting out the exceptional divisor.
    pub fn divisor_var(self) -> usize {
        match self {
            ChartLabel::Chart1 => 0,
            ChartLabel::Chart2 => 1,
        }
    }
}

/// `ω = A dv₂ + B dv₁`, stored without a common monomial factor. The dual
/// vector field is `Z = A ∂v₁ − B ∂v₂`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneFoliationGerm {
    a: TruncatedSeries2,
    b: TruncatedSeries2,
    chart_history: Vec<ChartLabel>,
}

impl PlaneFoliationGerm {
    /// Saturates `(A, B)` by their common monomial factor.
    pub fn new(a: TruncatedSeries2, b: TruncatedSeries2) -> Result<Self, ResolutionError> {
        Self::with_history(a, b, Vec::new())
    }

    pub fn with_history(a: TruncatedSeries2, b: TruncatedSeries2, chart_history: Vec<ChartLabel>) -> Result<Self, ResolutionError> {
        let form = OneForm2::new(b, a)?;
        let (_, form) = form.saturate().map_err(|_| ResolutionError::ZeroForm)?;
        Ok(Self { a: form.d2, b: form.d1, chart_history })
    }

    /// `m x dy − n y dx`.
    pub fn omega_mn(m: i64, n: i64, order: u32) -> Self {
        let z = TruncatedSeries2::zero(order.saturating_sub(1));
        Self::perturbed_form(m, n, [z.clone(), z.clone(), z.clone(), z], order).expect("nonzero form")
    }

    /// `m x(1 + xA + yB) dy − n y(1 + xC + yD) dx` truncated at `order`.
    pub fn perturbed_form(m: i64, n: i64, abcd: [TruncatedSeries2; 4], order: u32) -> Result<Self, ResolutionError> {
        let [a, b, c, d] = abcd.map(|s| s.polynomial_with_order(order));
        let x = TruncatedSeries2::var(0, order);
        let y = TruncatedSeries2::var(1, order);
        let one = TruncatedSeries2::one(order);
        let ua = &(&one + &(&x * &a)) + &(&y * &b);
        let ub = &(&one + &(&x * &c)) + &(&y * &d);
        let big_a = (&x * &ua).scale(&GaussianRational::from_int(m));
        let big_b = (&y * &ub).scale(&GaussianRational::from_int(-n));
        Self::new(big_a, big_b)
    }

    /// Coefficient of `dv₂`.
    pub fn a(&self) -> &TruncatedSeries2 {
        &self.a
    }

    /// Coefficient of `dv₁`.
    pub fn b(&self) -> &TruncatedSeries2 {
        &self.b
    }

    pub fn chart_history(&self) -> &[ChartLabel] {
        &self.chart_history
    }

    pub fn order(&self) -> u32 {
        self.a.order()
    }

    /// Algebraic multiplicity at the origin, if visible at this order.
    pub fn multiplicity(&self) -> Option<u32> {
        match (self.a.valuation(), self.b.valuation()) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        }
    }

    pub fn is_singular_at_origin(&self) -> bool {
        self.a.in_maximal_ideal() && self.b.in_maximal_ideal()
    }

    /// `ω(Z)` for the planar field `Z = (Z₁, Z₂)`, i.e. `B·Z₁ + A·Z₂`.
    pub fn contract(&self, z: &[TruncatedSeries2; 2]) -> TruncatedSeries2 {
        let o = self.order().min(z[0].order()).min(z[1].order());
        &(&self.b.truncated(o) * &z[0].truncated(o)) + &(&self.a.truncated(o) * &z[1].truncated(o))
    }

    /// The same germ centred at `point`, reading the stored terms as a
    /// polynomial.
    pub fn translated(&self, point: &[GaussianRational; 2]) -> Result<Self, ResolutionError> {
        let order = self.order();
        let shift = |s: &TruncatedSeries2| {
            s.polynomial_with_order(u32::MAX)
                .translate_var(0, &point[0], u32::MAX)
                .translate_var(1, &point[1], order)
        };
        Self::with_history(shift(&self.a), shift(&self.b), self.chart_history.clone())
    }
}

/// Restriction of `X = m x(1+a₁)∂x + n y(1+a₂)∂y − k z(1+a₃)∂z` to the
/// slice `z = z₀`: `ω_{z₀} = m x(1 + a₁(x,y,z₀)) dy − n y(1 + a₂(x,y,z₀)) dx`.
///
/// The eigenvalues must be `(m, n, −k)` with positive integers; use
/// [`crate::resonance::normal_shape`] first. The truncated `a_j` are read as
/// polynomials when `z₀` is substituted.
pub fn family_restriction(x: &VectorFieldGerm, z0: &GaussianRational) -> Result<PlaneFoliationGerm, ResolutionError> {
    let lam = x.lambda();
    let ints: Vec<i64> = lam
        .iter()
        .map(|l| l.as_integer().and_then(|v| i64::try_from(v).ok()))
        .collect::<Option<_>>()
        .ok_or(ResolutionError::NotNormalShape)?;
    let (m, n) = (ints[0], ints[1]);
    if m <= 0 || n <= 0 || ints[2] >= 0 {
        return Err(ResolutionError::NotNormalShape);
    }
    let order = x.order() + 1;
    let slice = |s: &TruncatedSeries3| -> TruncatedSeries2 {
        let images = [TruncatedSeries2::var(0, order), TruncatedSeries2::var(1, order), TruncatedSeries2::zero(order)];
        s.evaluate_var(2, z0)
            .polynomial_with_order(order)
            .substitute(&images, order)
            .expect("images lie in the maximal ideal")
    };
    let unit = |j: usize| {
        let mut u = slice(&x.a()[j]);
        u.add_term(MultiIndex::zero(), GaussianRational::one());
        u
    };
    let a = unit(0).mul_var(0).truncated(order).scale(&GaussianRational::from_int(m));
    let b = unit(1).mul_var(1).truncated(order).scale(&GaussianRational::from_int(-n));
    PlaneFoliationGerm::new(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series_core::text::parse_series;

    #[test]
    fn linear_family_is_omega_mn() {
        let x = VectorFieldGerm::linear_int([2, 3, -5], 4).unwrap();
        for z0 in [GaussianRational::from_ratio(1, 2), GaussianRational::i()] {
            let g = family_restriction(&x, &z0).unwrap();
            assert_eq!(g, PlaneFoliationGerm::omega_mn(2, 3, 5));
        }
    }

    #[test]
    fn substitutes_z0() {
        let a1 = TruncatedSeries3::var(2, 4);
        let x = VectorFieldGerm::new([1, 1, -1].map(GaussianRational::from_int), [a1, TruncatedSeries3::zero(4), TruncatedSeries3::zero(4)]).unwrap();
        let g = family_restriction(&x, &GaussianRational::from_ratio(1, 2)).unwrap();
        assert_eq!(g.a(), &parse_series::<2>("3/2*x", 5).unwrap());
        assert_eq!(g.b(), &parse_series::<2>("-y", 5).unwrap());
    }

    #[test]
    fn restriction_is_tangent_to_planar_field() {
        let a1 = parse_series::<3>("x*z + 1/3*y^2 - z^3", 5).unwrap();
        let a2 = parse_series::<3>("2*x - y*z", 5).unwrap();
        let x = VectorFieldGerm::new([3, 2, -7].map(GaussianRational::from_int), [a1.clone(), a2.clone(), TruncatedSeries3::zero(5)]).unwrap();
        let z0 = GaussianRational::from_parts(1, 4, -1, 3);
        let g = family_restriction(&x, &z0).unwrap();
        // Z = (X₁, X₂) restricted to z = z₀, sliced independently of ω.
        let images = [TruncatedSeries2::var(0, 6), TruncatedSeries2::var(1, 6), TruncatedSeries2::zero(6)];
        let field = [0, 1].map(|j| x.component(j).evaluate_var(2, &z0).substitute(&images, 6).unwrap());
        assert!(g.contract(&field).is_zero());
        assert!(!g.contract(&[field[1].clone(), field[0].clone()]).is_zero());
    }

    #[test]
    fn rejects_non_normal_shape() {
        let x = VectorFieldGerm::linear_int([1, -2, 3], 3).unwrap();
        assert_eq!(family_restriction(&x, &GaussianRational::from_int(0)), Err(ResolutionError::NotNormalShape));
    }

    #[test]
    fn saturates_on_construction() {
        let a = parse_series::<2>("x^2*y", 4).unwrap();
        let b = parse_series::<2>("x*y^2", 4).unwrap();
        let g = PlaneFoliationGerm::new(a, b).unwrap();
        assert_eq!(g.a(), &parse_series::<2>("x", 2).unwrap());
        assert_eq!(g.b(), &parse_series::<2>("y", 2).unwrap());
    }
}
