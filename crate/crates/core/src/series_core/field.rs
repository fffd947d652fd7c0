use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::error::SeriesError;
use super::forms::OneForm3;
use super::gaussian::GaussianRational;
use super::index::MultiIndex;
use super::series::TruncatedSeries3;

/// `X = λ₁x₁(1+a₁)∂₁ + λ₂x₂(1+a₂)∂₂ + λ₃x₃(1+a₃)∂₃` with `a_j ∈ 𝓜₃` and all
/// `λ_j ≠ 0`. Coordinate-plane invariance holds by construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorFieldGerm {
    lambda: [GaussianRational; 3],
    a: [TruncatedSeries3; 3],
}

impl VectorFieldGerm {
    pub fn new(lambda: [GaussianRational; 3], a: [TruncatedSeries3; 3]) -> Result<Self, SeriesError> {
        if let Some(index) = lambda.iter().position(|l| l.is_zero()) {
            return Err(SeriesError::ZeroEigenvalue { index });
        }
        if let Some(index) = a.iter().position(|s| !s.in_maximal_ideal()) {
            return Err(SeriesError::NotInMaximalIdeal { index });
        }
        for s in &a[1..] {
            if s.order() != a[0].order() {
                return Err(SeriesError::OrderMismatch { lhs: a[0].order(), rhs: s.order() });
            }
        }
        Ok(Self { lambda, a })
    }

    /// The diagonal linear field with the given eigenvalues.
    pub fn linear(lambda: [GaussianRational; 3], order: u32) -> Result<Self, SeriesError> {
        Self::new(lambda, std::array::from_fn(|_| TruncatedSeries3::zero(order)))
    }

    pub fn linear_int(lambda: [i64; 3], order: u32) -> Result<Self, SeriesError> {
        Self::linear(lambda.map(GaussianRational::from_int), order)
    }

    /// Recovers the normal shape from expanded components `X_j`. Each `X_j`
    /// must be divisible by `x_j` with linear part `λ_j x_j`; the `a_j` are
    /// known to `order`, one less than the components.
    pub fn from_components(components: [TruncatedSeries3; 3]) -> Result<Self, SeriesError> {
        let mut lambda: [GaussianRational; 3] = std::array::from_fn(|_| GaussianRational::zero());
        let mut a: [TruncatedSeries3; 3] = std::array::from_fn(|_| TruncatedSeries3::zero(0));
        for (j, comp) in components.iter().enumerate() {
            let quotient = comp.div_monomial(&MultiIndex::unit(j)).ok_or(SeriesError::NonInvariantPlane { index: j })?;
            let l = quotient.constant_term();
            if l.is_zero() {
                return Err(if comp.homogeneous_part(1).is_zero() {
                    SeriesError::ZeroEigenvalue { index: j }
                } else {
                    SeriesError::NotDiagonal { index: j }
                });
            }
            let mut unit = quotient.scale(&l.inv().expect("nonzero"));
            unit.add_term(MultiIndex::zero(), -GaussianRational::one());
            lambda[j] = l;
            a[j] = unit;
        }
        let order = a.iter().map(|s| s.order()).min().unwrap_or(0);
        Self::new(lambda, a.map(|s| s.truncated(order)))
    }

    pub fn lambda(&self) -> &[GaussianRational; 3] {
        &self.lambda
    }

    pub fn a(&self) -> &[TruncatedSeries3; 3] {
        &self.a
    }

    pub fn order(&self) -> u32 {
        self.a[0].order()
    }

    pub fn is_linear(&self) -> bool {
        self.a.iter().all(|s| s.is_zero())
    }

    /// `1 + a_j`.
    pub fn unit_factor(&self, j: usize) -> TruncatedSeries3 {
        let mut u = self.a[j].clone();
        u.add_term(MultiIndex::zero(), GaussianRational::one());
        u
    }

    /// `X_j = λ_j x_j (1 + a_j)`, known to order `order + 1`.
    pub fn component(&self, j: usize) -> TruncatedSeries3 {
        self.unit_factor(j).mul_var(j).scale(&self.lambda[j])
    }

    pub fn truncated(&self, order: u32) -> Self {
        Self { lambda: self.lambda.clone(), a: self.a.clone().map(|s| s.truncated(order)) }
    }

    /// `u·X` for a unit `u` of the same order. The eigenvalues pick up
    /// `u(0)` and each unit factor becomes `(1+a_j)·u/u(0)`.
    pub fn scaled_by_unit(&self, u: &TruncatedSeries3) -> Result<Self, SeriesError> {
        let u0 = u.constant_term();
        let u0_inv = u0.inv().ok_or(SeriesError::NonUnit)?;
        let normalized = u.scale(&u0_inv);
        let mut a: [TruncatedSeries3; 3] = std::array::from_fn(|_| TruncatedSeries3::zero(self.order()));
        for (j, slot) in a.iter_mut().enumerate() {
            let mut v = self.unit_factor(j).checked_mul(&normalized)?;
            v.add_term(MultiIndex::zero(), -GaussianRational::one());
            *slot = v;
        }
        Self::new(self.lambda.clone().map(|l| l * &u0), a)
    }

    /// `X / c` for a nonzero constant `c`.
    pub fn divided_by_constant(&self, c: &GaussianRational) -> Result<Self, SeriesError> {
        let inv = c.inv().ok_or(SeriesError::NonUnit)?;
        Self::new(self.lambda.clone().map(|l| l * &inv), self.a.clone())
    }

    /// Relabels coordinates: new coordinate `s` is old coordinate `perm[s]`.
    pub fn permuted(&self, perm: &[usize; 3]) -> Self {
        Self {
            lambda: std::array::from_fn(|s| self.lambda[perm[s]].clone()),
            a: std::array::from_fn(|s| self.a[perm[s]].permute_variables(perm)),
        }
    }
}

/// `i_X ω = X₁P + X₂Q + X₃R`, truncated at `min(order(X), order(ω) + 1)`.
pub fn contract(x: &VectorFieldGerm, w: &OneForm3) -> TruncatedSeries3 {
    let order = x.order().min(w.order() + 1);
    let mut acc = TruncatedSeries3::zero(order);
    for (j, wj) in w.components().into_iter().enumerate() {
        let xw = wj.mul_var(j).truncated(order);
        let term = &xw * &x.unit_factor(j).truncated(order);
        acc = &acc + &term.scale(&x.lambda[j]);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series_core::forms::d_of_function;

    #[test]
    fn rejects_degenerate_fields() {
        let zero = || TruncatedSeries3::zero(3);
        let l = [1, 0, -3].map(GaussianRational::from_int);
        assert_eq!(VectorFieldGerm::new(l, [zero(), zero(), zero()]), Err(SeriesError::ZeroEigenvalue { index: 1 }));
        let l = [1, 2, -3].map(GaussianRational::from_int);
        let bad = TruncatedSeries3::one(3);
        assert_eq!(VectorFieldGerm::new(l, [zero(), bad, zero()]), Err(SeriesError::NotInMaximalIdeal { index: 1 }));
    }

    #[test]
    fn contraction_with_dz() {
        let x = VectorFieldGerm::linear_int([1, 2, -3], 3).unwrap();
        let got = contract(&x, &OneForm3::basis(2, 3));
        assert_eq!(got, TruncatedSeries3::var(2, 3).scale(&GaussianRational::from_int(-3)));
    }

    #[test]
    fn contraction_of_resonant_monomial_vanishes() {
        let x = VectorFieldGerm::linear_int([1, 2, -3], 6).unwrap();
        let f = TruncatedSeries3::monomial(MultiIndex([1, 1, 1]), GaussianRational::one(), 6);
        assert!(contract(&x, &d_of_function(&f)).is_zero());
        let g = TruncatedSeries3::monomial(MultiIndex([1, 1, 0]), GaussianRational::one(), 6);
        // (λ·N) x^N = 3xy
        assert_eq!(contract(&x, &d_of_function(&g)), g.scale(&GaussianRational::from_int(3)));
    }

    #[test]
    fn components_round_trip() {
        let a1 = TruncatedSeries3::var(2, 4);
        let a2 = TruncatedSeries3::monomial(MultiIndex([1, 1, 0]), GaussianRational::from_ratio(1, 2), 4);
        let x = VectorFieldGerm::new([1, 2, -3].map(GaussianRational::from_int), [a1, a2, TruncatedSeries3::zero(4)]).unwrap();
        let comps = [0, 1, 2].map(|j| x.component(j));
        assert_eq!(VectorFieldGerm::from_components(comps).unwrap(), x);
    }

    #[test]
    fn components_must_preserve_planes() {
        let x1 = TruncatedSeries3::var(0, 3);
        let x2 = &TruncatedSeries3::var(1, 3) + &TruncatedSeries3::var(0, 3);
        let x3 = TruncatedSeries3::var(2, 3);
        assert_eq!(VectorFieldGerm::from_components([x1, x2, x3]), Err(SeriesError::NonInvariantPlane { index: 1 }));
    }
}
