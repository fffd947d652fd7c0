use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::error::SeriesError;
use super::gaussian::GaussianRational;
use super::index::MultiIndex;

/// A formal power series in `N` variables known modulo terms of total degree
/// `> order`. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncatedSeries<const N: usize> {
    order: u32,
    terms: BTreeMap<MultiIndex<N>, GaussianRational>,
}

pub type TruncatedSeries3 = TruncatedSeries<3>;
pub type TruncatedSeries2 = TruncatedSeries<2>;

impl<const N: usize> TruncatedSeries<N> {
    pub fn zero(order: u32) -> Self {
        Self { order, terms: BTreeMap::new() }
    }

    pub fn one(order: u32) -> Self {
        Self::constant(GaussianRational::one(), order)
    }

    pub fn constant(c: GaussianRational, order: u32) -> Self {
        Self::monomial(MultiIndex::zero(), c, order)
    }

    /// `c·x^index`, or zero if `|index| > order`.
    pub fn monomial(index: MultiIndex<N>, c: GaussianRational, order: u32) -> Self {
        let mut s = Self::zero(order);
        s.add_term(index, c);
        s
    }

    /// The coordinate function `x_var`.
    pub fn var(var: usize, order: u32) -> Self {
        Self::monomial(MultiIndex::unit(var), GaussianRational::one(), order)
    }

    /// Builds from arbitrary terms, summing duplicates and dropping those of
    /// degree above `order`.
    pub fn from_terms<I>(order: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex<N>, GaussianRational)>,
    {
        let mut s = Self::zero(order);
        for (idx, c) in terms {
            s.add_term(idx, c);
        }
        s
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex<N>, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, index: &MultiIndex<N>) -> GaussianRational {
        self.terms.get(index).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.coeff(&MultiIndex::zero())
    }

    /// Membership in the maximal ideal `𝓜_N`.
    pub fn in_maximal_ideal(&self) -> bool {
        !self.terms.contains_key(&MultiIndex::zero())
    }

    pub fn is_unit(&self) -> bool {
        !self.in_maximal_ideal()
    }

    /// Smallest total degree of a stored term.
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().next().map(|i| i.degree())
    }

    /// Smallest exponent of `x_var` among the stored terms.
    pub fn valuation_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|i| i.get(var)).min()
    }

    /// Adds `c·x^index` in place; ignored when `|index| > order`.
    pub fn add_term(&mut self, index: MultiIndex<N>, c: GaussianRational) {
        if c.is_zero() || index.degree() > self.order {
            return;
        }
        match self.terms.entry(index) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// The homogeneous component of degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        let terms = self.terms.iter().filter(|(i, _)| i.degree() == d).map(|(i, c)| (*i, c.clone()));
        Self::from_terms(self.order, terms)
    }

    /// Drops terms above degree `order`. Truncation can only lower the order.
    pub fn truncated(&self, order: u32) -> Self {
        let order = order.min(self.order);
        let terms = self.terms.iter().filter(|(i, _)| i.degree() <= order).map(|(i, c)| (*i, c.clone()));
        Self { order, terms: terms.collect() }
    }

    /// Reads the stored terms as an exact polynomial and relabels it with a
    /// (possibly larger) truncation order. Only valid when the caller knows
    /// the series has no terms between the two orders.
    pub fn polynomial_with_order(&self, order: u32) -> Self {
        Self::from_terms(order, self.terms.iter().map(|(i, c)| (*i, c.clone())))
    }

    fn check_orders(&self, rhs: &Self) -> Result<(), SeriesError> {
        if self.order == rhs.order {
            Ok(())
        } else {
            Err(SeriesError::OrderMismatch { lhs: self.order, rhs: rhs.order })
        }
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, SeriesError> {
        self.check_orders(rhs)?;
        let mut out = self.clone();
        for (i, c) in &rhs.terms {
            out.add_term(*i, c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self, SeriesError> {
        self.check_orders(rhs)?;
        let mut out = self.clone();
        for (i, c) in &rhs.terms {
            out.add_term(*i, -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, SeriesError> {
        self.check_orders(rhs)?;
        Ok(self.mul_unchecked(rhs, self.order))
    }

    /// Product truncated at `order` without checking the operands' orders.
    fn mul_unchecked(&self, rhs: &Self, order: u32) -> Self {
        let mut out = Self::zero(order);
        for (i, a) in &self.terms {
            let di = i.degree();
            if di > order {
                continue;
            }
            for (j, b) in &rhs.terms {
                if di + j.degree() > order {
                    continue;
                }
                out.add_term(i.add(j), a * b);
            }
        }
        out
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.order);
        }
        Self { order: self.order, terms: self.terms.iter().map(|(i, v)| (*i, v * c)).collect() }
    }

    /// Multiplies by the monomial `x^index`. The result is known to order
    /// `order + |index|`.
    pub fn shift(&self, index: &MultiIndex<N>) -> Self {
        let order = self.order.saturating_add(index.degree());
        Self { order, terms: self.terms.iter().map(|(i, c)| (i.add(index), c.clone())).collect() }
    }

    /// Multiplies by `x_var`, raising the order by one.
    pub fn mul_var(&self, var: usize) -> Self {
        self.shift(&MultiIndex::unit(var))
    }

    /// Divides by `x^index` if it divides every stored term; the order drops
    /// by `|index|`.
    pub fn div_monomial(&self, index: &MultiIndex<N>) -> Option<Self> {
        let order = self.order.checked_sub(index.degree())?;
        let mut terms = BTreeMap::new();
        for (i, c) in &self.terms {
            terms.insert(i.checked_sub(index)?, c.clone());
        }
        Some(Self { order, terms })
    }

    /// `∂f/∂x_var`. The coefficient of `x^{N−e_var}` is `n_var·a_N`; the
    /// result is known to order `order − 1` (saturating at 0).
    pub fn partial(&self, var: usize) -> Self {
        let order = self.order.saturating_sub(1);
        let mut out = Self::zero(order);
        for (i, c) in &self.terms {
            let e = i.get(var);
            if e == 0 {
                continue;
            }
            let mut j = i.0;
            j[var] -= 1;
            out.add_term(MultiIndex(j), c * GaussianRational::from_int(e as i64));
        }
        out
    }

    /// The Euler-type operator `x_var·∂f/∂x_var`, which preserves the order.
    pub fn euler(&self, var: usize) -> Self {
        let mut out = Self::zero(self.order);
        for (i, c) in &self.terms {
            let e = i.get(var);
            if e != 0 {
                out.add_term(*i, c * GaussianRational::from_int(e as i64));
            }
        }
        out
    }

    /// Multiplicative inverse of a unit, exact up to the truncation order.
    pub fn invert_unit(&self) -> Result<Self, SeriesError> {
        let u0 = self.constant_term();
        let inv0 = u0.inv().ok_or(SeriesError::NonUnit)?;
        // v = u0⁻¹·(1 + t)⁻¹ with t = u/u0 − 1 ∈ 𝓜; (1+t)⁻¹ = Σ (−t)^j,
        // and t^j vanishes beyond j = order.
        let mut t = self.scale(&inv0);
        t.add_term(MultiIndex::zero(), -GaussianRational::one());
        let neg_t = -&t;
        let mut acc = Self::one(self.order);
        let mut power = Self::one(self.order);
        for _ in 0..self.order {
            power = power.mul_unchecked(&neg_t, self.order);
            if power.is_zero() {
                break;
            }
            acc = &acc + &power;
        }
        Ok(acc.scale(&inv0))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.order);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base, self.order);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base, self.order);
            }
        }
        acc
    }

    /// Composition `f(images)` truncated at `target_order`.
    ///
    /// Every image must lie in the maximal ideal so that truncated input
    /// determines the output. The result order is the smallest of
    /// `target_order`, the order of `self`, and the image orders.
    pub fn substitute<const M: usize>(
        &self,
        images: &[TruncatedSeries<M>; N],
        target_order: u32,
    ) -> Result<TruncatedSeries<M>, SeriesError> {
        if let Some(var) = images.iter().position(|s| !s.in_maximal_ideal()) {
            return Err(SeriesError::InvalidSubstitution { var });
        }
        let order = images.iter().map(|s| s.order).fold(target_order.min(self.order), u32::min);
        let images: Vec<TruncatedSeries<M>> = images.iter().map(|s| s.polynomial_with_order(order)).collect();
        // Cache powers per variable.
        let mut powers: Vec<Vec<TruncatedSeries<M>>> = images.iter().map(|s| vec![TruncatedSeries::one(order), s.clone()]).collect();
        let mut out = TruncatedSeries::zero(order);
        for (idx, c) in &self.terms {
            if idx.degree() > order {
                continue;
            }
            let mut term = TruncatedSeries::constant(c.clone(), order);
            for var in 0..N {
                let e = idx.get(var) as usize;
                if e == 0 {
                    continue;
                }
                while powers[var].len() <= e {
                    let next = powers[var].last().unwrap().mul_unchecked(&images[var], order);
                    powers[var].push(next);
                }
                term = term.mul_unchecked(&powers[var][e], order);
                if term.is_zero() {
                    break;
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Renames variables: variable `j` of the output is variable `perm[j]`
    /// of the input.
    pub fn permute_variables(&self, perm: &[usize; N]) -> Self {
        let terms = self.terms.iter().map(|(i, c)| {
            let mut e = [0u32; N];
            for (j, slot) in e.iter_mut().enumerate() {
                *slot = i.get(perm[j]);
            }
            (MultiIndex(e), c.clone())
        });
        Self::from_terms(self.order, terms)
    }

    /// Replaces `x_var` by the constant `value`, reading the stored terms as a
    /// polynomial. The result keeps `self.order` and still has `N` variables
    /// (with `x_var` absent).
    pub fn evaluate_var(&self, var: usize, value: &GaussianRational) -> Self {
        let mut out = Self::zero(self.order);
        for (i, c) in &self.terms {
            let e = i.get(var);
            let mut j = i.0;
            j[var] = 0;
            out.add_term(MultiIndex(j), c * value.pow(e));
        }
        out
    }

    /// Exact polynomial translation `x_var ↦ x_var + shift` of the stored
    /// terms, relabelled with `order`.
    pub fn translate_var(&self, var: usize, shift: &GaussianRational, order: u32) -> Self {
        let mut out = Self::zero(u32::MAX);
        for (i, c) in &self.terms {
            let e = i.get(var);
            // (x + s)^e = Σ C(e, r) s^{e−r} x^r
            let mut binom = GaussianRational::one();
            for r in (0..=e).rev() {
                let mut j = i.0;
                j[var] = r;
                out.add_term(MultiIndex(j), c * &binom * shift.pow(e - r));
                if r > 0 {
                    // C(e, r−1) = C(e, r)·r/(e−r+1)
                    binom = &binom * GaussianRational::from_ratio(r as i64, (e - r + 1) as i64);
                }
            }
        }
        out.truncated(order)
    }

    /// Evaluates at a point with exact coefficients.
    pub fn eval(&self, point: &[GaussianRational; N]) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for (i, c) in &self.terms {
            let mut t = c.clone();
            for (var, x) in point.iter().enumerate() {
                let e = i.get(var);
                if e > 0 {
                    t = &t * &x.pow(e);
                }
            }
            acc += &t;
        }
        acc
    }
}

impl<const N: usize> Add<&TruncatedSeries<N>> for &TruncatedSeries<N> {
    type Output = TruncatedSeries<N>;
    /// Panics on mismatched orders; see [`TruncatedSeries::checked_add`].
    fn add(self, rhs: &TruncatedSeries<N>) -> TruncatedSeries<N> {
        self.checked_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<const N: usize> Sub<&TruncatedSeries<N>> for &TruncatedSeries<N> {
    type Output = TruncatedSeries<N>;
    fn sub(self, rhs: &TruncatedSeries<N>) -> TruncatedSeries<N> {
        self.checked_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<const N: usize> Mul<&TruncatedSeries<N>> for &TruncatedSeries<N> {
    type Output = TruncatedSeries<N>;
    fn mul(self, rhs: &TruncatedSeries<N>) -> TruncatedSeries<N> {
        self.checked_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<const N: usize> Neg for &TruncatedSeries<N> {
    type Output = TruncatedSeries<N>;
    fn neg(self) -> TruncatedSeries<N> {
        TruncatedSeries { order: self.order, terms: self.terms.iter().map(|(i, c)| (*i, -c)).collect() }
    }
}

impl<const N: usize> Neg for TruncatedSeries<N> {
    type Output = TruncatedSeries<N>;
    fn neg(self) -> TruncatedSeries<N> {
        -&self
    }
}

impl<const N: usize> fmt::Display for TruncatedSeries<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        super::text::write_series(f, self)
    }
}

impl<const N: usize> fmt::Debug for TruncatedSeries<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O({})", self, self.order + 1)
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    order: u32,
    text: String,
}

impl<const N: usize> Serialize for TruncatedSeries<N> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SeriesRepr { order: self.order, text: self.to_string() }.serialize(serializer)
    }
}

impl<'de, const N: usize> Deserialize<'de> for TruncatedSeries<N> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = SeriesRepr::deserialize(deserializer)?;
        super::text::parse_series::<N>(&repr.text, repr.order).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series_core::text::parse_series;
    use crate::series_core::{d_of_function, exterior_derivative, wedge, OneForm3, Saturate};
    use crate::testing;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s2(src: &str, order: u32) -> TruncatedSeries2 {
        parse_series::<2>(src, order).unwrap()
    }

    fn s3(src: &str, order: u32) -> TruncatedSeries3 {
        parse_series::<3>(src, order).unwrap()
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(&s2("x + y", 3) * &s2("x - y", 3), s2("x^2 - y^2", 3));
        assert_eq!(&s2("1 + x", 3) * &s2("1 - x + x^2 - x^3", 3), TruncatedSeries2::one(3));
        let f = s3("1 + x*y - 2/3*z^2", 4);
        assert!((&f * &TruncatedSeries3::zero(4)).is_zero());
        assert_eq!(s2("x + y", 3).checked_mul(&s2("x", 2)), Err(SeriesError::OrderMismatch { lhs: 3, rhs: 2 }));
    }

    #[test]
    fn unit_inverse_examples() {
        assert_eq!(s3("1 + z", 2).invert_unit().unwrap(), s3("1 - z + z^2", 2));
        assert_eq!(TruncatedSeries3::constant(GaussianRational::from_int(2), 3).invert_unit().unwrap(), s3("1/2", 3));
        assert_eq!(s3("x", 3).invert_unit(), Err(SeriesError::NonUnit));
    }

    #[test]
    fn partial_examples() {
        assert_eq!(s3("x^2*y", 4).partial(0), s3("2*x*y", 3));
        assert!(s3("y^3*z", 5).partial(0).is_zero());
        assert_eq!(s3("x^2*y", 4).euler(0), s3("2*x^2*y", 4));
    }

    #[test]
    fn substitution_examples() {
        let t = [TruncatedSeries2::var(0, 3), (&TruncatedSeries2::var(0, 3) * &TruncatedSeries2::var(1, 3))];
        assert_eq!(s2("x*y", 3).substitute(&t, 3).unwrap(), s2("x^2*y", 3));
        let t2 = [TruncatedSeries2::var(0, 2), (&TruncatedSeries2::var(0, 2) * &TruncatedSeries2::var(1, 2))];
        assert_eq!(s2("1 + y", 2).substitute(&t2, 2).unwrap(), s2("1 + x*y", 2));
        let bad = [TruncatedSeries2::one(2), TruncatedSeries2::var(1, 2)];
        assert_eq!(s2("x", 2).substitute(&bad, 2), Err(SeriesError::InvalidSubstitution { var: 0 }));
    }

    #[test]
    fn stored_terms_respect_order() {
        let mut s = TruncatedSeries3::zero(2);
        s.add_term(MultiIndex([1, 1, 1]), GaussianRational::one());
        s.add_term(MultiIndex([1, 0, 0]), GaussianRational::one());
        s.add_term(MultiIndex([1, 0, 0]), -GaussianRational::one());
        assert!(s.is_zero());
        assert_eq!(s.num_terms(), 0);
        assert!(s3("x + y^2", 3).in_maximal_ideal());
        assert!(!s3("2 + y^2", 3).in_maximal_ideal());
        assert!(s3("2 + y^2", 3).is_unit());
    }

    #[test]
    fn translation_and_evaluation() {
        let f = s2("x^2*y - 3*x", 4);
        let g = f.translate_var(0, &GaussianRational::from_int(1), 4);
        // (x + 1)²y − 3(x + 1)
        assert_eq!(g, s2("x^2*y + 2*x*y + y - 3*x - 3", 4));
        let p = [GaussianRational::from_ratio(1, 2), GaussianRational::i()];
        let q = [&p[0] - &GaussianRational::from_int(1), p[1].clone()];
        assert_eq!(g.eval(&q), f.eval(&p));
        assert_eq!(s3("x*z + z^2", 3).evaluate_var(2, &GaussianRational::from_int(2)), s3("2*x + 4", 3));
    }

    fn arb3(seed: u64, order: u32) -> TruncatedSeries3 {
        testing::series(&mut ChaCha8Rng::seed_from_u64(seed), order, order, false)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn ring_axioms(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
            let (f, g, h) = (arb3(a, 4), arb3(b, 4), arb3(c, 4));
            prop_assert_eq!(&(&f + &g) + &h, &f + &(&g + &h));
            prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
            prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
            prop_assert_eq!(&f * &g, &g * &f);
            prop_assert!((&f - &f).is_zero());
            prop_assert_eq!(&f * &TruncatedSeries3::one(4), f.clone());
        }

        #[test]
        fn unit_times_inverse_is_one(a in any::<u64>()) {
            let mut u = arb3(a, 5);
            u.add_term(MultiIndex::zero(), GaussianRational::from_int(3));
            prop_assume!(u.is_unit());
            prop_assert_eq!(&u * &u.invert_unit().unwrap(), TruncatedSeries3::one(5));
        }

        #[test]
        fn mixed_partials_commute(a in any::<u64>()) {
            let f = arb3(a, 5);
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                prop_assert_eq!(f.partial(i).partial(j), f.partial(j).partial(i));
            }
        }

        #[test]
        fn d_squared_and_leibniz(a in any::<u64>(), b in any::<u64>()) {
            let (f, g) = (arb3(a, 5), arb3(b, 5));
            let ddf = exterior_derivative(&d_of_function(&f));
            prop_assert!(ddf.is_zero());
            let lhs = d_of_function(&(&f * &g));
            let (f4, g4) = (f.truncated(4), g.truncated(4));
            let rhs = d_of_function(&g).scale_by(&f4).unwrap().checked_add(&d_of_function(&f).scale_by(&g4).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn wedge_self_vanishes_and_saturate_idempotent(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
            let w = OneForm3::new(arb3(a, 4), arb3(b, 4), arb3(c, 4)).unwrap();
            prop_assert!(wedge(&w, &w).unwrap().is_zero());
            if let Ok((_, sat)) = w.saturate() {
                let (j, again) = sat.saturate().unwrap();
                prop_assert_eq!(j, MultiIndex::zero());
                prop_assert_eq!(again, sat);
            }
        }

        #[test]
        fn substitution_is_a_ring_map(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
            let (f, g) = (arb3(a, 4).truncated(4), arb3(b, 4).truncated(4));
            let mut rng = ChaCha8Rng::seed_from_u64(c);
            let images: [TruncatedSeries2; 3] = std::array::from_fn(|_| testing::series(&mut rng, 2, 4, true));
            let sub = |s: &TruncatedSeries3| s.substitute(&images, 4).unwrap();
            prop_assert_eq!(sub(&(&f * &g)), &sub(&f) * &sub(&g));
            prop_assert_eq!(sub(&(&f + &g)), &sub(&f) + &sub(&g));
        }

        #[test]
        fn print_parse_round_trip(a in any::<u64>()) {
            let f = arb3(a, 5);
            prop_assert_eq!(parse_series::<3>(&f.to_string(), 5).unwrap(), f);
        }
    }
}
