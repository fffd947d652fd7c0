//! Differential forms with truncated-series coefficients on (ℂ³,0) and (ℂ²,0).

use serde::{Deserialize, Serialize};

use super::error::SeriesError;
use super::index::MultiIndex;
use super::series::{TruncatedSeries, TruncatedSeries2, TruncatedSeries3};

/// `ω = P dx + Q dy + R dz`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneForm3 {
    pub p: TruncatedSeries3,
    pub q: TruncatedSeries3,
    pub r: TruncatedSeries3,
}

/// `c12 dx∧dy + c13 dx∧dz + c23 dy∧dz`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoForm3 {
    pub c12: TruncatedSeries3,
    pub c13: TruncatedSeries3,
    pub c23: TruncatedSeries3,
}

/// `ω = d1 dv₁ + d2 dv₂` in chart coordinates `(v₁, v₂)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneForm2 {
    pub d1: TruncatedSeries2,
    pub d2: TruncatedSeries2,
}

fn same_order<const N: usize>(parts: &[&TruncatedSeries<N>]) -> Result<u32, SeriesError> {
    let first = parts[0].order();
    for s in &parts[1..] {
        if s.order() != first {
            return Err(SeriesError::OrderMismatch { lhs: first, rhs: s.order() });
        }
    }
    Ok(first)
}

impl OneForm3 {
    pub fn new(p: TruncatedSeries3, q: TruncatedSeries3, r: TruncatedSeries3) -> Result<Self, SeriesError> {
        same_order(&[&p, &q, &r])?;
        Ok(Self { p, q, r })
    }

    pub fn zero(order: u32) -> Self {
        Self { p: TruncatedSeries3::zero(order), q: TruncatedSeries3::zero(order), r: TruncatedSeries3::zero(order) }
    }

    /// `dx_var`.
    pub fn basis(var: usize, order: u32) -> Self {
        let mut w = Self::zero(order);
        *w.component_mut(var) = TruncatedSeries3::one(order);
        w
    }

    pub fn order(&self) -> u32 {
        self.p.order()
    }

    pub fn components(&self) -> [&TruncatedSeries3; 3] {
        [&self.p, &self.q, &self.r]
    }

    pub fn component_mut(&mut self, var: usize) -> &mut TruncatedSeries3 {
        match var {
            0 => &mut self.p,
            1 => &mut self.q,
            2 => &mut self.r,
            _ => panic!("variable index {var} out of range"),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(|s| s.is_zero())
    }

    pub fn truncated(&self, order: u32) -> Self {
        Self { p: self.p.truncated(order), q: self.q.truncated(order), r: self.r.truncated(order) }
    }

    pub fn scale_by(&self, f: &TruncatedSeries3) -> Result<Self, SeriesError> {
        Ok(Self { p: self.p.checked_mul(f)?, q: self.q.checked_mul(f)?, r: self.r.checked_mul(f)? })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, SeriesError> {
        Ok(Self { p: self.p.checked_add(&other.p)?, q: self.q.checked_add(&other.q)?, r: self.r.checked_add(&other.r)? })
    }
}

impl TwoForm3 {
    pub fn zero(order: u32) -> Self {
        Self { c12: TruncatedSeries3::zero(order), c13: TruncatedSeries3::zero(order), c23: TruncatedSeries3::zero(order) }
    }

    pub fn order(&self) -> u32 {
        self.c12.order()
    }

    pub fn components(&self) -> [&TruncatedSeries3; 3] {
        [&self.c12, &self.c13, &self.c23]
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(|s| s.is_zero())
    }

    pub fn truncated(&self, order: u32) -> Self {
        Self { c12: self.c12.truncated(order), c13: self.c13.truncated(order), c23: self.c23.truncated(order) }
    }
}

impl OneForm2 {
    pub fn new(d1: TruncatedSeries2, d2: TruncatedSeries2) -> Result<Self, SeriesError> {
        same_order(&[&d1, &d2])?;
        Ok(Self { d1, d2 })
    }

    pub fn order(&self) -> u32 {
        self.d1.order()
    }

    pub fn is_zero(&self) -> bool {
        self.d1.is_zero() && self.d2.is_zero()
    }
}

/// `df = f_x dx + f_y dy + f_z dz`; each coefficient is known to `order − 1`.
pub fn d_of_function(f: &TruncatedSeries3) -> OneForm3 {
    OneForm3 { p: f.partial(0), q: f.partial(1), r: f.partial(2) }
}

/// `dω` with `c12 = Q_x − P_y`, `c13 = R_x − P_z`, `c23 = R_y − Q_z`.
pub fn exterior_derivative(w: &OneForm3) -> TwoForm3 {
    TwoForm3 {
        c12: &w.q.partial(0) - &w.p.partial(1),
        c13: &w.r.partial(0) - &w.p.partial(2),
        c23: &w.r.partial(1) - &w.q.partial(2),
    }
}

/// `a ∧ b`.
pub fn wedge(a: &OneForm3, b: &OneForm3) -> Result<TwoForm3, SeriesError> {
    same_order(&[&a.p, &b.p])?;
    Ok(TwoForm3 {
        c12: &(&a.p * &b.q) - &(&a.q * &b.p),
        c13: &(&a.p * &b.r) - &(&a.r * &b.p),
        c23: &(&a.q * &b.r) - &(&a.r * &b.q),
    })
}

/// Coefficient of `dx∧dy∧dz` in `a ∧ B`, namely `P·c23 − Q·c13 + R·c12`.
pub fn wedge13(a: &OneForm3, b: &TwoForm3) -> Result<TruncatedSeries3, SeriesError> {
    same_order(&[&a.p, &b.c12])?;
    Ok(&(&(&a.p * &b.c23) - &(&a.q * &b.c13)) + &(&a.r * &b.c12))
}

/// Removal of the largest monomial factor common to all coefficients.
pub trait Saturate: Sized {
    type Index;

    /// Returns `(J, ω / x^J)` where the quotient's coefficients have no common
    /// monomial divisor.
    fn saturate(&self) -> Result<(Self::Index, Self), SeriesError>;
}

fn common_monomial<'a, const N: usize, I>(parts: I) -> Option<MultiIndex<N>>
where
    I: IntoIterator<Item = &'a TruncatedSeries<N>>,
{
    parts.into_iter().flat_map(|s| s.terms().map(|(i, _)| *i)).reduce(|a, b| a.meet(&b))
}

fn divide_all<const N: usize, const K: usize>(parts: [&TruncatedSeries<N>; K], j: &MultiIndex<N>) -> [TruncatedSeries<N>; K] {
    parts.map(|s| {
        if s.is_zero() {
            TruncatedSeries::zero(s.order().saturating_sub(j.degree()))
        } else {
            s.div_monomial(j).expect("common monomial divides every coefficient")
        }
    })
}

impl Saturate for OneForm3 {
    type Index = MultiIndex<3>;

    fn saturate(&self) -> Result<(MultiIndex<3>, Self), SeriesError> {
        let j = common_monomial(self.components()).ok_or(SeriesError::DegenerateInput)?;
        let [p, q, r] = divide_all(self.components(), &j);
        Ok((j, Self { p, q, r }))
    }
}

impl Saturate for TwoForm3 {
    type Index = MultiIndex<3>;

    fn saturate(&self) -> Result<(MultiIndex<3>, Self), SeriesError> {
        let j = common_monomial(self.components()).ok_or(SeriesError::DegenerateInput)?;
        let [c12, c13, c23] = divide_all(self.components(), &j);
        Ok((j, Self { c12, c13, c23 }))
    }
}

impl Saturate for OneForm2 {
    type Index = MultiIndex<2>;

    fn saturate(&self) -> Result<(MultiIndex<2>, Self), SeriesError> {
        let j = common_monomial([&self.d1, &self.d2]).ok_or(SeriesError::DegenerateInput)?;
        let [d1, d2] = divide_all([&self.d1, &self.d2], &j);
        Ok((j, Self { d1, d2 }))
    }
}
