//! Eigenvalue combinatorics: condition (⋆), resonance lattices, the integer
//! direction `(m, n, −k)` of an integrable first jet, monomial first
//! integrals and adapted meromorphic invariants.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series_core::{
    contract, d_of_function, wedge, GaussianRational, MultiIndex, MultiIndex3, Saturate, SeriesError, TruncatedSeries3,
    VectorFieldGerm,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ResonanceError {
    #[error("eigenvalue {index} is zero")]
    ZeroEigenvalue { index: usize },
    #[error("exponent vectors are linearly dependent")]
    Rank,
    #[error("exponent vectors are not resonant for the given eigenvalues")]
    Inconsistent,
    #[error("both exponents vanish on the distinguished axis")]
    Degenerate,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

fn check_nonzero(lambda: &[GaussianRational; 3]) -> Result<(), ResonanceError> {
    match lambda.iter().position(|l| l.is_zero()) {
        Some(index) => Err(ResonanceError::ZeroEigenvalue { index }),
        None => Ok(()),
    }
}

/// Outcome of condition (⋆) on an eigenvalue triple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarReport {
    pub holds: bool,
    /// A nonzero point of the common real line, read as `(re, im)` in ℝ².
    /// Zero when the condition fails.
    pub line_direction: GaussianRational,
    pub distinguished_index: Option<usize>,
    pub distinguished_value: Option<GaussianRational>,
}

/// Condition (⋆): the eigenvalues lie on one real line through 0 and exactly
/// one of them sits on its own side of 0.
pub fn check_star(lambda: &[GaussianRational; 3]) -> Result<StarReport, ResonanceError> {
    check_nonzero(lambda)?;
    let fail = StarReport {
        holds: false,
        line_direction: GaussianRational::zero(),
        distinguished_index: None,
        distinguished_value: None,
    };
    let collinear = (0..3).all(|i| (i + 1..3).all(|j| lambda[i].cross(&lambda[j]).is_zero()));
    if !collinear {
        return Ok(fail);
    }
    let positive: Vec<bool> = lambda
        .iter()
        .map(|l| l.real_ratio(&lambda[0]).expect("collinear and nonzero").is_positive())
        .collect();
    let same_as_first = positive.iter().filter(|&&p| p).count();
    let minority = match same_as_first {
        1 => 0,
        2 => positive.iter().position(|&p| !p).expect("one opposite sign"),
        _ => return Ok(fail),
    };
    let majority = (0..3).find(|&j| positive[j] != positive[minority]).expect("two majority slots");
    Ok(StarReport {
        holds: true,
        line_direction: lambda[majority].clone(),
        distinguished_index: Some(minority),
        distinguished_value: Some(lambda[minority].clone()),
    })
}

/// `(λ₁, λ₂, λ₃) = unit · σ(m, n, −k)` with `m, n, k > 0` and
/// `gcd(m, n, k) = 1`. Slot `s` of `(m, n, −k)` is original slot
/// `permutation[s]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerDirection {
    pub m: i64,
    pub n: i64,
    pub k: i64,
    pub unit: GaussianRational,
    pub permutation: [usize; 3],
}

impl IntegerDirection {
    /// Canonicalizes a signed integer triple with a two-against-one sign
    /// split. Positive slots keep their relative order; the minority goes last.
    fn from_signed(mut t: [i64; 3], mut unit: GaussianRational) -> Option<Self> {
        if t.contains(&0) {
            return None;
        }
        let g = t.iter().fold(0i64, |g, &v| g.gcd(&v));
        t = t.map(|v| v / g);
        unit = unit * GaussianRational::from_int(g);
        let negatives = t.iter().filter(|&&v| v < 0).count();
        match negatives {
            1 => {}
            2 => {
                t = t.map(|v| -v);
                unit = -unit;
            }
            _ => return None,
        }
        let mut permutation = [0usize; 3];
        let mut s = 0;
        for (j, &v) in t.iter().enumerate() {
            if v > 0 {
                permutation[s] = j;
                s += 1;
            } else {
                permutation[2] = j;
            }
        }
        Some(Self { m: t[permutation[0]], n: t[permutation[1]], k: -t[permutation[2]], unit, permutation })
    }

    /// `(m, n, −k)` placed back in the original slots.
    pub fn signed_original(&self) -> [i64; 3] {
        let mut out = [0; 3];
        for (s, v) in [self.m, self.n, -self.k].into_iter().enumerate() {
            out[self.permutation[s]] = v;
        }
        out
    }

    /// `unit · σ(m, n, −k)`, equal to the eigenvalues this came from.
    pub fn eigenvalues(&self) -> [GaussianRational; 3] {
        self.signed_original().map(|v| GaussianRational::from_int(v) * &self.unit)
    }

    /// Original slot of the distinguished (negative) eigenvalue.
    pub fn distinguished_index(&self) -> usize {
        self.permutation[2]
    }

    /// The diagonal linear field with eigenvalues [`Self::eigenvalues`].
    pub fn linear_field(&self, order: u32) -> VectorFieldGerm {
        VectorFieldGerm::linear(self.eigenvalues(), order).expect("nonzero eigenvalues")
    }

    /// The diagonal linear field `m x ∂x + n y ∂y − k z ∂z` in permuted
    /// coordinates.
    pub fn normal_linear_field(&self, order: u32) -> VectorFieldGerm {
        VectorFieldGerm::linear_int([self.m, self.n, -self.k], order).expect("nonzero eigenvalues")
    }
}

/// The integer direction of the eigenvalues when they are a common multiple
/// of an integer triple with sign pattern `(+,+,−)` up to order. For
/// Gaussian-rational eigenvalues this holds exactly when condition (⋆) does.
pub fn first_jet_test(lambda: &[GaussianRational; 3]) -> Option<IntegerDirection> {
    if lambda.iter().any(|l| l.is_zero()) {
        return None;
    }
    let ratios: Vec<BigRational> = lambda.iter().map(|l| l.real_ratio(&lambda[0])).collect::<Option<_>>()?;
    let den = ratios.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let ints: Vec<BigInt> = ratios.iter().map(|r| (r * BigRational::from_integer(den.clone())).to_integer()).collect();
    let t = [ints[0].to_i64()?, ints[1].to_i64()?, ints[2].to_i64()?];
    // λ_j = λ₀ · t_j / den, so the unit is λ₀ / den before normalization.
    let unit = lambda[0].clone() / GaussianRational::from_real(BigRational::from_integer(den));
    IntegerDirection::from_signed(t, unit)
}

/// Permutes and rescales `X` so its eigenvalues are exactly `(m, n, −k)`.
/// Returns `None` when the first jet has no such direction.
pub fn normal_shape(x: &VectorFieldGerm) -> Option<(VectorFieldGerm, IntegerDirection)> {
    let dir = first_jet_test(x.lambda())?;
    let y = x.permuted(&dir.permutation).divided_by_constant(&dir.unit).ok()?;
    Some((y, dir))
}

fn dot(lambda: &[GaussianRational; 3], n: &MultiIndex3) -> GaussianRational {
    let mut acc = GaussianRational::zero();
    for (l, &e) in lambda.iter().zip(n.exponents().iter()) {
        acc += &(l.clone() * GaussianRational::from_int(e as i64));
    }
    acc
}

/// `λ · N`.
pub fn resonance_value(lambda: &[GaussianRational; 3], n: &MultiIndex3) -> GaussianRational {
    dot(lambda, n)
}

/// Integer rows of `Re(λ)·N = 0`, `Im(λ)·N = 0` after clearing denominators.
fn integer_rows(lambda: &[GaussianRational; 3]) -> Vec<[BigInt; 3]> {
    let parts: [Vec<&BigRational>; 2] = [lambda.iter().map(|l| l.re()).collect(), lambda.iter().map(|l| l.im()).collect()];
    parts
        .iter()
        .filter(|row| row.iter().any(|v| !v.is_zero()))
        .map(|row| {
            let den = row.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
            let d = BigRational::from_integer(den);
            std::array::from_fn(|j| (row[j] * &d).to_integer())
        })
        .collect()
}

fn cross_big(a: &[BigInt; 3], b: &[BigInt; 3]) -> [BigInt; 3] {
    [&a[1] * &b[2] - &a[2] * &b[1], &a[2] * &b[0] - &a[0] * &b[2], &a[0] * &b[1] - &a[1] * &b[0]]
}

/// All `N ∈ ℕ³ ∖ C₃` with `|N| ≤ degree_bound` and `λ · N = 0`, ascending.
pub fn enumerate_resonances(lambda: &[GaussianRational; 3], degree_bound: u32) -> Vec<MultiIndex3> {
    let rows = integer_rows(lambda);
    let bound = degree_bound as i64;
    let mut out = Vec::new();
    match rows.as_slice() {
        [] => {
            // λ = 0: every index resonates.
            out = MultiIndex3::up_to_degree(degree_bound);
        }
        [r] => solve_single_row(r, bound, &mut out),
        [r1, r2] => {
            let c = cross_big(r1, r2);
            if c.iter().all(|v| v.is_zero()) {
                solve_single_row(r1, bound, &mut out);
            } else {
                let g = c.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
                let mut ray: Vec<BigInt> = c.iter().map(|v| v / &g).collect();
                if ray.iter().all(|v| !v.is_positive()) {
                    ray = ray.into_iter().map(|v| -v).collect();
                }
                if ray.iter().all(|v| !v.is_negative()) {
                    let e: Option<Vec<u32>> = ray.iter().map(|v| v.to_u32()).collect();
                    if let Some(e) = e {
                        let base = MultiIndex([e[0], e[1], e[2]]);
                        let step = base.degree();
                        for t in 1..=degree_bound / step {
                            out.push(scale_index(&base, t));
                        }
                    }
                }
            }
        }
        _ => unreachable!("at most two equations"),
    }
    out.retain(|i| !i.on_axes());
    out.sort();
    out
}

fn scale_index(base: &MultiIndex3, t: u32) -> MultiIndex3 {
    MultiIndex(base.0.map(|e| e * t))
}

/// Nonnegative solutions of `r · N = 0` with `|N| ≤ bound`.
fn solve_single_row(r: &[BigInt; 3], bound: i64, out: &mut Vec<MultiIndex3>) {
    let pivot = (0..3).find(|&j| !r[j].is_zero()).expect("nonzero row");
    let others: Vec<usize> = (0..3).filter(|&j| j != pivot).collect();
    for a in 0..=bound {
        for b in 0..=(bound - a) {
            let rest = &r[others[0]] * BigInt::from(a) + &r[others[1]] * BigInt::from(b);
            let (q, rem) = (-rest).div_rem(&r[pivot]);
            if !rem.is_zero() || q.is_negative() {
                continue;
            }
            let Some(p) = q.to_i64() else { continue };
            if a + b + p > bound {
                continue;
            }
            let mut e = [0u32; 3];
            e[pivot] = p as u32;
            e[others[0]] = a as u32;
            e[others[1]] = b as u32;
            out.push(MultiIndex(e));
        }
    }
}

/// Rank of the integer span of a list of exponent vectors.
pub fn span_rank(indices: &[MultiIndex3]) -> usize {
    let rows: Vec<[i64; 3]> = indices.iter().map(|i| i.0.map(|e| e as i64)).collect();
    let nonzero: Vec<&[i64; 3]> = rows.iter().filter(|r| r.iter().any(|&v| v != 0)).collect();
    let Some(first) = nonzero.first() else { return 0 };
    let mut rank = 1;
    let mut plane: Option<[i64; 3]> = None;
    for r in &nonzero[1..] {
        let c = cross_i64(first, r);
        match plane {
            None if c != [0, 0, 0] => {
                rank = 2;
                plane = Some(c);
            }
            Some(normal) if r.iter().zip(normal.iter()).map(|(a, b)| a * b).sum::<i64>() != 0 => return 3,
            _ => {}
        }
    }
    rank
}

fn cross_i64(a: &[i64; 3], b: &[i64; 3]) -> [i64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Cross-product triple `(n₂m₃−n₃m₂, n₃m₁−n₁m₃, n₁m₂−n₂m₁)` of two
/// exponent vectors.
pub fn exponent_cross(n: &MultiIndex3, m: &MultiIndex3) -> [i64; 3] {
    cross_i64(&n.0.map(|e| e as i64), &m.0.map(|e| e as i64))
}

/// Recovers the integer direction of `λ` from two independent resonances.
pub fn preparation_direction(
    n: &MultiIndex3,
    m: &MultiIndex3,
    lambda: &[GaussianRational; 3],
) -> Result<IntegerDirection, ResonanceError> {
    check_nonzero(lambda)?;
    let c = exponent_cross(n, m);
    if c == [0, 0, 0] {
        return Err(ResonanceError::Rank);
    }
    if !dot(lambda, n).is_zero() || !dot(lambda, m).is_zero() {
        return Err(ResonanceError::Inconsistent);
    }
    // λ ∝ c; read the factor off any nonzero slot.
    let j = (0..3).find(|&j| c[j] != 0).expect("nonzero cross product");
    let unit = lambda[j].clone() / GaussianRational::from_int(c[j]);
    let proportional = (0..3).all(|s| GaussianRational::from_int(c[s]) * &unit == lambda[s]);
    if !proportional {
        return Err(ResonanceError::Inconsistent);
    }
    IntegerDirection::from_signed(c, unit).ok_or(ResonanceError::Inconsistent)
}

/// Exponents `N, M` of the first integral `F = (x^N, x^M)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub n: MultiIndex3,
    pub m: MultiIndex3,
}

impl ExponentPair {
    /// `(x^N, x^M)` as series truncated at `order`.
    pub fn as_series(&self, order: u32) -> [TruncatedSeries3; 2] {
        [self.n, self.m].map(|i| TruncatedSeries3::monomial(i, GaussianRational::one(), order))
    }

    /// Smallest order at which the pair and its differential are exact.
    pub fn natural_order(&self) -> u32 {
        self.n.degree() + self.m.degree()
    }
}

fn unpermute(perm: &[usize; 3], e: [u32; 3]) -> MultiIndex3 {
    let mut out = [0u32; 3];
    for s in 0..3 {
        out[perm[s]] = e[s];
    }
    MultiIndex(out)
}

/// `N = (k, 0, m)`, `M = (0, k, n)` in the `(m, n, −k)` coordinates, mapped
/// back to the original slots.
pub fn monomial_first_integral(dir: &IntegerDirection) -> ExponentPair {
    let (m, n, k) = (dir.m as u32, dir.n as u32, dir.k as u32);
    ExponentPair { n: unpermute(&dir.permutation, [k, 0, m]), m: unpermute(&dir.permutation, [0, k, n]) }
}

/// Whether `d(x^N) ∧ d(x^M)` is a nonzero 2-form after saturation.
pub fn check_transversal(n: &MultiIndex3, m: &MultiIndex3) -> bool {
    let order = n.degree() + m.degree();
    let f = TruncatedSeries3::monomial(*n, GaussianRational::one(), order);
    let g = TruncatedSeries3::monomial(*m, GaussianRational::one(), order);
    let w = wedge(&d_of_function(&f), &d_of_function(&g)).expect("equal orders");
    w.saturate().is_ok()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirstIntegralCheck {
    /// `(i_X df₁, i_X df₂)`.
    pub residuals: [TruncatedSeries3; 2],
    /// `df₁ ∧ df₂` is not identically zero to the available order.
    pub transversal: bool,
}

impl FirstIntegralCheck {
    pub fn is_first_integral(&self) -> bool {
        self.transversal && self.residuals.iter().all(|r| r.is_zero())
    }
}

pub fn verify_first_integral(x: &VectorFieldGerm, f: &[TruncatedSeries3; 2]) -> FirstIntegralCheck {
    let order = f[0].order().min(f[1].order());
    let df = f.clone().map(|s| d_of_function(&s.truncated(order)));
    let residuals = [contract(x, &df[0]), contract(x, &df[1])];
    let transversal = wedge(&df[0], &df[1]).expect("equal orders").saturate().is_ok();
    FirstIntegralCheck { residuals, transversal }
}

/// `x^E` written as `numerator / denominator`, with `E = q₃P − p₃Q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeromorphicInvariant {
    pub exponent: [i64; 3],
    pub adapted: bool,
    pub numerator: MultiIndex3,
    pub denominator: MultiIndex3,
}

impl MeromorphicInvariant {
    /// `i_X d(num) · den − num · i_X d(den)`, which vanishes exactly when
    /// `num / den` is invariant.
    pub fn quotient_rule_residual(&self, x: &VectorFieldGerm) -> TruncatedSeries3 {
        let order = x.order().max(self.numerator.degree() + self.denominator.degree());
        let x = extend_field(x, order);
        let num = TruncatedSeries3::monomial(self.numerator, GaussianRational::one(), order);
        let den = TruncatedSeries3::monomial(self.denominator, GaussianRational::one(), order);
        let a = contract(&x, &d_of_function(&num));
        let b = contract(&x, &d_of_function(&den));
        let o = a.order();
        &(&a * &den.truncated(o)) - &(&num.truncated(o) * &b)
    }
}

fn extend_field(x: &VectorFieldGerm, order: u32) -> VectorFieldGerm {
    if x.order() >= order {
        return x.clone();
    }
    let a = x.a().clone().map(|s| s.polynomial_with_order(order));
    VectorFieldGerm::new(x.lambda().clone(), a).expect("same shape")
}

/// Adapted invariant from two resonant exponents, adapted to the
/// distinguished axis of `dir`.
pub fn meromorphic_invariant(
    p: &MultiIndex3,
    q: &MultiIndex3,
    dir: &IntegerDirection,
) -> Result<MeromorphicInvariant, ResonanceError> {
    let w = dir.signed_original();
    if p.dot(&w) != 0 || q.dot(&w) != 0 {
        return Err(ResonanceError::Inconsistent);
    }
    let axis = dir.distinguished_index();
    let (p3, q3) = (p.get(axis) as i64, q.get(axis) as i64);
    if p3 == 0 && q3 == 0 {
        return Err(ResonanceError::Degenerate);
    }
    if exponent_cross(p, q) == [0, 0, 0] {
        return Err(ResonanceError::Rank);
    }
    let exponent: [i64; 3] = std::array::from_fn(|j| q3 * p.get(j) as i64 - p3 * q.get(j) as i64);
    let (s1, s2) = (dir.permutation[0], dir.permutation[1]);
    let adapted = exponent[s1] * exponent[s2] < 0;
    let numerator = MultiIndex(exponent.map(|e| e.max(0) as u32));
    let denominator = MultiIndex(exponent.map(|e| (-e).max(0) as u32));
    Ok(MeromorphicInvariant { exponent, adapted, numerator, denominator })
}
