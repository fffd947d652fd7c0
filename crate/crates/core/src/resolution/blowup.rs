use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::germ::{ChartLabel, PlaneFoliationGerm};
use super::ResolutionError;
use crate::series_core::{GaussianRational, MultiIndex, TruncatedSeries2};

/// A point on the exceptional divisor together with the germ there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorPoint {
    pub chart: ChartLabel,
    /// Coordinates in the chart.
    pub center: [GaussianRational; 2],
    /// The transformed germ centred at `center`.
    pub germ: PlaneFoliationGerm,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Blowup {
    /// Algebraic multiplicity of the blown-up point.
    pub multiplicity: u32,
    /// Power of the divisor variable removed in each chart.
    pub divisor_power: [u32; 2],
    /// The exceptional divisor is not invariant.
    pub dicritical: bool,
    /// Transformed germs at each chart origin.
    pub charts: [PlaneFoliationGerm; 2],
    /// Singular points of the transformed foliation found on the divisor:
    /// chart-1 points at rational `t`, then the chart-2 origin.
    pub singular_points: Vec<DivisorPoint>,
    /// Degree of the divisor polynomial left after removing located roots.
    pub unlocated_roots: u32,
}

/// Pullback polynomial of one chart, before truncation. Coefficients with
/// divisor-degree at most `known` are exact.
struct ChartPullback {
    a: TruncatedSeries2,
    b: TruncatedSeries2,
    known: u32,
}

const UNBOUNDED: u32 = u32::MAX;

fn pullback(g: &PlaneFoliationGerm, chart: ChartLabel) -> Result<(ChartPullback, u32), ResolutionError> {
    let d = g.order();
    let big = UNBOUNDED;
    let x = TruncatedSeries2::var(0, big);
    let y = TruncatedSeries2::var(1, big);
    let images = match chart {
        ChartLabel::Chart1 => [x.clone(), &x * &y],
        ChartLabel::Chart2 => [&x * &y, y.clone()],
    };
    let sub = |s: &TruncatedSeries2| s.polynomial_with_order(big).substitute(&images, big).expect("images in the maximal ideal");
    let (a, b) = (sub(g.a()), sub(g.b()));
    // ω = A dv₂ + B dv₁.
    let (new_a, new_b) = match chart {
        // v₂ = x t: dv₂ = x dt + t dx
        ChartLabel::Chart1 => (a.mul_var(0), &a.mul_var(1) + &b),
        // v₁ = u y: dv₁ = u dy + y du
        ChartLabel::Chart2 => (&a + &b.mul_var(0), b.mul_var(1)),
    };
    let var = chart.divisor_var();
    let power = [&new_a, &new_b]
        .iter()
        .filter_map(|s| s.valuation_in(var))
        .min()
        .ok_or(ResolutionError::TruncationBudget)?;
    if power > d {
        return Err(ResolutionError::TruncationBudget);
    }
    let mut e = [0u32; 2];
    e[var] = power;
    let divide = |s: &TruncatedSeries2| -> TruncatedSeries2 {
        if s.is_zero() {
            s.clone()
        } else {
            s.div_monomial(&MultiIndex(e)).expect("common divisor power").polynomial_with_order(big)
        }
    };
    // Unknown input terms have degree > d and land at divisor-degree > d.
    let known = d - power;
    let keep = |s: TruncatedSeries2| {
        TruncatedSeries2::from_terms(big, s.terms().filter(|(i, _)| i.get(var) <= known).map(|(i, c)| (*i, c.clone())))
    };
    Ok((ChartPullback { a: keep(divide(&new_a)), b: keep(divide(&new_b)), known }, power))
}

impl ChartPullback {
    /// The transformed germ at `center`, truncated to the order its data
    /// determines.
    fn germ_at(&self, center: &[GaussianRational; 2], history: Vec<ChartLabel>) -> Result<PlaneFoliationGerm, ResolutionError> {
        let shift = |s: &TruncatedSeries2| {
            s.translate_var(0, &center[0], UNBOUNDED).translate_var(1, &center[1], self.known)
        };
        PlaneFoliationGerm::with_history(shift(&self.a), shift(&self.b), history)
    }

    /// Restriction of a coefficient to the divisor, as a polynomial in the
    /// other chart variable.
    fn on_divisor(s: &TruncatedSeries2, var: usize) -> Vec<GaussianRational> {
        let other = 1 - var;
        let mut coeffs = Vec::new();
        for (i, c) in s.terms() {
            if i.get(var) == 0 {
                let e = i.get(other) as usize;
                if coeffs.len() <= e {
                    coeffs.resize(e + 1, GaussianRational::zero());
                }
                coeffs[e] = c.clone();
            }
        }
        coeffs
    }
}

/// Point blow-up of the origin.
pub fn blowup_once(g: &PlaneFoliationGerm) -> Result<Blowup, ResolutionError> {
    if !g.is_singular_at_origin() {
        return Err(ResolutionError::NotSingular);
    }
    let multiplicity = g.multiplicity().ok_or(ResolutionError::TruncationBudget)?;
    let (p1, s1) = pullback(g, ChartLabel::Chart1)?;
    let (p2, s2) = pullback(g, ChartLabel::Chart2)?;
    if p1.known == 0 || p2.known == 0 {
        return Err(ResolutionError::TruncationBudget);
    }
    let dicritical = s1 > multiplicity;
    let history = |c: ChartLabel| {
        let mut h = g.chart_history().to_vec();
        h.push(c);
        h
    };
    let origin = [GaussianRational::zero(), GaussianRational::zero()];
    let charts = [p1.germ_at(&origin, history(ChartLabel::Chart1))?, p2.germ_at(&origin, history(ChartLabel::Chart2))?];

    let mut singular_points = Vec::new();
    let mut unlocated_roots = 0;
    if !dicritical {
        // The divisor x = 0 is invariant, so singular points are the zeros of
        // B restricted to it (together with those of A, which vanishes there).
        let a0 = ChartPullback::on_divisor(&p1.a, 0);
        let b0 = ChartPullback::on_divisor(&p1.b, 0);
        let (roots, rest) = common_rational_roots(&b0, &a0);
        unlocated_roots = rest;
        for t in roots {
            let center = [GaussianRational::zero(), GaussianRational::from_real(t)];
            singular_points.push(DivisorPoint { chart: ChartLabel::Chart1, germ: p1.germ_at(&center, history(ChartLabel::Chart1))?, center });
        }
        if charts[1].is_singular_at_origin() {
            singular_points.push(DivisorPoint { chart: ChartLabel::Chart2, center: origin, germ: charts[1].clone() });
        }
    }
    Ok(Blowup { multiplicity, divisor_power: [s1, s2], dicritical, charts, singular_points, unlocated_roots })
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn eval(p: &[BigRational], t: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * t + c)
}

/// Synthetic division by `(t − r)`.
fn deflate(p: &[BigRational], r: &BigRational) -> Vec<BigRational> {
    let n = p.len() - 1;
    let mut q = vec![BigRational::zero(); n];
    let mut carry = BigRational::zero();
    for i in (0..n).rev() {
        carry = &carry * r + &p[i + 1];
        q[i] = carry.clone();
    }
    q
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64()?;
    if n > 1_000_000_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Some(out)
}

/// Rational roots with multiplicity ignored; returns the roots and the
/// degree of what is left unexplained.
fn rational_roots(p: Vec<BigRational>) -> (Vec<BigRational>, u32) {
    let mut p = trim(p);
    let mut roots = Vec::new();
    if p.len() <= 1 {
        return (roots, 0);
    }
    if p[0].is_zero() {
        roots.push(BigRational::zero());
        while p.len() > 1 && p[0].is_zero() {
            p.remove(0);
        }
    }
    let den = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect();
    let (low, high) = (ints[0].clone(), ints[ints.len() - 1].clone());
    if let (Some(ps), Some(qs)) = (divisors(&low), divisors(&high)) {
        let mut candidates: Vec<BigRational> = Vec::new();
        for a in &ps {
            for b in &qs {
                for s in [1, -1] {
                    candidates.push(BigRational::new(a * BigInt::from(s), b.clone()));
                }
            }
        }
        candidates.sort();
        candidates.dedup();
        for r in candidates {
            if p.len() <= 1 {
                break;
            }
            if eval(&p, &r).is_zero() {
                roots.push(r.clone());
                while p.len() > 1 && eval(&p, &r).is_zero() {
                    p = deflate(&p, &r);
                }
            }
        }
    }
    roots.sort();
    (roots, (p.len() - 1) as u32)
}

/// Real rational `t` where both polynomials vanish. Gaussian coefficients
/// are split into real and imaginary parts.
fn common_rational_roots(p: &[GaussianRational], q: &[GaussianRational]) -> (Vec<BigRational>, u32) {
    let parts = |v: &[GaussianRational]| -> [Vec<BigRational>; 2] {
        [trim(v.iter().map(|c| c.re().clone()).collect()), trim(v.iter().map(|c| c.im().clone()).collect())]
    };
    let all: Vec<Vec<BigRational>> = parts(p).into_iter().chain(parts(q)).filter(|v| !v.is_empty()).collect();
    // Roots of the lowest-degree nonzero polynomial, filtered by the rest.
    let Some(base) = all.iter().min_by_key(|v| v.len()).cloned() else {
        return (Vec::new(), 0);
    };
    let (roots, rest) = rational_roots(base);
    let roots = roots.into_iter().filter(|r| all.iter().all(|v| eval(v, r).is_zero())).collect();
    (roots, rest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resolution::classify::{classify_origin, SingularityClass};
    use crate::series_core::text::parse_series;

    fn germ(a: &str, b: &str, order: u32) -> PlaneFoliationGerm {
        PlaneFoliationGerm::new(parse_series(a, order).unwrap(), parse_series(b, order).unwrap()).unwrap()
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn radial_blowup_is_dicritical() {
        let b = blowup_once(&PlaneFoliationGerm::omega_mn(1, 1, 4)).unwrap();
        assert!(b.dicritical);
        assert_eq!(b.divisor_power, [2, 2]);
        // x²dt saturates to dt.
        assert_eq!(b.charts[0].a(), &TruncatedSeries2::one(2));
        assert!(b.charts[0].b().is_zero());
        assert!(b.singular_points.is_empty());
    }

    #[test]
    fn omega_21_charts() {
        let b = blowup_once(&PlaneFoliationGerm::omega_mn(2, 1, 4)).unwrap();
        assert!(!b.dicritical);
        assert_eq!(b.multiplicity, 1);
        // chart 1: 2x dt + t dx
        assert_eq!(b.charts[0].a(), &parse_series::<2>("2*x", 3).unwrap());
        assert_eq!(b.charts[0].b(), &parse_series::<2>("y", 3).unwrap());
        // chart 2: u dy − y du, i.e. type (m − n, n) = (1, 1)
        assert_eq!(b.charts[1].a(), &parse_series::<2>("x", 3).unwrap());
        assert_eq!(b.charts[1].b(), &parse_series::<2>("-y", 3).unwrap());
        assert_eq!(b.singular_points.len(), 2);
        assert_eq!(classify_origin(&b.singular_points[0].germ), SingularityClass::REDUCED);
        assert_eq!(classify_origin(&b.singular_points[1].germ), SingularityClass::non_reduced(1, 1));
        assert_eq!(b.charts[0].order(), 3);
    }

    #[test]
    fn finds_rational_points_off_the_origin() {
        // ω = (2x + y) dy − 3y dx: on the divisor t(2 + t) − 3t = t(t − 1).
        let b = blowup_once(&germ("2*x + y", "-3*y", 4)).unwrap();
        assert!(!b.dicritical);
        assert_eq!(b.unlocated_roots, 0);
        let centers: Vec<_> = b.singular_points.iter().map(|p| (p.chart, p.center[1].clone())).collect();
        assert_eq!(centers, vec![(ChartLabel::Chart1, GaussianRational::zero()), (ChartLabel::Chart1, GaussianRational::one())]);
        assert_eq!(classify_origin(&b.singular_points[0].germ), SingularityClass::non_reduced(2, 1));
        assert_eq!(classify_origin(&b.singular_points[1].germ), SingularityClass::REDUCED);
        // ω = (x + y) dy − (2x + y) dx gives t² − 2 on the divisor.
        let b = blowup_once(&germ("x + y", "-2*x - y", 4)).unwrap();
        assert!(b.singular_points.is_empty());
        assert_eq!(b.unlocated_roots, 2);
    }

    #[test]
    fn root_finder() {
        // (t − 1/2)(t + 3) t² (t² + 1)
        let p = vec![q(0, 1), q(0, 1), q(-3, 2), q(5, 2), q(-1, 2), q(5, 2), q(1, 1)];
        let (roots, rest) = rational_roots(p);
        assert_eq!(roots, vec![q(-3, 1), q(0, 1), q(1, 2)]);
        assert_eq!(rest, 2);
    }

    #[test]
    fn regular_point_rejected() {
        assert_eq!(blowup_once(&germ("1 + x", "y", 3)), Err(ResolutionError::NotSingular));
    }

    #[test]
    fn budget_checked() {
        assert_eq!(blowup_once(&PlaneFoliationGerm::omega_mn(1, 1, 2)), Err(ResolutionError::TruncationBudget));
    }
}
