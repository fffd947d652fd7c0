//! Codimension-one distributions tangent to `X = m x(1+a)∂x + n y(1+b)∂y −
//! k z(1+c)∂z` and the order-by-order solver for their integrability PDE.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series_core::{
    GaussianRational, MultiIndex, MultiIndex3, OneForm3, SeriesError, TruncatedSeries2, TruncatedSeries3, VectorFieldGerm,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DistributionError {
    #[error("eigenvalues are not of the form (m, n, -k) with positive integers")]
    NotNormalShape,
    #[error("the second unit factor is not 1; normalize the field first")]
    NotNormalized,
    #[error("requested order {requested} needs a field known to order {needed}, have {available}")]
    OrderTooHigh { requested: u32, needed: u32, available: u32 },
    #[error("Cauchy datum must have zero constant term")]
    CauchyConstantTerm,
    #[error("Cauchy datum known to order {available}, need {requested}")]
    CauchyOrder { requested: u32, available: u32 },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `(m, n, k)` when the eigenvalues are exactly `(m, n, −k)`.
pub fn integer_shape(x: &VectorFieldGerm) -> Result<(i64, i64, i64), DistributionError> {
    let mut out = [0i64; 3];
    for (slot, l) in out.iter_mut().zip(x.lambda()) {
        *slot = l.as_integer().and_then(|v| i64::try_from(v).ok()).ok_or(DistributionError::NotNormalShape)?;
    }
    let [m, n, k] = out;
    if m <= 0 || n <= 0 || k >= 0 {
        return Err(DistributionError::NotNormalShape);
    }
    Ok((m, n, -k))
}

/// Divides `X` by `1 + b`, so the second unit factor becomes exactly 1.
/// The eigenvalues are unchanged.
pub fn normalize(x: &VectorFieldGerm) -> VectorFieldGerm {
    if x.a()[1].is_zero() {
        return x.clone();
    }
    let u = x.unit_factor(1).invert_unit().expect("unit factors are units");
    x.scaled_by_unit(&u).expect("same order")
}

/// `p̄, q̄` of a tangent distribution. `normalized` records that `q̄ = 0`
/// and the field was divided by `1 + b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub p_bar: TruncatedSeries3,
    pub q_bar: TruncatedSeries3,
    pub normalized: bool,
}

impl DistributionSpec {
    pub fn new(p_bar: TruncatedSeries3, q_bar: TruncatedSeries3) -> Self {
        Self { p_bar, q_bar, normalized: false }
    }

    /// `q̄ = 0`, to be paired with a normalized field.
    pub fn normalized(p_bar: TruncatedSeries3) -> Self {
        let q_bar = TruncatedSeries3::zero(p_bar.order());
        Self { p_bar, q_bar, normalized: true }
    }
}

fn unit(s: &TruncatedSeries3, order: u32) -> TruncatedSeries3 {
    let mut u = s.truncated(order);
    u.add_term(MultiIndex::zero(), GaussianRational::one());
    u
}

fn int(v: i64) -> GaussianRational {
    GaussianRational::from_int(v)
}

/// `P = n y(b̄ + z c̄ q̄)`, `Q = −m x(ā + z c̄ p̄)`,
/// `R = (mn/k) x y(ā q̄ − b̄ p̄)`, truncated one above the common order of
/// the field and the spec. Then `i_X ω = 0` identically.
pub fn build_one_form(x: &VectorFieldGerm, spec: &DistributionSpec) -> Result<OneForm3, DistributionError> {
    let (m, n, k) = integer_shape(x)?;
    let o = x.order().min(spec.p_bar.order()).min(spec.q_bar.order());
    let [ab, bb, cb] = [0, 1, 2].map(|j| unit(&x.a()[j], o));
    let (p, q) = (spec.p_bar.truncated(o), spec.q_bar.truncated(o));
    let zc = |s: &TruncatedSeries3| (&cb * s).mul_var(2).truncated(o);
    let big_p = (&bb + &zc(&q)).mul_var(1).scale(&int(n));
    let big_q = (&ab + &zc(&p)).mul_var(0).scale(&int(-m));
    let mn_k = &int(m * n) / &int(k);
    let big_r = (&(&ab * &q) - &(&bb * &p)).mul_var(0).mul_var(1).truncated(o + 1).scale(&mn_k);
    Ok(OneForm3::new(big_p, big_q, big_r)?)
}

/// `(−P_y + Q_x)R − (−P_z + R_x)Q + (−Q_z + R_y)P`, the coefficient of
/// `dx∧dy∧dz` in `ω∧dω`. Known to one less than the form's order.
pub fn integrability_residual(w: &OneForm3) -> TruncatedSeries3 {
    let o = w.order().saturating_sub(1);
    let [p, q, r] = w.components().map(|s| s.truncated(o));
    let c12 = &w.q.partial(0) - &w.p.partial(1);
    let c13 = &w.r.partial(0) - &w.p.partial(2);
    let c23 = &w.r.partial(1) - &w.q.partial(2);
    &(&(&c12 * &r) - &(&c13 * &q)) + &(&c23 * &p)
}

/// Left side of the integrability PDE for `p̄` once `q̄ = 0` and `b̄ = 1`,
/// with `ā = 1 + a`, `c̄ = 1 + c`:
///
/// `k a_z + (m x ā_x + k c̄ + k z c̄_z) p̄ + m x z c̄_x p̄² − m x ā p̄_x
///  − n y p̄_y + k z c̄ p̄_z`.
///
/// For such inputs `integrability_residual(build_one_form(X, p̄))` equals
/// `(mnxy/k)` times this.
pub fn pde_residual(x: &VectorFieldGerm, p_bar: &TruncatedSeries3) -> Result<TruncatedSeries3, DistributionError> {
    let (m, n, k) = integer_shape(x)?;
    if !x.a()[1].is_zero() {
        return Err(DistributionError::NotNormalized);
    }
    let o = x.order().saturating_sub(1).min(p_bar.order());
    let (a, c) = (&x.a()[0], &x.a()[2]);
    let t = |s: TruncatedSeries3| s.truncated(o);
    let p = t(p_bar.clone());
    let ab = unit(a, o);
    let cb = unit(c, o);
    let coeff1 = &(&t(a.partial(0).mul_var(0)).scale(&int(m)) + &cb.scale(&int(k))) + &t(c.partial(2).mul_var(2)).scale(&int(k));
    let xz_cx = t(c.partial(0).mul_var(0).mul_var(2)).scale(&int(m));
    let mut acc = t(a.partial(2)).scale(&int(k));
    acc = &acc + &(&coeff1 * &p);
    acc = &acc + &(&xz_cx * &(&p * &p));
    acc = &acc - &(&ab * &p.euler(0)).scale(&int(m));
    acc = &acc - &p.euler(1).scale(&int(n));
    acc = &acc + &(&cb * &p.euler(2)).scale(&int(k));
    Ok(acc)
}

/// The coordinate plane carrying Cauchy data: `Z` is `{z = 0}` with datum
/// `φ(x, y)`, `Y` is `{y = 0}` with `φ(x, z)`, `X` is `{x = 0}` with `φ(y, z)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordinatePlane {
    X,
    Y,
    #[default]
    Z,
}

impl CoordinatePlane {
    /// The coordinate vanishing on the plane.
    pub fn normal_var(self) -> usize {
        match self {
            CoordinatePlane::X => 0,
            CoordinatePlane::Y => 1,
            CoordinatePlane::Z => 2,
        }
    }

    /// Index on the plane of a monomial lying in it.
    fn restrict(self, e: &MultiIndex3) -> Option<[u32; 2]> {
        let [i, j, l] = e.exponents();
        match self {
            CoordinatePlane::X => (i == 0).then_some([j, l]),
            CoordinatePlane::Y => (j == 0).then_some([i, l]),
            CoordinatePlane::Z => (l == 0).then_some([i, j]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CauchyData {
    pub plane: CoordinatePlane,
    pub phi: TruncatedSeries2,
}

impl CauchyData {
    pub fn new(plane: CoordinatePlane, phi: TruncatedSeries2) -> Result<Self, DistributionError> {
        if !phi.in_maximal_ideal() {
            return Err(DistributionError::CauchyConstantTerm);
        }
        Ok(Self { plane, phi })
    }

    /// `φ = 0` on `{z = 0}`.
    pub fn zero(order: u32) -> Self {
        Self { plane: CoordinatePlane::Z, phi: TruncatedSeries2::zero(order) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JetSolveReport {
    pub p_bar: TruncatedSeries3,
    /// Monomials whose diagonal coefficient `k(1+l) − m·i − n·j` vanishes.
    pub resonant_indices: Vec<MultiIndex3>,
    /// Resonant monomials whose forced right-hand side is nonzero.
    pub obstructions: Vec<MultiIndex3>,
    /// Monomials on the Cauchy plane where the equation fixed a value other
    /// than the datum.
    pub data_conflicts: Vec<MultiIndex3>,
    /// `pde_residual(X, p̄)` has no terms of degree `≤ residual_order`;
    /// `None` when the degree-zero equation already fails.
    pub residual_order: Option<u32>,
}

impl JetSolveReport {
    pub fn succeeded(&self) -> bool {
        self.obstructions.is_empty()
    }
}

/// `k(1+l) − m·i − n·j` for `x^i y^j z^l`.
pub fn diagonal_coefficient(m: i64, n: i64, k: i64, e: &MultiIndex3) -> i64 {
    let [i, j, l] = e.exponents().map(i64::from);
    k * (1 + l) - m * i - n * j
}

/// Solves the PDE degree by degree through `order`. At each degree the new
/// coefficients enter only through the diagonal, so each is
/// `−rhs / (k(1+l) − m·i − n·j)`. Where the diagonal vanishes the
/// coefficient is free: it takes the Cauchy datum on the plane, 0 elsewhere,
/// and a nonzero `rhs` is recorded as an obstruction.
pub fn solve_pde_jet(x: &VectorFieldGerm, data: &CauchyData, order: u32) -> Result<JetSolveReport, DistributionError> {
    let (m, n, k) = integer_shape(x)?;
    if !x.a()[1].is_zero() {
        return Err(DistributionError::NotNormalized);
    }
    if order + 1 > x.order() {
        return Err(DistributionError::OrderTooHigh { requested: order, needed: order + 1, available: x.order() });
    }
    if !data.phi.in_maximal_ideal() {
        return Err(DistributionError::CauchyConstantTerm);
    }
    if data.phi.order() < order {
        return Err(DistributionError::CauchyOrder { requested: order, available: data.phi.order() });
    }
    let mut p = TruncatedSeries3::zero(order);
    let mut report = JetSolveReport {
        p_bar: TruncatedSeries3::zero(order),
        resonant_indices: Vec::new(),
        obstructions: Vec::new(),
        data_conflicts: Vec::new(),
        residual_order: Some(order),
    };
    for d in 0..=order {
        let rhs = pde_residual(&x.truncated(d + 1), &p.truncated(d))?;
        for e in MultiIndex3::of_degree(d) {
            let r = rhs.coeff(&e);
            let datum = data.plane.restrict(&e).map(|ij| data.phi.coeff(&MultiIndex(ij)));
            let diag = diagonal_coefficient(m, n, k, &e);
            if diag == 0 {
                report.resonant_indices.push(e);
                if !r.is_zero() {
                    report.obstructions.push(e);
                }
                if let Some(v) = datum {
                    p.add_term(e, v);
                }
            } else {
                let v = -(&r / &int(diag));
                if datum.as_ref().is_some_and(|dv| *dv != v) {
                    report.data_conflicts.push(e);
                }
                p.add_term(e, v);
            }
        }
    }
    if let Some(first) = report.obstructions.iter().map(|e| e.degree()).min() {
        report.residual_order = first.checked_sub(1);
    }
    report.p_bar = p;
    Ok(report)
}
