//! Floating-point holonomy of `F(X)` along the invariant axis `S_X`.
//!
//! Loops `z(θ) = z₀e^{iθ}` in the z-axis are lifted along the leaves with
//! classical fourth-order Runge-Kutta steps. Each lift is repeated with the
//! step halved and the difference gives a Richardson error estimate.

mod field;
mod orbit;

use std::f64::consts::TAU;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use rayon::prelude::*;
use thiserror::Error;

use crate::series_core::VectorFieldGerm;

pub use field::{NumericField, NumericSeries};
pub use orbit::{orbit_finiteness, periodicity_test, periodicity_test_map, relative_distance, OrbitKind, OrbitVerdict, RotationMap};

/// A point `(x, y)` on the transversal `Σ_{z₀}`.
pub type Point = [Complex64; 2];

pub const DEFAULT_RADIUS: f64 = 0.5;
pub const DEFAULT_Z0: f64 = 0.25;
pub const DEFAULT_STEPS: u32 = 512;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const MIN_STEPS: u32 = 64;
/// Samples a period must hold on before it is declared.
pub const MIN_PERIOD_SAMPLES: usize = 8;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum HolonomyError {
    #[error("loop specification invalid: {0}")]
    InvalidLoop(&'static str),
    #[error("start point lies outside the polydisk of radius {radius}")]
    StartOutside { radius: f64 },
    #[error("lift left the polydisk of radius {radius} at angle {theta}")]
    DomainEscape { theta: f64, radius: f64 },
    #[error("error estimate {error:e} above tolerance {tol:e} after {steps} steps per turn")]
    Precision { error: f64, tol: f64, steps: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoopSpec {
    pub z0: Complex64,
    pub turns: i32,
    pub steps: u32,
}

impl LoopSpec {
    pub fn new(z0: Complex64, turns: i32, steps: u32) -> Result<Self, HolonomyError> {
        if z0.norm() == 0.0 || !z0.norm().is_finite() {
            return Err(HolonomyError::InvalidLoop("base point must be a nonzero finite point of the axis"));
        }
        if steps < MIN_STEPS {
            return Err(HolonomyError::InvalidLoop("at least 64 steps per turn"));
        }
        Ok(Self { z0, turns, steps })
    }

    /// One positive turn at `z₀` with the default subdivision.
    pub fn one_turn(z0: Complex64) -> Result<Self, HolonomyError> {
        Self::new(z0, 1, DEFAULT_STEPS)
    }

    pub fn reversed(&self) -> Self {
        Self { turns: -self.turns, ..*self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LiftOptions {
    pub radius: f64,
    pub tol: f64,
    /// How many times the step count may double before giving up.
    pub max_refinements: u32,
}

impl Default for LiftOptions {
    fn default() -> Self {
        Self { radius: DEFAULT_RADIUS, tol: DEFAULT_TOL, max_refinements: 6 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lift {
    pub end: Point,
    pub error_bound: f64,
    pub steps_per_turn: u32,
}

fn outside(p: &Point, radius: f64) -> bool {
    !(p[0].norm() <= radius && p[1].norm() <= radius)
}

fn integrate(x: &NumericField, start: Point, z0: Complex64, turns: i32, steps: u32, radius: f64) -> Result<Point, HolonomyError> {
    let total = steps as u64 * turns.unsigned_abs() as u64;
    let h = TAU / steps as f64 * f64::from(turns.signum());
    let z_at = |theta: f64| z0 * Complex64::from_polar(1.0, theta);
    let f = |theta: f64, p: &Point| x.angular_rhs(p[0], p[1], z_at(theta));
    let mut p = start;
    for s in 0..total {
        let t = h * s as f64;
        let k1 = f(t, &p);
        let k2 = f(t + h / 2.0, &[p[0] + k1[0] * (h / 2.0), p[1] + k1[1] * (h / 2.0)]);
        let k3 = f(t + h / 2.0, &[p[0] + k2[0] * (h / 2.0), p[1] + k2[1] * (h / 2.0)]);
        let k4 = f(t + h, &[p[0] + k3[0] * h, p[1] + k3[1] * h]);
        for v in 0..2 {
            p[v] += (k1[v] + 2.0 * k2[v] + 2.0 * k3[v] + k4[v]) * (h / 6.0);
        }
        if outside(&p, radius) {
            return Err(HolonomyError::DomainEscape { theta: t + h, radius });
        }
    }
    Ok(p)
}

/// RK4 error estimate from two step sizes: `|fine − coarse| / 15`.
fn richardson(coarse: &Point, fine: &Point) -> f64 {
    (fine[0] - coarse[0]).norm().max((fine[1] - coarse[1]).norm()) / 15.0
}

/// Lifts `loop_spec` starting from `start ∈ Σ_{z₀}`. The step count doubles
/// until the error estimate is within tolerance.
pub fn lift_loop(x: &NumericField, start: Point, loop_spec: &LoopSpec, opts: &LiftOptions) -> Result<Lift, HolonomyError> {
    if loop_spec.z0.norm() > opts.radius {
        return Err(HolonomyError::InvalidLoop("base point outside the polydisk"));
    }
    if outside(&start, opts.radius) {
        return Err(HolonomyError::StartOutside { radius: opts.radius });
    }
    if loop_spec.turns == 0 {
        return Ok(Lift { end: start, error_bound: 0.0, steps_per_turn: loop_spec.steps });
    }
    let run = |steps| integrate(x, start, loop_spec.z0, loop_spec.turns, steps, opts.radius);
    let mut steps = loop_spec.steps;
    let mut coarse = run(steps)?;
    let mut error = f64::INFINITY;
    for _ in 0..=opts.max_refinements {
        let fine = run(steps * 2)?;
        error = richardson(&coarse, &fine);
        steps *= 2;
        if error <= opts.tol {
            return Ok(Lift { end: fine, error_bound: error, steps_per_turn: steps });
        }
        coarse = fine;
    }
    Err(HolonomyError::Precision { error, tol: opts.tol, steps })
}

/// A germ of map on a transversal section.
pub trait TransversalMap: Sync {
    fn apply(&self, p: Point) -> Result<Point, HolonomyError>;
    fn apply_inverse(&self, p: Point) -> Result<Point, HolonomyError>;
    /// Radius of the polydisk where the map is trusted.
    fn radius(&self) -> f64;
}

/// The holonomy `h_γ` of a loop, evaluated by lifting.
#[derive(Clone, Debug, PartialEq)]
pub struct HolonomyMap {
    pub field: NumericField,
    pub base: LoopSpec,
    pub options: LiftOptions,
}

impl HolonomyMap {
    pub fn new(x: &VectorFieldGerm, base: LoopSpec, options: LiftOptions) -> Self {
        Self { field: NumericField::from_germ(x), base, options }
    }

    pub fn lift(&self, p: Point) -> Result<Lift, HolonomyError> {
        lift_loop(&self.field, p, &self.base, &self.options)
    }
}

impl TransversalMap for HolonomyMap {
    fn apply(&self, p: Point) -> Result<Point, HolonomyError> {
        Ok(self.lift(p)?.end)
    }

    fn apply_inverse(&self, p: Point) -> Result<Point, HolonomyError> {
        Ok(lift_loop(&self.field, p, &self.base.reversed(), &self.options)?.end)
    }

    fn radius(&self) -> f64 {
        self.options.radius
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolonomySample {
    pub input: Point,
    pub output: Point,
    pub error_bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HolonomyEstimate {
    pub map: HolonomyMap,
    pub samples: Vec<HolonomySample>,
    /// Largest per-sample error estimate.
    pub error_bound: f64,
}

impl HolonomyEstimate {
    pub fn base(&self) -> &LoopSpec {
        &self.map.base
    }

    pub fn inputs(&self) -> Vec<Point> {
        self.samples.iter().map(|s| s.input).collect()
    }
}

/// `count` deterministic points spread over the bidisk of radius `scale`,
/// none on the coordinate axes.
pub fn sample_grid(count: usize, scale: f64) -> Vec<Point> {
    (0..count)
        .map(|j| {
            let t = (j as f64 + 1.0) / (count as f64 + 1.0);
            let x = Complex64::from_polar(scale * (0.2 + 0.8 * t), 2.399_963 * j as f64);
            let y = Complex64::from_polar(scale * (1.0 - 0.8 * t), 1.3 * j as f64 + 0.7);
            [x, y]
        })
        .collect()
}

/// One lift of the base loop per grid point.
pub fn holonomy_map(x: &VectorFieldGerm, base: LoopSpec, grid: &[Point], options: LiftOptions) -> Result<HolonomyEstimate, HolonomyError> {
    let map = HolonomyMap::new(x, base, options);
    let samples = grid
        .par_iter()
        .map(|&p| map.lift(p).map(|l| HolonomySample { input: p, output: l.end, error_bound: l.error_bound }))
        .collect::<Result<Vec<_>, _>>()?;
    let error_bound = samples.iter().map(|s| s.error_bound).fold(0.0, f64::max);
    Ok(HolonomyEstimate { map, samples, error_bound })
}

/// Closed-form holonomy of `m x∂x + n y∂y − k z∂z`: the rotation
/// `(x, y) ↦ (e^{2πiα}x, e^{2πiβ}y)` with `(α, β) = (−m/k, −n/k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LinearHolonomy {
    pub angles: [Rational64; 2],
    pub period: u64,
}

impl LinearHolonomy {
    pub fn apply(&self, p: Point) -> Point {
        let rot = |a: Rational64| Complex64::from_polar(1.0, TAU * (*a.numer() as f64) / (*a.denom() as f64));
        [rot(self.angles[0]) * p[0], rot(self.angles[1]) * p[1]]
    }
}

pub fn linear_holonomy_oracle(m: u64, n: u64, k: u64) -> LinearHolonomy {
    assert!(m > 0 && n > 0 && k > 0, "m, n, k must be positive");
    let angle = |v: u64| Rational64::new(-(v as i64), k as i64);
    let period = (k / k.gcd(&m)).lcm(&(k / k.gcd(&n)));
    LinearHolonomy { angles: [angle(m), angle(n)], period }
}
