use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{HolonomyError, HolonomyEstimate, Point, TransversalMap, MIN_PERIOD_SAMPLES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum OrbitKind {
    Periodic { period: u32 },
    FiniteWithinBudget { orbit_size: u32 },
    Escaped { iterate: u32 },
    Undecided,
}

/// `evidence[p − 1]` is the largest distance between a tested point and its
/// `p`-th iterate (infinite once a point escapes or a lift fails). The
/// periodicity test stops at the first period found.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitVerdict {
    pub kind: OrbitKind,
    pub evidence: Vec<f64>,
}

/// `max(|Δx|, |Δy|) / max(1e−3, |x|, |y|)` measured against `b`.
pub fn relative_distance(a: &Point, b: &Point) -> f64 {
    let d = (a[0] - b[0]).norm().max((a[1] - b[1]).norm());
    d / b[0].norm().max(b[1].norm()).max(1e-3)
}

fn absolute_distance(a: &Point, b: &Point) -> f64 {
    (a[0] - b[0]).norm().max((a[1] - b[1]).norm())
}

enum Step {
    Live(Point),
    Escaped(u32),
    Failed,
}

/// Iterates the map itself (one lift per iterate) on every sample in
/// lockstep and returns the least `p ≤ max_period` with `|h^p(s) − s| ≤ tol`
/// for all of them. Periodicity needs at least [`MIN_PERIOD_SAMPLES`]
/// samples.
pub fn periodicity_test_map<M: TransversalMap + ?Sized>(map: &M, samples: &[Point], max_period: u32, tol: f64) -> OrbitVerdict {
    let mut evidence = Vec::new();
    if samples.is_empty() {
        return OrbitVerdict { kind: OrbitKind::Undecided, evidence };
    }
    let mut state: Vec<Step> = samples.iter().map(|&s| Step::Live(s)).collect();
    let mut first_return: Vec<Option<u32>> = vec![None; samples.len()];
    for p in 1..=max_period {
        state = state
            .par_iter()
            .map(|st| match st {
                Step::Live(q) => match map.apply(*q) {
                    Ok(r) => Step::Live(r),
                    Err(HolonomyError::DomainEscape { .. }) | Err(HolonomyError::StartOutside { .. }) => Step::Escaped(p),
                    Err(_) => Step::Failed,
                },
                Step::Escaped(it) => Step::Escaped(*it),
                Step::Failed => Step::Failed,
            })
            .collect();
        let mut worst = 0.0f64;
        for (j, st) in state.iter().enumerate() {
            let d = match st {
                Step::Live(q) => absolute_distance(q, &samples[j]),
                _ => f64::INFINITY,
            };
            if d <= tol && first_return[j].is_none() {
                first_return[j] = Some(p);
            }
            worst = worst.max(d);
        }
        evidence.push(worst);
        if worst <= tol && samples.len() >= MIN_PERIOD_SAMPLES {
            return OrbitVerdict { kind: OrbitKind::Periodic { period: p }, evidence };
        }
    }
    let escaped = state.iter().filter_map(|st| if let Step::Escaped(it) = st { Some(*it) } else { None }).min();
    let kind = if let Some(iterate) = escaped {
        OrbitKind::Escaped { iterate }
    } else if first_return.iter().all(|r| r.is_some()) {
        OrbitKind::FiniteWithinBudget { orbit_size: first_return.iter().flatten().copied().max().unwrap_or(1) }
    } else {
        OrbitKind::Undecided
    };
    OrbitVerdict { kind, evidence }
}

/// [`periodicity_test_map`] on the estimate's own map and sample inputs.
pub fn periodicity_test(h: &HolonomyEstimate, max_period: u32, tol: f64) -> OrbitVerdict {
    periodicity_test_map(&h.map, &h.inputs(), max_period, tol)
}

/// Follows the orbit of `point` forward, then backward, until it comes back
/// within relative distance `tol` of an earlier point or leaves the disk.
/// The evidence lists each forward iterate's relative distance to `point`.
pub fn orbit_finiteness<M: TransversalMap + ?Sized>(map: &M, point: Point, max_iter: u32, tol: f64) -> OrbitVerdict {
    let mut evidence = Vec::new();
    for backward in [false, true] {
        let mut seen = vec![point];
        let mut p = point;
        for it in 1..=max_iter {
            let next = if backward { map.apply_inverse(p) } else { map.apply(p) };
            match next {
                Ok(q) => {
                    if !backward {
                        evidence.push(relative_distance(&q, &point));
                    }
                    if seen.iter().any(|s| relative_distance(&q, s) <= tol) {
                        return OrbitVerdict { kind: OrbitKind::FiniteWithinBudget { orbit_size: it }, evidence };
                    }
                    seen.push(q);
                    p = q;
                }
                Err(HolonomyError::DomainEscape { .. }) | Err(HolonomyError::StartOutside { .. }) => {
                    return OrbitVerdict { kind: OrbitKind::Escaped { iterate: it }, evidence };
                }
                Err(_) => break,
            }
        }
    }
    OrbitVerdict { kind: OrbitKind::Undecided, evidence }
}

/// `(x, y) ↦ (e^{2πiα}x, e^{2πiβ}y)`, exact up to rounding. Serves as a
/// reference map, including for irrational angles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationMap {
    pub angles: [f64; 2],
    pub radius: f64,
}

impl RotationMap {
    fn rotate(&self, p: Point, sign: f64) -> Result<Point, HolonomyError> {
        if !(p[0].norm() <= self.radius && p[1].norm() <= self.radius) {
            return Err(HolonomyError::StartOutside { radius: self.radius });
        }
        let r = |a: f64| Complex64::from_polar(1.0, sign * TAU * a);
        Ok([r(self.angles[0]) * p[0], r(self.angles[1]) * p[1]])
    }
}

impl TransversalMap for RotationMap {
    fn apply(&self, p: Point) -> Result<Point, HolonomyError> {
        self.rotate(p, 1.0)
    }

    fn apply_inverse(&self, p: Point) -> Result<Point, HolonomyError> {
        self.rotate(p, -1.0)
    }

    fn radius(&self) -> f64 {
        self.radius
    }
}

#[cfg(test)]
mod tests {
    use super::super::{holonomy_map, sample_grid, LiftOptions, LoopSpec, DEFAULT_Z0};
    use super::*;
    use crate::VectorFieldGerm;

    fn zero() -> Point {
        [Complex64::new(0.0, 0.0); 2]
    }

    #[test]
    fn linear_periods() {
        let base = LoopSpec::one_turn(Complex64::new(DEFAULT_Z0, 0.0)).unwrap();
        let grid = sample_grid(8, 0.3);
        let h = holonomy_map(&VectorFieldGerm::linear_int([1, 2, -3], 3).unwrap(), base, &grid, LiftOptions::default()).unwrap();
        let v = periodicity_test(&h, 6, 1e-6);
        assert_eq!(v.kind, OrbitKind::Periodic { period: 3 });
        assert!(v.evidence[0] > 0.1 && v.evidence[1] > 0.1 && v.evidence[2] < 1e-6);
        let h = holonomy_map(&VectorFieldGerm::linear_int([2, 4, -2], 3).unwrap(), base, &grid, LiftOptions::default()).unwrap();
        assert_eq!(periodicity_test(&h, 6, 1e-6).kind, OrbitKind::Periodic { period: 1 });
    }

    #[test]
    fn period_needs_enough_samples() {
        let rot = RotationMap { angles: [1.0 / 3.0, 2.0 / 3.0], radius: 0.5 };
        let few = sample_grid(3, 0.3);
        assert_eq!(periodicity_test_map(&rot, &few, 5, 1e-9).kind, OrbitKind::FiniteWithinBudget { orbit_size: 3 });
        assert_eq!(periodicity_test_map(&rot, &sample_grid(8, 0.3), 5, 1e-9).kind, OrbitKind::Periodic { period: 3 });
        assert_eq!(periodicity_test_map(&rot, &[], 5, 1e-9).kind, OrbitKind::Undecided);
    }

    #[test]
    fn orbit_examples() {
        let rot = RotationMap { angles: [1.0 / 3.0, 2.0 / 3.0], radius: 0.5 };
        let p = [Complex64::new(0.1, 0.2), Complex64::new(-0.3, 0.05)];
        assert_eq!(orbit_finiteness(&rot, p, 10, 1e-9).kind, OrbitKind::FiniteWithinBudget { orbit_size: 3 });
        assert_eq!(orbit_finiteness(&rot, zero(), 10, 1e-9).kind, OrbitKind::FiniteWithinBudget { orbit_size: 1 });
        let irr = RotationMap { angles: [std::f64::consts::SQRT_2 / 10.0, std::f64::consts::SQRT_2 / 7.0], radius: 0.5 };
        let v = orbit_finiteness(&irr, p, 200, 1e-9);
        assert_eq!(v.kind, OrbitKind::Undecided);
        assert_eq!(v.evidence.len(), 200);
        assert_eq!(periodicity_test_map(&irr, &sample_grid(8, 0.3), 50, 1e-9).kind, OrbitKind::Undecided);
    }

    #[test]
    fn escape_is_reported() {
        // λ₁/λ₃ = −i: the lift expands by e^{2π}.
        let lam = [crate::GaussianRational::i(), crate::GaussianRational::from_int(1), crate::GaussianRational::from_int(-1)];
        let base = LoopSpec::one_turn(Complex64::new(DEFAULT_Z0, 0.0)).unwrap();
        let map = super::super::HolonomyMap::new(&VectorFieldGerm::linear(lam, 2).unwrap(), base, LiftOptions::default());
        let p = [Complex64::new(0.01, 0.0), Complex64::new(0.01, 0.0)];
        assert_eq!(orbit_finiteness(&map, p, 5, 1e-9).kind, OrbitKind::Escaped { iterate: 1 });
        assert!(matches!(periodicity_test_map(&map, &[p; 8], 3, 1e-9).kind, OrbitKind::Escaped { .. }));
    }
}
