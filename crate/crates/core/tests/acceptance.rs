//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use holint_core::distribution::{
    build_one_form, integrability_residual, pde_residual, solve_pde_jet, CauchyData, DistributionSpec,
};
use holint_core::holonomy::{
    holonomy_map, linear_holonomy_oracle, periodicity_test, sample_grid, LiftOptions, LoopSpec, OrbitKind, DEFAULT_Z0,
};
use holint_core::resolution::{compare_trees, euclid_length, euclid_skeleton, resolve, PlaneFoliationGerm};
use holint_core::resonance::{
    check_transversal, enumerate_resonances, first_jet_test, meromorphic_invariant, monomial_first_integral,
    preparation_direction, span_rank, verify_first_integral, IntegerDirection,
};
use holint_core::series_core::{contract, exterior_derivative, wedge13, OneForm3};
use holint_core::{GaussianRational, MultiIndex, TruncatedSeries2, TruncatedSeries3, VectorFieldGerm};
use num_complex::Complex64;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{gaussian, int, nonzero_gaussian, series};

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn all_directions() -> Vec<(i64, i64, i64, IntegerDirection)> {
    let mut out = Vec::new();
    for m in 1..=6 {
        for n in 1..=6 {
            for k in 1..=6 {
                let dir = first_jet_test(&[int(m), int(n), int(-k)]).expect("(+,+,-) pattern");
                out.push((m, n, k, dir));
            }
        }
    }
    out
}

fn first_integral_construction() -> Outcome {
    for (m, n, k, dir) in all_directions() {
        let pair = monomial_first_integral(&dir);
        let order = pair.natural_order();
        let x = VectorFieldGerm::linear_int([m, n, -k], order).unwrap();
        ensure(verify_first_integral(&x, &pair.as_series(order)).is_first_integral(), || format!("({m},{n},{k}): residual"))?;
        ensure(check_transversal(&pair.n, &pair.m), || format!("({m},{n},{k}): not transversal"))?;
    }
    Ok(())
}

fn preparation_lemma() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut done = 0;
    while done < 100 {
        let (m, n, k) = (rng.gen_range(1..=5i64), rng.gen_range(1..=5i64), rng.gen_range(1..=5i64));
        let mut slots = [m, n, -k];
        slots.shuffle(&mut rng);
        let unit = nonzero_gaussian(&mut rng);
        let lambda = slots.map(|v| &int(v) * &unit);
        // brute-force resonant indices
        let mut res = Vec::new();
        for a in 0..=10u32 {
            for b in 0..=10 - a {
                for c in 0..=10 - a - b {
                    let e = [a, b, c];
                    let idx = MultiIndex(e);
                    if !idx.on_axes() && (0..3).map(|j| slots[j] * e[j] as i64).sum::<i64>() == 0 {
                        res.push(idx);
                    }
                }
            }
        }
        if res.len() < 2 {
            continue;
        }
        let nn = *res.choose(&mut rng).unwrap();
        let mm = *res.choose(&mut rng).unwrap();
        if span_rank(&[nn, mm]) < 2 {
            continue;
        }
        let dir = preparation_direction(&nn, &mm, &lambda).map_err(|e| format!("{lambda:?}: {e}"))?;
        ensure(dir.eigenvalues() == lambda, || format!("{lambda:?}: eigenvalues not reproduced"))?;
        ensure(dir.m > 0 && dir.n > 0 && dir.k > 0, || format!("{lambda:?}: sign pattern"))?;
        let g = num_integer::gcd(num_integer::gcd(m, n), k);
        let mut expect = [m / g, n / g, -k / g];
        let sorted_dir = dir.signed_original();
        // the positive slots of the input, in order, then the negative one
        let positive: Vec<i64> = slots.iter().filter(|&&v| v > 0).map(|v| v / g).collect();
        expect[0] = positive[0];
        expect[1] = positive[1];
        ensure([dir.m, dir.n, -dir.k] == expect, || format!("{lambda:?}: direction {sorted_dir:?}"))?;
        ensure(sorted_dir == slots.map(|v| v / g), || format!("{lambda:?}: slot order"))?;
        done += 1;
    }
    Ok(())
}

fn resolution_stability() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (m, n) in [(1u64, 1u64), (2, 1), (3, 2), (5, 3), (7, 4)] {
        let order = euclid_length(m, n) as u32 + 2;
        let reference = resolve(&PlaneFoliationGerm::omega_mn(m as i64, n as i64, order), 64).map_err(|e| e.to_string())?;
        ensure(compare_trees(&reference, &euclid_skeleton(m, n)), || format!("({m},{n}): reference tree"))?;
        for trial in 0..20 {
            let abcd: [TruncatedSeries2; 4] = std::array::from_fn(|_| series(&mut rng, 3, order, false, 4));
            let g = PlaneFoliationGerm::perturbed_form(m as i64, n as i64, abcd, order).map_err(|e| e.to_string())?;
            let t = resolve(&g, 64).map_err(|e| format!("({m},{n}) trial {trial}: {e}"))?;
            ensure(compare_trees(&t, &reference), || format!("({m},{n}) trial {trial}: tree differs"))?;
            ensure(t.blowups == euclid_length(m, n), || format!("({m},{n}) trial {trial}: {} blow-ups", t.blowups))?;
            ensure(t.dicritical_components.len() == 1, || format!("({m},{n}) trial {trial}: dicritical count"))?;
        }
    }
    Ok(())
}

fn random_mnk(rng: &mut ChaCha8Rng) -> [i64; 3] {
    [rng.gen_range(1..=6), rng.gen_range(1..=6), rng.gen_range(1..=6)]
}

fn field(mnk: [i64; 3], a: [TruncatedSeries3; 3]) -> VectorFieldGerm {
    VectorFieldGerm::new([mnk[0], mnk[1], -mnk[2]].map(int), a).unwrap()
}

fn tangency_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for trial in 0..30 {
        let order = 8;
        let mnk = random_mnk(&mut rng);
        let a: [TruncatedSeries3; 3] = std::array::from_fn(|_| series(&mut rng, 4, order, true, 5));
        let x = field(mnk, a);
        let spec = DistributionSpec::new(series(&mut rng, 4, order, false, 5), series(&mut rng, 4, order, false, 5));
        let w = build_one_form(&x, &spec).map_err(|e| e.to_string())?;
        ensure(contract(&x, &w).is_zero(), || format!("trial {trial}: i_X w != 0"))?;
    }
    Ok(())
}

fn integrability_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..50 {
        let order = 6;
        let w = OneForm3::new(
            series(&mut rng, 4, order, false, 6),
            series(&mut rng, 4, order, false, 6),
            series(&mut rng, 4, order, false, 6),
        )
        .unwrap();
        let lhs = wedge13(&w.truncated(order - 1), &exterior_derivative(&w)).map_err(|e| e.to_string())?;
        ensure(lhs == integrability_residual(&w), || format!("trial {trial}: mismatch"))?;
    }
    Ok(())
}

fn pde_jet_solver() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let order = 6;
    for trial in 0..20 {
        let (m, n) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        // k(1+l) > m·i + n·j for every monomial of degree ≤ order.
        let k = 6 * m.max(n) + rng.gen_range(1..=3);
        let a = [series(&mut rng, 3, order + 1, true, 5), TruncatedSeries3::zero(order + 1), series(&mut rng, 3, order + 1, true, 5)];
        let x = field([m, n, k], a);
        let report = solve_pde_jet(&x, &CauchyData::zero(order), order).map_err(|e| e.to_string())?;
        ensure(report.obstructions.is_empty(), || format!("trial {trial}: obstructions {:?}", report.obstructions))?;
        let res = pde_residual(&x, &report.p_bar).map_err(|e| e.to_string())?;
        ensure(res.truncated(order - 1).is_zero(), || format!("trial {trial}: residual {res}"))?;
    }
    Ok(())
}

fn dist(a: &[Complex64; 2], b: &[Complex64; 2]) -> f64 {
    (a[0] - b[0]).norm().max((a[1] - b[1]).norm())
}

fn holonomy_linear_oracle() -> Outcome {
    let grid = sample_grid(16, 0.3);
    let base = LoopSpec::one_turn(Complex64::new(DEFAULT_Z0, 0.0)).unwrap();
    let precise = LiftOptions { tol: 1e-11, max_refinements: 8, ..LiftOptions::default() };
    for m in 1..=6u64 {
        for n in 1..=6u64 {
            for k in 1..=6u64 {
                let x = VectorFieldGerm::linear_int([m as i64, n as i64, -(k as i64)], 2).unwrap();
                let oracle = linear_holonomy_oracle(m, n, k);
                let h = holonomy_map(&x, base, &grid, precise).map_err(|e| e.to_string())?;
                for s in &h.samples {
                    let d = dist(&s.output, &oracle.apply(s.input));
                    ensure(d < 1e-9, || format!("({m},{n},{k}): sample off by {d:e}"))?;
                }
                let coarse = holonomy_map(&x, base, &grid, LiftOptions::default()).map_err(|e| e.to_string())?;
                let v = periodicity_test(&coarse, 36, 1e-6);
                ensure(v.kind == OrbitKind::Periodic { period: oracle.period as u32 }, || {
                    format!("({m},{n},{k}): {:?}, oracle {}", v.kind, oracle.period)
                })?;
            }
        }
    }
    Ok(())
}

fn theorem_iv_implies_iii() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let grid = sample_grid(8, 0.2);
    let base = LoopSpec::one_turn(Complex64::new(DEFAULT_Z0, 0.0)).unwrap();
    for trial in 0..10 {
        let mnk = random_mnk(&mut rng);
        let order = 4;
        let lin = VectorFieldGerm::linear_int([mnk[0], mnk[1], -mnk[2]], order).unwrap();
        let mut u = series::<3, _>(&mut rng, 3, order, true, 6);
        u.add_term(MultiIndex::zero(), nonzero_gaussian(&mut rng));
        let x = lin.scaled_by_unit(&u).map_err(|e| e.to_string())?;
        let expect = linear_holonomy_oracle(mnk[0] as u64, mnk[1] as u64, mnk[2] as u64).period as u32;
        let h = holonomy_map(&x, base, &grid, LiftOptions::default()).map_err(|e| e.to_string())?;
        let v = periodicity_test(&h, 36, 1e-6);
        ensure(v.kind == OrbitKind::Periodic { period: expect }, || format!("trial {trial} {mnk:?}: {:?}, want {expect}", v.kind))?;
    }
    Ok(())
}

fn adapted_invariant() -> Outcome {
    for (m, n, k, dir) in all_directions() {
        let pair = monomial_first_integral(&dir);
        let inv = meromorphic_invariant(&pair.n, &pair.m, &dir).map_err(|e| e.to_string())?;
        let e = inv.exponent;
        ensure(e[2] == 0, || format!("({m},{n},{k}): E3 = {}", e[2]))?;
        ensure(e[0] * e[1] < 0, || format!("({m},{n},{k}): E = {e:?}"))?;
        ensure(m * e[0] + n * e[1] - k * e[2] == 0, || format!("({m},{n},{k}): lambda.E != 0"))?;
        let x = VectorFieldGerm::linear_int([m, n, -k], 2).unwrap();
        ensure(inv.quotient_rule_residual(&x).is_zero(), || format!("({m},{n},{k}): quotient residual"))?;
    }
    Ok(())
}

fn random_non_star(rng: &mut ChaCha8Rng) -> [GaussianRational; 3] {
    loop {
        let lambda: [GaussianRational; 3] = match rng.gen_range(0..3) {
            // real, all one sign
            0 => {
                let s = if rng.gen_bool(0.5) { 1 } else { -1 };
                std::array::from_fn(|_| GaussianRational::from_ratio(s * rng.gen_range(1..=9), rng.gen_range(1..=4)))
            }
            // on a common line, but with a non-real ratio in the mix
            1 => {
                let base = nonzero_gaussian(rng);
                let mut l: [GaussianRational; 3] = std::array::from_fn(|_| &base * &int(rng.gen_range(-6..=6)));
                l[rng.gen_range(0..3)] = &l[0] + &(GaussianRational::i() * &base);
                l
            }
            _ => std::array::from_fn(|_| gaussian(rng)),
        };
        if lambda.iter().any(|l| l.is_zero()) || first_jet_test(&lambda).is_some() {
            continue;
        }
        return lambda;
    }
}

fn necessity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for trial in 0..50 {
        let lambda = random_non_star(&mut rng);
        let res = enumerate_resonances(&lambda, 10);
        ensure(span_rank(&res) <= 1, || format!("trial {trial}: {lambda:?} has independent resonances"))?;
    }
    Ok(())
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("first-integral construction", Duration::from_secs(1), first_integral_construction),
        ("preparation lemma", Duration::from_secs(1), preparation_lemma),
        ("resolution-tree stability", Duration::from_secs(30), resolution_stability),
        ("tangency identity", Duration::from_secs(5), tangency_identity),
        ("integrability equivalence", Duration::from_secs(5), integrability_equivalence),
        ("PDE jet solver", Duration::from_secs(10), pde_jet_solver),
        ("holonomy linear oracle", Duration::from_secs(60), holonomy_linear_oracle),
        ("unit multiples keep the period", Duration::from_secs(120), theorem_iv_implies_iii),
        ("adapted invariant", Duration::from_secs(1), adapted_invariant),
        ("necessity of the first-jet condition", Duration::from_secs(10), necessity),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|()| {
            ensure(elapsed <= *budget, || format!("took {:.2}s, budget {}s", elapsed.as_secs_f64(), budget.as_secs()))
        });
        match outcome {
            Ok(()) => println!("PASS {:>2} {name} ({:.2}s)", i + 1, elapsed.as_secs_f64()),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({:.2}s): {e}", i + 1, elapsed.as_secs_f64());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
