//! Seeded generators for the integration tests.

#![allow(dead_code)]

use holint_core::{GaussianRational, MultiIndex, TruncatedSeries};
use rand::Rng;

pub fn int(v: i64) -> GaussianRational {
    GaussianRational::from_int(v)
}

/// A small Gaussian rational, real with probability one half.
pub fn gaussian<R: Rng>(rng: &mut R) -> GaussianRational {
    let re = GaussianRational::from_ratio(rng.gen_range(-5..=5), rng.gen_range(1..=4));
    if rng.gen_bool(0.5) {
        re
    } else {
        let im = GaussianRational::from_ratio(rng.gen_range(-3..=3), rng.gen_range(1..=3));
        &re + &(&GaussianRational::i() * &im)
    }
}

pub fn nonzero_gaussian<R: Rng>(rng: &mut R) -> GaussianRational {
    loop {
        let g = gaussian(rng);
        if !num_traits::Zero::is_zero(&g) {
            return g;
        }
    }
}

/// A random polynomial with at most `terms` terms of degree at most
/// `max_degree`, stored at `order`; no constant term when `maximal`.
pub fn series<const N: usize, R: Rng>(rng: &mut R, max_degree: u32, order: u32, maximal: bool, terms: usize) -> TruncatedSeries<N> {
    let mut s = TruncatedSeries::zero(order);
    for _ in 0..rng.gen_range(1..=terms) {
        let d = rng.gen_range(if maximal { 1 } else { 0 }..=max_degree.min(order));
        let mut e = [0u32; N];
        for _ in 0..d {
            e[rng.gen_range(0..N)] += 1;
        }
        s.add_term(MultiIndex(e), gaussian(rng));
    }
    s
}
