//! Seeded generators shared by unit tests.

use rand::Rng;

use crate::series_core::{GaussianRational, MultiIndex, TruncatedSeries};

/// A small Gaussian rational, real with probability one half.
pub fn gaussian<R: Rng>(rng: &mut R) -> GaussianRational {
    let re = GaussianRational::from_ratio(rng.gen_range(-5..=5), rng.gen_range(1..=4));
    if rng.gen_bool(0.5) {
        re
    } else {
        &re + &(&GaussianRational::i() * &GaussianRational::from_ratio(rng.gen_range(-3..=3), rng.gen_range(1..=3)))
    }
}

/// A random polynomial of degree at most `max_degree`, stored at `order`.
/// The constant term is omitted when `maximal` is set.
pub fn series<const N: usize, R: Rng>(rng: &mut R, max_degree: u32, order: u32, maximal: bool) -> TruncatedSeries<N> {
    let mut s = TruncatedSeries::zero(order);
    let terms = rng.gen_range(1..=6);
    for _ in 0..terms {
        let d = rng.gen_range(if maximal { 1 } else { 0 }..=max_degree.min(order));
        let mut e = [0u32; N];
        for _ in 0..d {
            e[rng.gen_range(0..N)] += 1;
        }
        s.add_term(MultiIndex(e), gaussian(rng));
    }
    s
}
