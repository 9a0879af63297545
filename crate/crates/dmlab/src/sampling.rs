//! Seeded random configurations for the lower mass bound check.

use dmlab_core::doubling::Eq21Trial;
use dmlab_core::geom::RationalInterval;
use dmlab_core::rational::{pow2, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `count` trials `(A, x, r)` on the scan grid of `depth`: `A` has
/// endpoints in `2^-(depth+1) Z`, `x` is a grid point of `A`, and `r` is a
/// dyadic radius `2^-k <= 1/2` below `diam A`.
pub fn eq21_trials(depth: u32, count: usize, seed: u64) -> Vec<Eq21Trial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 1i64 << (depth + 1);
    let step = pow2(-(depth as i64 + 1));
    let at = |i: i64| Rational::from_integer(i.into()) * &step;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a = rng.random_range(0..n);
        let b = rng.random_range(a + 2..=n.max(a + 2)).min(n);
        if b - a < 2 {
            continue;
        }
        let x = rng.random_range(a..=b);
        let len = at(b - a);
        let k = rng.random_range(1..=depth as i64);
        let r = pow2(-k);
        if r >= len {
            continue;
        }
        out.push(Eq21Trial {
            a: RationalInterval::closed(at(a), at(b)).expect("grid interval"),
            x: at(x),
            r,
        });
    }
    out
}
