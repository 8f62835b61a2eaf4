//! Seeded generators of interval inventory situations for property tests
//! and benchmarks.
//!
//! Frequencies are drawn as `m.lo ~ U[0.1, 50]`, `m.hi = m.lo·u` with
//! `u ~ U[1, 3]`. Ordering costs are `U[1, 250]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::interval::Interval;
use crate::inventory::IntervalInventorySituation;

const MAX_TRIES: usize = 100_000;

/// The generator used throughout the test suites.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn frequency<R: Rng>(rng: &mut R) -> Interval {
    let lo = rng.gen_range(0.1..50.0);
    let hi = lo * rng.gen_range(1.0..3.0);
    Interval::new(lo, hi).expect("u >= 1")
}

/// One draw, no validity filtering.
pub fn situation<R: Rng>(rng: &mut R, n: usize) -> IntervalInventorySituation {
    let a = rng.gen_range(1.0..250.0);
    let m = (0..n).map(|_| frequency(rng)).collect();
    IntervalInventorySituation::numbered(a, m).expect("generated data is well-formed")
}

/// Frequency bounds drawn independently from `U[0, 100]` and sorted, so
/// degenerate and near-zero intervals occur.
pub fn unordered_bounds<R: Rng>(rng: &mut R, n: usize) -> IntervalInventorySituation {
    let a = rng.gen_range(1.0..250.0);
    let m = (0..n)
        .map(|_| {
            let x = rng.gen_range(0.0..100.0);
            let y = rng.gen_range(0.0..100.0);
            Interval::new(f64::min(x, y), f64::max(x, y)).expect("sorted")
        })
        .collect();
    IntervalInventorySituation::numbered(a, m).expect("generated data is well-formed")
}

/// Rejection-samples until `accept` holds.
pub fn situation_where<R, F>(rng: &mut R, n: usize, accept: F) -> IntervalInventorySituation
where
    R: Rng,
    F: Fn(&IntervalInventorySituation) -> bool,
{
    for _ in 0..MAX_TRIES {
        let s = situation(rng, n);
        if accept(&s) {
            return s;
        }
    }
    panic!("no acceptable situation with {n} agents after {MAX_TRIES} draws");
}

/// A situation on which the interval SOC-rule is defined.
pub fn soc_valid<R: Rng>(rng: &mut R, n: usize) -> IntervalInventorySituation {
    situation_where(rng, n, |s| s.soc_valid())
}

/// A size-monotonic situation whose `(n-1)`-agent restrictions are
/// size-monotonic too.
pub fn monotonic_with_monotonic_restrictions<R: Rng>(rng: &mut R, n: usize) -> IntervalInventorySituation {
    situation_where(rng, n, |s| {
        s.shapley_valid() && (0..s.n()).all(|j| s.n() < 2 || s.without_agent(j).is_ok_and(|r| r.shapley_valid()))
    })
}

/// Replaces agent `k`'s frequency with `[0,0]`.
pub fn with_inactive(s: &IntervalInventorySituation, k: usize) -> IntervalInventorySituation {
    let mut m = s.frequencies().to_vec();
    m[k] = Interval::ZERO;
    s.with_frequencies(m).expect("zero frequency is valid")
}
