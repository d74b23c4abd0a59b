use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rational::{ratio, Rational};

/// Deterministic stream for task `task` of a run seeded with `seed`.
pub fn task_rng(seed: u64, task: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}

/// Uniform over `{p/q : 1 ≤ q ≤ max_denom, lo·q ≤ p ≤ hi·q}` (by `q`, then `p`).
pub fn random_rational<R: Rng + ?Sized>(rng: &mut R, lo: i64, hi: i64, max_denom: i64) -> Rational {
    let q = rng.gen_range(1..=max_denom);
    let p = rng.gen_range(lo * q..=hi * q);
    ratio(p, q)
}
