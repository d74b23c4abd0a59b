//! Fixtures shared by the benchmarks.

use capkit_core::generators::{generate, Family};
use capkit_core::{Capacity, GroundSet};

/// A 2-alternating distorted probability on `n` atoms.
pub fn distorted(n: usize, seed: u64) -> Capacity {
    let g = GroundSet::numbered(n).expect("benchmark sizes are small");
    generate(&g, Family::Distorted, seed).expect("distortions always generate")
}
