#![allow(dead_code)]

use capkit_core::generators::{corpus, CorpusEntry, Family};
use capkit_core::rng::task_rng;
use capkit_core::{AtomPermutation, Capacity, Chain, GroundSet, Subset};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn ground(n: usize) -> GroundSet {
    GroundSet::numbered(n).unwrap()
}

/// `per_size` 2-alternating capacities for each atom count in `sizes`.
pub fn two_alternating_corpus(sizes: &[usize], per_size: usize, seed: u64) -> Vec<CorpusEntry> {
    sizes.iter().flat_map(|&n| corpus(n, &Family::TWO_ALTERNATING, per_size, seed + 1000 * n as u64).unwrap()).collect()
}

/// Every family, `per_size` capacities for each atom count in `sizes`.
pub fn full_corpus(sizes: &[usize], per_size: usize, seed: u64) -> Vec<CorpusEntry> {
    sizes.iter().flat_map(|&n| corpus(n, &Family::ALL, per_size, seed + 1000 * n as u64).unwrap()).collect()
}

/// A random sub-chain of the prefix chain of a random permutation.
pub fn random_chain(ground: &GroundSet, seed: u64) -> Chain {
    let mut rng = task_rng(seed, 99);
    let mut order: Vec<usize> = (0..ground.len()).collect();
    order.shuffle(&mut rng);
    let prefixes = AtomPermutation::new(order).unwrap().prefix_chain();
    let sets: Vec<Subset> = prefixes.into_iter().skip(1).filter(|_| rng.gen_bool(0.5)).collect();
    Chain::new(sets).unwrap()
}

pub fn describe(c: &Capacity) -> String {
    let values: Vec<String> = c.values().iter().map(|v| v.to_string()).collect();
    format!("n={} [{}]", c.atoms(), values.join(", "))
}
