//! Greedy value shrinking for counterexample capacities.

use capkit_core::{Capacity, Rational};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

const MAX_DENOMINATOR: i64 = 64;

/// Values on the grids `1/d` for `d` below the denominator of `v`, nearest
/// first within each grid, coarsest grid first.
fn simpler(v: &Rational) -> Vec<Rational> {
    let limit = v.denom().to_i64().unwrap_or(i64::MAX).min(MAX_DENOMINATOR + 1);
    let mut out: Vec<Rational> = Vec::new();
    for d in 1..limit {
        let d = BigInt::from(d);
        let scaled = v * Rational::from_integer(d.clone());
        for k in [scaled.floor(), scaled.ceil()] {
            let r = Rational::new(k.to_integer(), d.clone());
            if r.denom() < v.denom() && !out.contains(&r) {
                out.push(r);
            }
        }
    }
    out
}

/// Repeatedly replaces single table entries by values with smaller
/// denominators while `still_fails` keeps holding. `∅` and `Ω` are left alone.
pub fn shrink(inputs: Vec<Capacity>, still_fails: impl Fn(&[Capacity]) -> bool) -> Vec<Capacity> {
    let mut current = inputs;
    loop {
        let mut changed = false;
        for k in 0..current.len() {
            let size = current[k].values().len();
            for idx in 1..size.saturating_sub(1) {
                for candidate in simpler(&current[k].values()[idx]) {
                    let mut values = current[k].values().to_vec();
                    values[idx] = candidate;
                    let Ok(c) = Capacity::new(current[k].ground().clone(), values) else { continue };
                    let mut trial = current.clone();
                    trial[k] = c;
                    if still_fails(&trial) {
                        current = trial;
                        changed = true;
                        break;
                    }
                }
            }
        }
        if !changed {
            return current;
        }
    }
}

/// Sum of denominators; a crude size measure for witnesses.
pub fn complexity(c: &Capacity) -> BigInt {
    c.values().iter().fold(BigInt::one(), |acc, v| acc + v.denom())
}
