//! Exhaustive checkers for k-alternating / k-monotone capacities, the
//! Möbius criteria for the ∞-classes, and the aggregated report.
//!
//! The order-k inequalities are symmetric in their arguments, so the scans
//! walk sorted index tuples (multisets, repeats included). All comparisons
//! run on integer numerators over a common denominator.

use std::ops::{AddAssign, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::capacity::Capacity;
use crate::error::Error;
use crate::rational::Rational;
use crate::set_algebra::Subset;

/// Ceiling on the number of ordered tuples an order-k scan may cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub max_tuples: u128,
}

impl Budget {
    pub const DEFAULT_MAX_TUPLES: u128 = 1 << 22;

    pub fn new(max_tuples: u128) -> Self {
        Budget { max_tuples }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_tuples: Self::DEFAULT_MAX_TUPLES }
    }
}

/// Sets at which an inequality fails, with both sides evaluated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub sets: Vec<Subset>,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub lhs: Rational,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub rhs: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Alternating,
    Monotone,
}

/// Capacity values as integer numerators over one common denominator.
enum Scaled {
    Small(Vec<i128>),
    Big(Vec<BigInt>),
}

struct ScaledTable {
    denom: BigInt,
    table: Scaled,
}

impl ScaledTable {
    /// `headroom` bounds how many table values a single comparison sums.
    fn new(c: &Capacity, headroom: u32) -> Self {
        let denom = c.values().iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let numerators: Vec<BigInt> = c.values().iter().map(|v| v.numer() * (&denom / v.denom())).collect();
        let limit = i128::MAX >> headroom.min(120);
        let table = if denom.to_i128().is_some_and(|d| d <= limit) {
            Scaled::Small(numerators.iter().map(|v| v.to_i128().expect("numerator ≤ denominator")).collect())
        } else {
            Scaled::Big(numerators)
        };
        ScaledTable { denom, table }
    }

    fn rational<T: Clone + Into<BigInt>>(&self, v: &T) -> Rational {
        Rational::new(v.clone().into(), self.denom.clone())
    }
}

trait Numeric: Clone + Ord + Zero + for<'a> AddAssign<&'a Self> + for<'a> SubAssign<&'a Self> + Into<BigInt> {}
impl Numeric for i128 {}
impl Numeric for BigInt {}

fn first_pair_violation<T: Numeric>(table: &[T], dir: Direction) -> Option<(Subset, Subset, T, T)> {
    let size = table.len() as u32;
    for a in 0..size {
        for b in a + 1..size {
            if a & b == a || a & b == b {
                continue;
            }
            let mut lhs = table[(a | b) as usize].clone();
            lhs += &table[(a & b) as usize];
            let mut rhs = table[a as usize].clone();
            rhs += &table[b as usize];
            let broken = match dir {
                Direction::Alternating => lhs > rhs,
                Direction::Monotone => lhs < rhs,
            };
            if broken {
                return Some((Subset(a), Subset(b), lhs, rhs));
            }
        }
    }
    None
}

fn pair_check(c: &Capacity, dir: Direction) -> Option<Witness> {
    let scaled = ScaledTable::new(c, 2);
    let found = match &scaled.table {
        Scaled::Small(t) => {
            first_pair_violation(t, dir).map(|(a, b, l, r)| (a, b, scaled.rational(&l), scaled.rational(&r)))
        }
        Scaled::Big(t) => {
            first_pair_violation(t, dir).map(|(a, b, l, r)| (a, b, scaled.rational(&l), scaled.rational(&r)))
        }
    };
    found.map(|(a, b, lhs, rhs)| Witness { sets: vec![a, b], lhs, rhs })
}

/// `c(A∪B) + c(A∩B) ≤ c(A) + c(B)` for all pairs. Returns the first
/// violating pair in index order, `None` if the capacity is 2-alternating.
pub fn two_alternating_violation(c: &Capacity) -> Option<Witness> {
    pair_check(c, Direction::Alternating)
}

pub fn two_monotone_violation(c: &Capacity) -> Option<Witness> {
    pair_check(c, Direction::Monotone)
}

pub fn is_two_alternating(c: &Capacity) -> bool {
    two_alternating_violation(c).is_none()
}

pub fn is_two_monotone(c: &Capacity) -> bool {
    two_monotone_violation(c).is_none()
}

fn tuple_count(c: &Capacity, k: usize) -> u128 {
    (c.ground().subset_count() as u128).saturating_pow(k as u32)
}

fn check_order(c: &Capacity, k: usize, budget: Budget, dir: Direction) -> Result<Option<Witness>, Error> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("order must be at least 2, got {k}")));
    }
    if k > 16 {
        return Err(Error::InvalidInput(format!("order {k} exceeds the supported maximum of 16")));
    }
    let count = tuple_count(c, k);
    if count > budget.max_tuples {
        let kind = match dir {
            Direction::Alternating => "alternating",
            Direction::Monotone => "monotone",
        };
        return Err(Error::BudgetExceeded {
            what: format!("{k}-{kind} check on {} atoms", c.atoms()),
            count,
            budget: budget.max_tuples,
        });
    }
    // Each comparison sums up to 2^k values.
    let scaled = ScaledTable::new(c, k as u32 + 1);
    Ok(match &scaled.table {
        Scaled::Small(t) => scan_tuples(t, k, dir).map(|(s, l, r)| Witness {
            sets: s,
            lhs: scaled.rational(&l),
            rhs: scaled.rational(&r),
        }),
        Scaled::Big(t) => scan_tuples(t, k, dir).map(|(s, l, r)| Witness {
            sets: s,
            lhs: scaled.rational(&l),
            rhs: scaled.rational(&r),
        }),
    })
}

/// Walks all sorted k-tuples of subsets. For alternating, compares
/// `c(∩Aᵢ)` with the inclusion–exclusion sum over unions; for monotone,
/// `c(∪Aᵢ)` with the sum over intersections.
fn scan_tuples<T: Numeric>(table: &[T], k: usize, dir: Direction) -> Option<(Vec<Subset>, T, T)> {
    let size = table.len();
    let full = (size - 1) as u32;
    let mut idx = vec![0usize; k];
    let masks = 1usize << k;
    let mut combined = vec![0u32; masks];
    loop {
        // combined[mask] = ∪ (or ∩) of the sets selected by mask.
        combined[0] = match dir {
            Direction::Alternating => 0,
            Direction::Monotone => full,
        };
        let mut pos = T::zero();
        let mut neg = T::zero();
        for mask in 1..masks {
            let low = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            let set = idx[low] as u32;
            combined[mask] = match dir {
                Direction::Alternating => combined[rest] | set,
                Direction::Monotone => combined[rest] & set,
            };
            let v = &table[combined[mask] as usize];
            if mask.count_ones() % 2 == 1 {
                pos += v;
            } else {
                neg += v;
            }
        }
        let (outer, broken) = match dir {
            Direction::Alternating => {
                let meet = idx.iter().fold(full, |acc, &i| acc & i as u32);
                let mut lhs = table[meet as usize].clone();
                lhs += &neg;
                (meet, lhs > pos)
            }
            Direction::Monotone => {
                let join = idx.iter().fold(0u32, |acc, &i| acc | i as u32);
                let mut lhs = table[join as usize].clone();
                lhs += &neg;
                (join, lhs < pos)
            }
        };
        if broken {
            let mut rhs = pos;
            rhs -= &neg;
            return Some((idx.iter().map(|&i| Subset(i as u32)).collect(), table[outer as usize].clone(), rhs));
        }

        // Next non-decreasing tuple.
        let mut j = k;
        loop {
            if j == 0 {
                return None;
            }
            j -= 1;
            if idx[j] + 1 < size {
                let v = idx[j] + 1;
                for slot in &mut idx[j..] {
                    *slot = v;
                }
                break;
            }
        }
    }
}

/// `c(∩Aᵢ) ≤ Σ_{∅≠I} (−1)^{|I|+1} c(∪_{i∈I} Aᵢ)` for every k-tuple.
pub fn k_alternating_violation(c: &Capacity, k: usize, budget: Budget) -> Result<Option<Witness>, Error> {
    check_order(c, k, budget, Direction::Alternating)
}

/// `c(∪Aᵢ) ≥ Σ_{∅≠I} (−1)^{|I|+1} c(∩_{i∈I} Aᵢ)` for every k-tuple.
pub fn k_monotone_violation(c: &Capacity, k: usize, budget: Budget) -> Result<Option<Witness>, Error> {
    check_order(c, k, budget, Direction::Monotone)
}

pub fn is_k_alternating(c: &Capacity, k: usize, budget: Budget) -> Result<bool, Error> {
    Ok(k_alternating_violation(c, k, budget)?.is_none())
}

pub fn is_k_monotone(c: &Capacity, k: usize, budget: Budget) -> Result<bool, Error> {
    Ok(k_monotone_violation(c, k, budget)?.is_none())
}

/// All Möbius masses are non-negative.
pub fn is_infinity_monotone(c: &Capacity) -> bool {
    c.mobius().is_nonnegative()
}

/// The conjugate is ∞-monotone.
pub fn is_infinity_alternating(c: &Capacity) -> bool {
    c.conjugate().mobius().is_nonnegative()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails {
        witness: Witness,
    },
    /// A lower order already fails.
    ImpliedFails {
        by_order: usize,
    },
    /// Too many tuples to scan, but the ∞-criterion settles it.
    ImpliedHolds,
    Unchecked {
        tuples: u128,
        budget: u128,
    },
}

impl Verdict {
    pub fn holds(&self) -> Option<bool> {
        match self {
            Verdict::Holds | Verdict::ImpliedHolds => Some(true),
            Verdict::Fails { .. } | Verdict::ImpliedFails { .. } => Some(false),
            Verdict::Unchecked { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderResult {
    pub order: usize,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ladder {
    pub direction: Direction,
    /// Orders `2..=max_order`, ascending.
    pub orders: Vec<OrderResult>,
    /// Highest k such that every order `2..=k` holds; `None` if order 2 fails.
    pub highest_order: Option<usize>,
    pub infinity: bool,
    /// Negative Möbius mass witnessing failure of the ∞-class (of the
    /// conjugate, for the alternating ladder).
    pub infinity_witness: Option<Subset>,
}

impl Ladder {
    pub fn order(&self, k: usize) -> Option<&OrderResult> {
        self.orders.iter().find(|r| r.order == k)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub is_capacity: bool,
    pub max_order: usize,
    pub alternating: Ladder,
    pub monotone: Ladder,
    pub is_probability: bool,
}

fn ladder(c: &Capacity, max_order: usize, budget: Budget, dir: Direction) -> Result<Ladder, Error> {
    let mobius = match dir {
        Direction::Alternating => c.conjugate().mobius(),
        Direction::Monotone => c.mobius(),
    };
    let infinity_witness = mobius.first_negative();
    let infinity = infinity_witness.is_none();
    let mut orders = Vec::with_capacity(max_order.saturating_sub(1));
    let mut failed_at = None;
    for k in 2..=max_order {
        let verdict = if let Some(by_order) = failed_at {
            Verdict::ImpliedFails { by_order }
        } else {
            match check_order(c, k, budget, dir) {
                Ok(None) => Verdict::Holds,
                Ok(Some(witness)) => {
                    failed_at = Some(k);
                    Verdict::Fails { witness }
                }
                Err(Error::BudgetExceeded { count, budget, .. }) => {
                    if infinity {
                        Verdict::ImpliedHolds
                    } else {
                        Verdict::Unchecked { tuples: count, budget }
                    }
                }
                Err(e) => return Err(e),
            }
        };
        if infinity && matches!(verdict, Verdict::Fails { .. }) {
            return Err(Error::breach(
                "classify",
                format!("Möbius criterion says ∞-{dir:?} but the order-{k} scan fails"),
            ));
        }
        orders.push(OrderResult { order: k, verdict });
    }
    let highest_order = orders.iter().take_while(|r| r.verdict.holds() == Some(true)).last().map(|r| r.order);
    Ok(Ladder { direction: dir, orders, highest_order, infinity, infinity_witness })
}

/// Runs both ladders up to `max_order` plus the ∞-criteria.
pub fn classify(c: &Capacity, max_order: usize, budget: Budget) -> Result<ClassificationReport, Error> {
    if max_order < 2 {
        return Err(Error::InvalidInput(format!("max order must be at least 2, got {max_order}")));
    }
    let alternating = ladder(c, max_order, budget, Direction::Alternating)?;
    let monotone = ladder(c, max_order, budget, Direction::Monotone)?;
    let two = |l: &Ladder| l.orders[0].verdict.holds() == Some(true);
    let is_probability = two(&alternating) && two(&monotone);
    if is_probability != c.is_additive() {
        return Err(Error::breach("classify", "2-alternating ∧ 2-monotone disagrees with the additivity check"));
    }
    Ok(ClassificationReport { is_capacity: true, max_order, alternating, monotone, is_probability })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::ProbabilityMeasure;
    use crate::rational::{one, ratio, zero};
    use crate::set_algebra::GroundSet;

    fn g(n: usize) -> GroundSet {
        GroundSet::numbered(n).unwrap()
    }

    fn seven_tenths() -> Capacity {
        Capacity::new(g(2), vec![zero(), ratio(7, 10), ratio(7, 10), one()]).unwrap()
    }

    fn unanimity(n: usize) -> Capacity {
        Capacity::unanimity(g(n), g(n).full()).unwrap()
    }

    fn probability3() -> Capacity {
        ProbabilityMeasure::from_atom_weights(g(3), &[ratio(1, 6), ratio(1, 3), ratio(1, 2)]).unwrap().into_capacity()
    }

    /// Ordered tuples, inequality exactly as printed, directly on rationals.
    fn brute_force(c: &Capacity, k: usize, dir: Direction) -> bool {
        let size = c.ground().subset_count();
        let full = c.ground().full();
        let total = size.pow(k as u32);
        (0..total).all(|code| {
            let sets: Vec<Subset> = (0..k).map(|j| Subset((code / size.pow(j as u32) % size) as u32)).collect();
            let mut rhs = zero();
            for mask in 1usize..1 << k {
                let chosen = sets.iter().enumerate().filter(|(j, _)| mask >> j & 1 == 1).map(|(_, s)| *s);
                let inner = match dir {
                    Direction::Alternating => chosen.fold(Subset::EMPTY, Subset::union),
                    Direction::Monotone => chosen.fold(full, Subset::intersection),
                };
                if mask.count_ones() % 2 == 1 {
                    rhs += &c[inner];
                } else {
                    rhs -= &c[inner];
                }
            }
            match dir {
                Direction::Alternating => c[sets.iter().fold(full, |a, &s| a.intersection(s))] <= rhs,
                Direction::Monotone => c[sets.iter().fold(Subset::EMPTY, |a, &s| a.union(s))] >= rhs,
            }
        })
    }

    #[test]
    fn probabilities_pass_both_pair_checks() {
        let p = probability3();
        assert!(is_two_alternating(&p));
        assert!(is_two_monotone(&p));
    }

    #[test]
    fn seven_tenths_is_two_alternating_not_monotone() {
        let c = seven_tenths();
        assert!(is_two_alternating(&c));
        let w = two_monotone_violation(&c).unwrap();
        assert_eq!(w.sets, vec![Subset(1), Subset(2)]);
        assert_eq!(w.lhs, one());
        assert_eq!(w.rhs, ratio(14, 10));
    }

    #[test]
    fn unanimity_is_two_monotone_not_alternating() {
        let u = unanimity(2);
        assert!(is_two_monotone(&u));
        let w = two_alternating_violation(&u).unwrap();
        assert_eq!(w.sets, vec![Subset(1), Subset(2)]);
        assert_eq!((w.lhs, w.rhs), (one(), zero()));
    }

    #[test]
    fn order_k_examples() {
        let budget = Budget::default();
        assert!(is_k_alternating(&probability3(), 3, budget).unwrap());
        assert!(is_k_monotone(&probability3(), 4, budget).unwrap());
        assert!(is_k_monotone(&unanimity(3), 3, budget).unwrap());
        assert!(!is_k_monotone(&seven_tenths(), 2, budget).unwrap());
        // Plausibility from a non-negative mass: conjugate of a belief.
        let bel = Capacity::new(
            g(3),
            vec![zero(), ratio(1, 4), zero(), ratio(1, 2), zero(), ratio(1, 4), ratio(1, 4), one()],
        )
        .unwrap();
        assert!(bel.mobius().is_nonnegative());
        assert!(is_k_alternating(&bel.conjugate(), 3, budget).unwrap());
        // Dual of unanimity on n = 3: c(A) = 1 for all A ≠ ∅, a plausibility.
        let dual = unanimity(3).conjugate();
        assert!(dual.values()[1..].iter().all(|v| *v == one()));
        assert!(is_two_alternating(&dual));
        assert!(!is_two_monotone(&dual));
    }

    #[test]
    fn order_k_matches_ordered_brute_force() {
        let caps = [seven_tenths(), unanimity(2), unanimity(3), probability3(), unanimity(3).conjugate()];
        for c in &caps {
            for k in 2..=3 {
                for dir in [Direction::Alternating, Direction::Monotone] {
                    let fast = check_order(c, k, Budget::default(), dir).unwrap().is_none();
                    assert_eq!(fast, brute_force(c, k, dir), "{c:?} k={k} {dir:?}");
                }
            }
        }
    }

    #[test]
    fn order_two_scan_agrees_with_pair_check() {
        for c in [seven_tenths(), unanimity(2), unanimity(3).conjugate()] {
            assert_eq!(is_k_alternating(&c, 2, Budget::default()).unwrap(), is_two_alternating(&c));
            assert_eq!(is_k_monotone(&c, 2, Budget::default()).unwrap(), is_two_monotone(&c));
        }
    }

    #[test]
    fn budget_guard_names_tuple_count() {
        let err = is_k_alternating(&unanimity(3), 3, Budget::new(100)).unwrap_err();
        match err {
            Error::BudgetExceeded { count, budget, .. } => assert_eq!((count, budget), (512, 100)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(is_k_alternating(&unanimity(3), 1, Budget::default()).is_err());
    }

    #[test]
    fn infinity_criteria() {
        assert!(is_infinity_monotone(&probability3()));
        assert!(is_infinity_alternating(&probability3()));
        assert!(is_infinity_monotone(&unanimity(3)));
        assert!(!is_infinity_monotone(&seven_tenths()));
        assert!(is_infinity_alternating(&seven_tenths()));
        assert!(!is_infinity_alternating(&unanimity(2)));
    }

    #[test]
    fn classify_examples() {
        let uniform = Capacity::new(g(2), vec![zero(), ratio(1, 2), ratio(1, 2), one()]).unwrap();
        let r = classify(&uniform, 4, Budget::default()).unwrap();
        assert!(r.is_probability && r.alternating.infinity && r.monotone.infinity);
        assert_eq!(r.alternating.highest_order, Some(4));

        let r = classify(&seven_tenths(), 3, Budget::default()).unwrap();
        assert!(r.alternating.infinity && !r.is_probability);
        assert_eq!(r.alternating.highest_order, Some(3));
        assert_eq!(r.monotone.highest_order, None);
        assert!(matches!(r.monotone.orders[1].verdict, Verdict::ImpliedFails { by_order: 2 }));

        let r = classify(&unanimity(2), 3, Budget::default()).unwrap();
        assert!(r.monotone.infinity);
        assert_eq!(r.alternating.highest_order, None);
        assert!(matches!(r.alternating.orders[0].verdict, Verdict::Fails { .. }));
    }

    #[test]
    fn classify_marks_unchecked_orders() {
        // 7/10 example is ∞-alternating, so budget overflow is settled by Möbius.
        let r = classify(&seven_tenths(), 4, Budget::new(64)).unwrap();
        assert_eq!(r.alternating.order(4).unwrap().verdict, Verdict::ImpliedHolds);
        // Concave in |A| but with negative conjugate mass on Ω.
        let f = [zero(), ratio(1, 2), ratio(7, 8), one()];
        let c = Capacity::from_fn(g(3), |a| f[a.len()].clone()).unwrap();
        assert!(!is_infinity_alternating(&c));
        let r = classify(&c, 3, Budget::new(64)).unwrap();
        assert!(matches!(r.alternating.order(2).unwrap().verdict, Verdict::Holds));
        assert!(matches!(r.alternating.order(3).unwrap().verdict, Verdict::Unchecked { tuples: 512, budget: 64 }));
        assert_eq!(r.alternating.highest_order, Some(2));
    }
}
