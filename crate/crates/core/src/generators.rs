//! Seeded constructions of test capacities in each class.
//!
//! Generators never certify their own output: every capacity is re-checked
//! with the classifiers before it is returned, and a rejection is a
//! generator bug ([`Error::Generator`]).

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::capacity::{Capacity, MobiusRepresentation, ProbabilityMeasure};
use crate::classify::{is_infinity_alternating, is_infinity_monotone, is_two_alternating, is_two_monotone};
use crate::error::Error;
use crate::rational::{format_rational, int, one, ratio, zero, Rational};
use crate::rng::task_rng;
use crate::set_algebra::{GroundSet, Subset};

// Stream ids keep generators with the same seed uncorrelated.
const STREAM_PROBABILITY: u64 = 1;
const STREAM_DISTORTION: u64 = 2;
const STREAM_BELIEF: u64 = 3;
const STREAM_REJECTION: u64 = 4;
const STREAM_PAIR: u64 = 5;
const STREAM_FAMILY: u64 = 6;

/// Piecewise-linear `f: [0,1] → [0,1]` through its breakpoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistortionFunction {
    #[serde(serialize_with = "serialize_breakpoints")]
    breakpoints: Vec<(Rational, Rational)>,
}

fn serialize_breakpoints<S: serde::Serializer>(points: &[(Rational, Rational)], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(points.iter().map(|(t, f)| [format_rational(t), format_rational(f)]))
}

impl DistortionFunction {
    pub fn new(breakpoints: Vec<(Rational, Rational)>) -> Result<Self, Error> {
        let bad = |msg: &str| Err(Error::InvalidInput(format!("distortion: {msg}")));
        if breakpoints.len() < 2 {
            return bad("needs at least two breakpoints");
        }
        let (first, last) = (&breakpoints[0], &breakpoints[breakpoints.len() - 1]);
        if !first.0.is_zero() || !first.1.is_zero() || last.0 != one() || last.1 != one() {
            return bad("must run from (0,0) to (1,1)");
        }
        for w in breakpoints.windows(2) {
            if w[1].0 <= w[0].0 {
                return bad("abscissae must be strictly increasing");
            }
            if w[1].1 < w[0].1 {
                return bad("must be non-decreasing");
            }
        }
        Ok(DistortionFunction { breakpoints })
    }

    pub fn identity() -> Self {
        DistortionFunction { breakpoints: vec![(zero(), zero()), (one(), one())] }
    }

    pub fn breakpoints(&self) -> &[(Rational, Rational)] {
        &self.breakpoints
    }

    fn slopes(&self) -> Vec<Rational> {
        self.breakpoints.windows(2).map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0)).collect()
    }

    pub fn is_concave(&self) -> bool {
        self.slopes().windows(2).all(|s| s[1] <= s[0])
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        let seg = self
            .breakpoints
            .windows(2)
            .find(|w| *t <= w[1].0)
            .unwrap_or_else(|| &self.breakpoints[self.breakpoints.len() - 2..]);
        let ((t0, f0), (t1, f1)) = (&seg[0], &seg[1]);
        f0 + (f1 - f0) * (t - t0) / (t1 - t0)
    }

    /// A concave distortion with 1–4 pieces, breakpoints on the tenths grid.
    pub fn random_concave<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let pieces = rng.gen_range(1..=4usize);
        let mut cuts: Vec<i64> = (1..10).collect();
        cuts.shuffle(rng);
        let mut cuts: Vec<i64> = cuts.into_iter().take(pieces - 1).collect();
        cuts.sort_unstable();
        let mut ts: Vec<Rational> = vec![zero()];
        ts.extend(cuts.into_iter().map(|k| ratio(k, 10)));
        ts.push(one());
        let mut slopes: Vec<i64> = (0..pieces).map(|_| rng.gen_range(0..=8)).collect();
        slopes.sort_unstable_by(|a, b| b.cmp(a));
        if slopes[0] == 0 {
            slopes[0] = 1;
        }
        let rises: Vec<Rational> = ts.windows(2).zip(&slopes).map(|(w, &s)| (&w[1] - &w[0]) * int(s)).collect();
        let total: Rational = rises.iter().sum();
        let mut breakpoints = vec![(zero(), zero())];
        let mut acc = zero();
        for (t, rise) in ts.into_iter().skip(1).zip(rises) {
            acc += rise / &total;
            breakpoints.push((t, acc.clone()));
        }
        DistortionFunction::new(breakpoints).expect("construction yields a valid distortion")
    }
}

/// Atom weights `p/q` (`q ≤ 64`), normalized to sum exactly to one.
pub fn random_probability(ground: &GroundSet, seed: u64) -> ProbabilityMeasure {
    let mut rng = task_rng(seed, STREAM_PROBABILITY);
    let mut weights: Vec<Rational> = (0..ground.len())
        .map(|_| {
            let q = rng.gen_range(1..=64i64);
            ratio(rng.gen_range(0..=q), q)
        })
        .collect();
    let mut total: Rational = weights.iter().sum();
    if total.is_zero() {
        weights[0] = one();
        total = one();
    }
    for w in &mut weights {
        *w /= &total;
    }
    ProbabilityMeasure::from_atom_weights(ground.clone(), &weights).expect("normalized weights")
}

/// `c(A) = f(P(A))`, certified 2-alternating.
pub fn distorted_probability(p: &ProbabilityMeasure, f: &DistortionFunction) -> Result<Capacity, Error> {
    if !f.is_concave() {
        return Err(Error::Precondition("distortion must be concave".into()));
    }
    let c = Capacity::from_fn(p.ground().clone(), |a| f.eval(&p[a]))
        .map_err(|e| Error::Generator(format!("distorted probability: {e}")))?;
    if !is_two_alternating(&c) {
        return Err(Error::Generator("concave distortion is not 2-alternating".into()));
    }
    Ok(c)
}

fn random_distorted(ground: &GroundSet, seed: u64) -> Result<Capacity, Error> {
    let p = random_probability(ground, seed);
    let f = DistortionFunction::random_concave(&mut task_rng(seed, STREAM_DISTORTION));
    distorted_probability(&p, &f)
}

fn belief_from_support(ground: &GroundSet, support: &[Subset], masses: &[Rational]) -> Result<Capacity, Error> {
    let total: Rational = masses.iter().sum();
    let mut table = vec![zero(); ground.subset_count()];
    for (s, m) in support.iter().zip(masses) {
        table[s.index()] += m / &total;
    }
    let mobius = MobiusRepresentation::new(ground.clone(), table)?;
    let c = mobius.to_capacity().map_err(|e| Error::Generator(format!("belief: {e}")))?;
    if !is_infinity_monotone(&c) {
        return Err(Error::Generator("belief function has negative Möbius mass".into()));
    }
    Ok(c)
}

/// Positive random masses on `support_size` distinct non-empty subsets,
/// summed up through the zeta transform. Certified ∞-monotone.
pub fn random_belief(ground: &GroundSet, seed: u64, support_size: usize) -> Result<Capacity, Error> {
    let available = ground.subset_count() - 1;
    if support_size == 0 || support_size > available {
        return Err(Error::InvalidInput(format!("support size must be in 1..={available}, got {support_size}")));
    }
    let mut rng = task_rng(seed, STREAM_BELIEF);
    let mut sets: Vec<Subset> = ground.subsets().skip(1).collect();
    sets.shuffle(&mut rng);
    sets.truncate(support_size);
    let masses: Vec<Rational> = sets
        .iter()
        .map(|_| {
            let q = rng.gen_range(1..=16i64);
            ratio(rng.gen_range(1..=q), q)
        })
        .collect();
    belief_from_support(ground, &sets, &masses)
}

/// Conjugate of [`random_belief`]; certified ∞-alternating.
pub fn random_plausibility(ground: &GroundSet, seed: u64, support_size: usize) -> Result<Capacity, Error> {
    let c = random_belief(ground, seed, support_size)?.conjugate();
    if !is_infinity_alternating(&c) {
        return Err(Error::Generator("plausibility is not ∞-alternating".into()));
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectionClass {
    TwoAlternating,
    TwoMonotone,
    TwoAlternatingNotInfinity,
}

impl RejectionClass {
    pub fn admits(self, c: &Capacity) -> bool {
        match self {
            RejectionClass::TwoAlternating => is_two_alternating(c),
            RejectionClass::TwoMonotone => is_two_monotone(c),
            RejectionClass::TwoAlternatingNotInfinity => is_two_alternating(c) && !is_infinity_alternating(c),
        }
    }
}

/// A uniformly drawn monotone table on the grid `{k/d}`.
///
/// `upward` fills subsets in increasing index order, each value uniform
/// between the largest value below it and one; otherwise the table is filled
/// downward, each value uniform between zero and the smallest value above.
pub fn random_monotone_table<R: Rng + ?Sized>(ground: &GroundSet, rng: &mut R, denom: i64, upward: bool) -> Capacity {
    let size = ground.subset_count();
    let n = ground.len();
    let full = size - 1;
    let mut grid = vec![0i64; size];
    grid[full] = denom;
    if upward {
        for a in 1..full {
            let lo = (0..n).filter(|i| a >> i & 1 == 1).map(|i| grid[a ^ 1 << i]).max().unwrap_or(0);
            grid[a] = rng.gen_range(lo..=denom);
        }
    } else {
        for a in (1..full).rev() {
            let hi = (0..n).filter(|i| a >> i & 1 == 0).map(|i| grid[a | 1 << i]).min().unwrap_or(denom);
            grid[a] = rng.gen_range(0..=hi);
        }
    }
    Capacity::new(ground.clone(), grid.into_iter().map(|k| ratio(k, denom)).collect())
        .expect("grid fill preserves monotonicity")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RejectionSample {
    pub capacity: Capacity,
    pub rejections: usize,
}

pub const DEFAULT_REJECTION_ATTEMPTS: usize = 200_000;

/// First random monotone grid table accepted by `class`.
pub fn rejection_sample_class(
    ground: &GroundSet,
    seed: u64,
    class: RejectionClass,
    denominator_bound: i64,
    max_attempts: usize,
) -> Result<RejectionSample, Error> {
    if denominator_bound < 2 {
        return Err(Error::InvalidInput(format!("denominator bound must be at least 2, got {denominator_bound}")));
    }
    let mut rng = task_rng(seed, STREAM_REJECTION);
    let upward = class != RejectionClass::TwoMonotone;
    for rejections in 0..max_attempts {
        let c = random_monotone_table(ground, &mut rng, denominator_bound, upward);
        if class.admits(&c) {
            return Ok(RejectionSample { capacity: c, rejections });
        }
    }
    Err(Error::Generator(format!("no {class:?} table found in {max_attempts} draws")))
}

/// A 2-alternating capacity from one of several families, chosen by seed.
pub fn random_two_alternating(ground: &GroundSet, seed: u64) -> Result<Capacity, Error> {
    let mut rng = task_rng(seed, STREAM_FAMILY);
    let families = if ground.len() <= 4 { 4 } else { 3 };
    match rng.gen_range(0..families) {
        0 => random_distorted(ground, seed),
        1 => {
            let support = rng.gen_range(1..ground.subset_count());
            random_plausibility(ground, seed, support)
        }
        2 => Ok(random_probability(ground, seed).into_capacity()),
        _ => Ok(rejection_sample_class(ground, seed, RejectionClass::TwoAlternating, 10, DEFAULT_REJECTION_ATTEMPTS)?
            .capacity),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairMode {
    /// `lower` is the conjugate of `upper`.
    #[default]
    Conjugate,
    /// `lower` is an independently drawn belief function, mixed toward the
    /// vacuous belief until `upper` dominates it.
    IndependentBelief,
}

/// `(upper, lower)` with `upper` 2-alternating, `lower` 2-monotone and
/// `lower ≤ upper`, all verified.
pub fn sandwich_pair(ground: &GroundSet, seed: u64, mode: PairMode) -> Result<(Capacity, Capacity), Error> {
    let upper = random_two_alternating(ground, seed)?;
    let lower = match mode {
        PairMode::Conjugate => upper.conjugate(),
        PairMode::IndependentBelief => dominated_belief(ground, seed, &upper)?,
    };
    if !is_two_monotone(&lower) || !upper.dominates(&lower)? {
        return Err(Error::Generator("sandwich pair fails its own hypotheses".into()));
    }
    Ok((upper, lower))
}

fn dominated_belief(ground: &GroundSet, seed: u64, upper: &Capacity) -> Result<Capacity, Error> {
    let mut rng = task_rng(seed, STREAM_PAIR);
    let full = ground.full();
    for attempt in 0..64u64 {
        let support = rng.gen_range(1..ground.subset_count());
        let bel = random_belief(ground, seed.wrapping_add(attempt << 32), support)?;
        for halvings in 0..4 {
            let weight = ratio(1, 1 << halvings);
            // λ·bel + (1 − λ)·vacuous, where vacuous(A) = 1 iff A = Ω.
            let mixed = Capacity::from_fn(ground.clone(), |a| {
                let vacuous = if a == full { one() } else { zero() };
                &weight * &bel[a] + (one() - &weight) * vacuous
            })
            .map_err(|e| Error::Generator(format!("belief mixture: {e}")))?;
            if upper.dominates(&mixed)? && mixed.values().iter().any(|v| v.is_positive() && *v != one()) {
                return Ok(mixed);
            }
        }
    }
    Err(Error::Generator("no dominated belief found".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Probability,
    Distorted,
    Plausibility,
    Belief,
    RejectionTwoAlternating,
    RejectionTwoMonotone,
    RejectionTwoAlternatingNotInfinity,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Probability,
        Family::Distorted,
        Family::Plausibility,
        Family::Belief,
        Family::RejectionTwoAlternating,
        Family::RejectionTwoMonotone,
        Family::RejectionTwoAlternatingNotInfinity,
    ];

    /// Families whose members are always 2-alternating.
    pub const TWO_ALTERNATING: [Family; 5] = [
        Family::Probability,
        Family::Distorted,
        Family::Plausibility,
        Family::RejectionTwoAlternating,
        Family::RejectionTwoAlternatingNotInfinity,
    ];

    pub fn is_two_alternating(self) -> bool {
        Self::TWO_ALTERNATING.contains(&self)
    }

    /// Whether the family can be drawn on `atoms` atoms at reasonable cost.
    pub fn supports(self, atoms: usize) -> bool {
        match self {
            Family::RejectionTwoAlternating | Family::RejectionTwoMonotone => atoms <= 4,
            // On two atoms every 2-alternating capacity is ∞-alternating.
            Family::RejectionTwoAlternatingNotInfinity => (3..=4).contains(&atoms),
            _ => true,
        }
    }
}

pub fn generate(ground: &GroundSet, family: Family, seed: u64) -> Result<Capacity, Error> {
    let mut rng = task_rng(seed, STREAM_FAMILY);
    let support = rng.gen_range(1..ground.subset_count().max(2));
    match family {
        Family::Probability => Ok(random_probability(ground, seed).into_capacity()),
        Family::Distorted => random_distorted(ground, seed),
        Family::Plausibility => random_plausibility(ground, seed, support),
        Family::Belief => random_belief(ground, seed, support),
        Family::RejectionTwoAlternating => {
            Ok(rejection_sample_class(ground, seed, RejectionClass::TwoAlternating, 10, DEFAULT_REJECTION_ATTEMPTS)?
                .capacity)
        }
        Family::RejectionTwoMonotone => {
            Ok(rejection_sample_class(ground, seed, RejectionClass::TwoMonotone, 10, DEFAULT_REJECTION_ATTEMPTS)?
                .capacity)
        }
        Family::RejectionTwoAlternatingNotInfinity => Ok(rejection_sample_class(
            ground,
            seed,
            RejectionClass::TwoAlternatingNotInfinity,
            10,
            DEFAULT_REJECTION_ATTEMPTS,
        )?
        .capacity),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusEntry {
    pub family: Family,
    pub seed: u64,
    pub capacity: Capacity,
}

/// `count` capacities on `atoms` atoms, cycling through the supported
/// members of `families`. Entry `i` uses seed `seed + i`.
pub fn corpus(atoms: usize, families: &[Family], count: usize, seed: u64) -> Result<Vec<CorpusEntry>, Error> {
    let ground = GroundSet::numbered(atoms)?;
    let usable: Vec<Family> = families.iter().copied().filter(|f| f.supports(atoms)).collect();
    if usable.is_empty() {
        return Err(Error::InvalidInput(format!("no requested family supports {atoms} atoms")));
    }
    (0..count)
        .map(|i| {
            let family = usable[i % usable.len()];
            let case_seed = seed.wrapping_add(i as u64);
            Ok(CorpusEntry { family, seed: case_seed, capacity: generate(&ground, family, case_seed)? })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{is_k_monotone, Budget};

    fn g(n: usize) -> GroundSet {
        GroundSet::numbered(n).unwrap()
    }

    #[test]
    fn probability_generation() {
        let p = random_probability(&g(1), 5);
        assert_eq!(p.atom_weights(), vec![one()]);
        assert_eq!(random_probability(&g(4), 11), random_probability(&g(4), 11));
        for seed in 0..20 {
            let p = random_probability(&g(4), seed);
            assert!(is_two_alternating(&p) && is_two_monotone(&p));
        }
    }

    #[test]
    fn distortion_examples() {
        let p = random_probability(&g(3), 2);
        assert_eq!(distorted_probability(&p, &DistortionFunction::identity()).unwrap(), *p.capacity());

        let uniform = ProbabilityMeasure::from_atom_weights(g(2), &[ratio(1, 2), ratio(1, 2)]).unwrap();
        let f = DistortionFunction::new(vec![(zero(), zero()), (ratio(1, 2), ratio(7, 10)), (one(), one())]).unwrap();
        let c = distorted_probability(&uniform, &f).unwrap();
        assert_eq!(c.values(), &[zero(), ratio(7, 10), ratio(7, 10), one()]);

        let convex =
            DistortionFunction::new(vec![(zero(), zero()), (ratio(1, 2), ratio(3, 10)), (one(), one())]).unwrap();
        assert!(!convex.is_concave());
        assert!(matches!(distorted_probability(&uniform, &convex), Err(Error::Precondition(_))));
    }

    #[test]
    fn distortion_validation() {
        assert!(DistortionFunction::new(vec![(zero(), zero())]).is_err());
        assert!(DistortionFunction::new(vec![(zero(), zero()), (one(), ratio(1, 2))]).is_err());
        assert!(DistortionFunction::new(vec![
            (zero(), zero()),
            (ratio(1, 2), one()),
            (ratio(1, 2), one()),
            (one(), one())
        ])
        .is_err());
        assert!(DistortionFunction::new(vec![
            (zero(), zero()),
            (ratio(1, 2), ratio(3, 4)),
            (ratio(3, 4), ratio(1, 2)),
            (one(), one())
        ])
        .is_err());
    }

    #[test]
    fn random_concave_distortions_give_two_alternating_capacities() {
        for seed in 0..40 {
            let f = DistortionFunction::random_concave(&mut task_rng(seed, 0));
            assert!(f.is_concave());
            assert_eq!(f.eval(&zero()), zero());
            assert_eq!(f.eval(&one()), one());
            let c = distorted_probability(&random_probability(&g(4), seed), &f).unwrap();
            assert!(is_two_alternating(&c));
        }
    }

    #[test]
    fn belief_examples() {
        let ground = g(3);
        let singletons: Vec<Subset> = (0..3).map(|i| Subset(1 << i)).collect();
        let c = belief_from_support(&ground, &singletons, &[ratio(1, 2), ratio(1, 3), ratio(1, 6)]).unwrap();
        assert!(c.is_additive());
        let u = belief_from_support(&ground, &[ground.full()], &[one()]).unwrap();
        assert_eq!(u, Capacity::unanimity(ground.clone(), ground.full()).unwrap());
        for seed in 0..20 {
            let b = random_belief(&ground, seed, 1 + seed as usize % 7).unwrap();
            assert!(is_infinity_monotone(&b));
            for k in 2..=4 {
                assert!(is_k_monotone(&b, k, Budget::default()).unwrap());
            }
        }
        assert!(random_belief(&ground, 0, 0).is_err());
        assert!(random_belief(&ground, 0, 8).is_err());
    }

    #[test]
    fn plausibility_examples() {
        let p = random_probability(&g(3), 1);
        assert_eq!(p.conjugate(), *p.capacity());
        let u = Capacity::unanimity(g(2), g(2).full()).unwrap().conjugate();
        assert_eq!(u.values(), &[zero(), one(), one(), one()]);
        for seed in 0..20 {
            assert!(is_infinity_alternating(&random_plausibility(&g(4), seed, 5).unwrap()));
        }
    }

    #[test]
    fn rejection_sampling_classes() {
        let seven = Capacity::new(g(2), vec![zero(), ratio(7, 10), ratio(7, 10), one()]).unwrap();
        assert!(RejectionClass::TwoAlternating.admits(&seven));
        for seed in 0..5 {
            let s = rejection_sample_class(&g(3), seed, RejectionClass::TwoMonotone, 10, 10_000).unwrap();
            assert!(is_two_monotone(&s.capacity));
            let s = rejection_sample_class(&g(3), seed, RejectionClass::TwoAlternatingNotInfinity, 10, 10_000).unwrap();
            assert!(is_two_alternating(&s.capacity) && !is_infinity_alternating(&s.capacity));
        }
        // Impossible on two atoms.
        assert!(rejection_sample_class(&g(2), 0, RejectionClass::TwoAlternatingNotInfinity, 10, 500).is_err());
        assert!(rejection_sample_class(&g(2), 0, RejectionClass::TwoAlternating, 1, 500).is_err());
    }

    #[test]
    fn monotone_tables_are_on_grid() {
        let mut rng = task_rng(0, 0);
        for upward in [true, false] {
            for _ in 0..50 {
                let c = random_monotone_table(&g(3), &mut rng, 4, upward);
                assert!(c.values().iter().all(|v| (v * int(4)).is_integer()));
            }
        }
    }

    #[test]
    fn sandwich_pairs_satisfy_hypotheses() {
        let mu = Capacity::new(g(2), vec![zero(), ratio(7, 10), ratio(7, 10), one()]).unwrap();
        let nu = mu.conjugate();
        assert_eq!(nu.values(), &[zero(), ratio(3, 10), ratio(3, 10), one()]);
        assert!(mu.dominates(&nu).unwrap());
        for seed in 0..10 {
            for mode in [PairMode::Conjugate, PairMode::IndependentBelief] {
                let (mu, nu) = sandwich_pair(&g(3), seed, mode).unwrap();
                assert!(is_two_alternating(&mu) && is_two_monotone(&nu) && mu.dominates(&nu).unwrap());
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        for family in Family::ALL {
            if family.supports(3) {
                assert_eq!(generate(&g(3), family, 42).unwrap(), generate(&g(3), family, 42).unwrap());
            }
        }
    }
}
