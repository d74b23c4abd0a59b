//! Choquet integration, the subadditivity probe, permutation measures and
//! the dominated extreme points they generate.

use std::collections::HashMap;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::capacity::{Capacity, ProbabilityMeasure};
use crate::error::Error;
use crate::rational::{one, Rational};
use crate::rng::{random_rational, task_rng};
use crate::set_algebra::{AtomPermutation, GroundSet, Subset};

/// A real function on the atoms, one exact value per atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct MeasurableFunction {
    #[serde(skip)]
    ground: GroundSet,
    #[serde(serialize_with = "crate::rational::serialize_vec")]
    values: Vec<Rational>,
}

impl MeasurableFunction {
    pub fn new(ground: GroundSet, values: Vec<Rational>) -> Result<Self, Error> {
        if values.len() != ground.len() {
            return Err(Error::InvalidInput(format!(
                "function has {} values for {} atoms",
                values.len(),
                ground.len()
            )));
        }
        Ok(MeasurableFunction { ground, values })
    }

    pub fn indicator(ground: GroundSet, set: Subset) -> Self {
        let values = (0..ground.len()).map(|i| if set.contains_atom(i) { one() } else { Rational::zero() }).collect();
        MeasurableFunction { ground, values }
    }

    pub fn constant(ground: GroundSet, k: Rational) -> Self {
        let values = vec![k; ground.len()];
        MeasurableFunction { ground, values }
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn add(&self, other: &MeasurableFunction) -> Result<MeasurableFunction, Error> {
        if self.ground != other.ground {
            return Err(Error::GroundSetMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(MeasurableFunction { ground: self.ground.clone(), values })
    }

    /// `λ·X + k`.
    pub fn affine(&self, scale: &Rational, shift: &Rational) -> MeasurableFunction {
        let values = self.values.iter().map(|v| v * scale + shift).collect();
        MeasurableFunction { ground: self.ground.clone(), values }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| !v.is_negative())
    }

    /// Components uniform on rationals with denominator ≤ 8 in `[−2, 2]`.
    pub fn random<R: rand::Rng + ?Sized>(ground: GroundSet, rng: &mut R) -> Self {
        let values = (0..ground.len()).map(|_| random_rational(rng, -2, 2, 8)).collect();
        MeasurableFunction { ground, values }
    }
}

/// Asymmetric Choquet integral via upper level sets:
/// with distinct values `v₁ > … > v_m` and `L_j = {X ≥ v_j}`,
/// `∫X dc = v_m + Σ_{j<m} (v_j − v_{j+1})·c(L_j)`.
pub fn choquet_integral(c: &Capacity, x: &MeasurableFunction) -> Result<Rational, Error> {
    if c.ground() != x.ground() {
        return Err(Error::GroundSetMismatch);
    }
    let mut levels: Vec<&Rational> = x.values.iter().collect();
    levels.sort_unstable_by(|a, b| b.cmp(a));
    levels.dedup();
    let lowest = levels.last().expect("ground sets are non-empty");
    let mut total = (*lowest).clone();
    for pair in levels.windows(2) {
        let (v, next) = (pair[0], pair[1]);
        let level_set =
            x.values.iter().enumerate().filter(|(_, xi)| *xi >= v).fold(Subset::EMPTY, |s, (i, _)| s.with_atom(i));
        total += (v - next) * &c[level_set];
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchPhase {
    Indicators,
    Random,
}

/// `∫(X+Y)dc > ∫X dc + ∫Y dc`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubadditivityCounterexample {
    pub phase: SearchPhase,
    pub x: MeasurableFunction,
    pub y: MeasurableFunction,
    /// The indicator sets, when found in the indicator phase.
    pub sets: Option<(Subset, Subset)>,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub integral_of_sum: Rational,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub sum_of_integrals: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubadditivityReport {
    pub indicator_pairs_checked: usize,
    pub samples_checked: usize,
    /// `None` means none found within budget, not a proof of subadditivity.
    pub counterexample: Option<SubadditivityCounterexample>,
}

fn subadditivity_gap(
    c: &Capacity,
    x: &MeasurableFunction,
    y: &MeasurableFunction,
) -> Result<Option<(Rational, Rational)>, Error> {
    let joint = choquet_integral(c, &x.add(y)?)?;
    let split = choquet_integral(c, x)? + choquet_integral(c, y)?;
    Ok((joint > split).then_some((joint, split)))
}

/// Looks for a pair breaking subadditivity of the integral: every indicator
/// pair first, then `samples` random pairs drawn from `seed`.
pub fn subadditivity_search(c: &Capacity, samples: usize, seed: u64) -> Result<SubadditivityReport, Error> {
    let ground = c.ground().clone();
    let mut report = SubadditivityReport { indicator_pairs_checked: 0, samples_checked: 0, counterexample: None };
    for a in ground.subsets() {
        for b in ground.subsets().skip(a.index() + 1) {
            report.indicator_pairs_checked += 1;
            let x = MeasurableFunction::indicator(ground.clone(), a);
            let y = MeasurableFunction::indicator(ground.clone(), b);
            if let Some((joint, split)) = subadditivity_gap(c, &x, &y)? {
                report.counterexample = Some(SubadditivityCounterexample {
                    phase: SearchPhase::Indicators,
                    x,
                    y,
                    sets: Some((a, b)),
                    integral_of_sum: joint,
                    sum_of_integrals: split,
                });
                return Ok(report);
            }
        }
    }
    let mut rng = task_rng(seed, 0);
    for _ in 0..samples {
        report.samples_checked += 1;
        let x = MeasurableFunction::random(ground.clone(), &mut rng);
        let y = MeasurableFunction::random(ground.clone(), &mut rng);
        if let Some((joint, split)) = subadditivity_gap(c, &x, &y)? {
            report.counterexample = Some(SubadditivityCounterexample {
                phase: SearchPhase::Random,
                x,
                y,
                sets: None,
                integral_of_sum: joint,
                sum_of_integrals: split,
            });
            return Ok(report);
        }
    }
    Ok(report)
}

/// The probability whose atom weights are the increments of `c` along the
/// prefix chain of `pi`: `P(atom π_i) = c(S_i) − c(S_{i−1})`.
pub fn permutation_measure(c: &Capacity, pi: &AtomPermutation) -> Result<ProbabilityMeasure, Error> {
    if pi.len() != c.atoms() {
        return Err(Error::InvalidInput(format!("permutation of {} atoms for a capacity on {}", pi.len(), c.atoms())));
    }
    let chain = pi.prefix_chain();
    let mut weights = vec![Rational::zero(); c.atoms()];
    for (i, &atom) in pi.order().iter().enumerate() {
        let step = &c[chain[i + 1]] - &c[chain[i]];
        if step.is_negative() {
            return Err(Error::breach("permutation_measure", format!("negative increment at atom {}", atom + 1)));
        }
        weights[atom] = step;
    }
    ProbabilityMeasure::from_atom_weights(c.ground().clone(), &weights)
}

/// Orders atoms by non-increasing value; ties keep ascending atom index.
pub fn comonotone_permutation(x: &MeasurableFunction) -> AtomPermutation {
    let mut order: Vec<usize> = (0..x.values.len()).collect();
    order.sort_by(|&a, &b| x.values[b].cmp(&x.values[a]));
    AtomPermutation::new(order).expect("sorted indices form a permutation")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaggedMeasure {
    pub measure: ProbabilityMeasure,
    pub permutations: Vec<AtomPermutation>,
}

/// Distinct permutation measures of a capacity, in order of first appearance
/// under lexicographic permutation enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PermutationMeasureSet {
    pub measures: Vec<TaggedMeasure>,
}

impl PermutationMeasureSet {
    pub fn len(&self) -> usize {
        self.measures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measures.is_empty()
    }
}

/// `8! = 40320`.
pub const DEFAULT_MAX_PERMUTATIONS: u64 = 40_320;

pub fn dominated_extreme_points(c: &Capacity, max_permutations: u64) -> Result<PermutationMeasureSet, Error> {
    let n = c.atoms() as u64;
    let count = (1..=n).try_fold(1u64, |acc, k| acc.checked_mul(k)).unwrap_or(u64::MAX);
    if count > max_permutations {
        return Err(Error::BudgetExceeded {
            what: format!("permutation enumeration on {n} atoms"),
            count: count.into(),
            budget: max_permutations.into(),
        });
    }
    let mut measures: Vec<TaggedMeasure> = Vec::new();
    let mut seen: HashMap<Vec<Rational>, usize> = HashMap::new();
    for pi in AtomPermutation::all(c.atoms()) {
        let p = permutation_measure(c, &pi)?;
        match seen.get(p.values()) {
            Some(&k) => measures[k].permutations.push(pi),
            None => {
                seen.insert(p.values().to_vec(), measures.len());
                measures.push(TaggedMeasure { measure: p, permutations: vec![pi] });
            }
        }
    }
    Ok(PermutationMeasureSet { measures })
}
