//! The `Π^F` transform `c ↦ c^F`, invariant subfields, and the constructions
//! that drive a 2-alternating capacity down to a probability measure.
//!
//! Every construction re-verifies its postconditions exactly before
//! returning. A failed check is reported as [`Error::TheoremViolation`]
//! together with the trace that led to it.

use serde::Serialize;

use crate::capacity::{Capacity, ProbabilityMeasure};
use crate::classify::{is_two_alternating, two_alternating_violation, two_monotone_violation};
use crate::error::Error;
use crate::rational::Rational;
use crate::rng::task_rng;
use crate::set_algebra::{Chain, Subset};

/// `c^F(B) = c(F∪B) + c(F∩B) − c(F)`, for any capacity. The result is only
/// guaranteed to be a capacity when `c` is 2-alternating.
fn apply(c: &Capacity, f: Subset) -> Result<Capacity, Error> {
    let cf = &c[f];
    Capacity::from_fn(c.ground().clone(), |b| &c[f.union(b)] + &c[f.intersection(b)] - cf)
        .map_err(|e| Error::breach("transform", format!("c^{f} is not a capacity: {e}")))
}

fn require_two_alternating(c: &Capacity, what: &str) -> Result<(), Error> {
    match two_alternating_violation(c) {
        None => Ok(()),
        Some(w) => Err(Error::Precondition(format!(
            "{what} must be 2-alternating; fails at A = {}, B = {}: {} > {}",
            w.sets[0], w.sets[1], w.lhs, w.rhs
        ))),
    }
}

/// `Π^F c = c^F` for a 2-alternating `c`.
pub fn transform(c: &Capacity, f: Subset) -> Result<Capacity, Error> {
    c.ground().check(f)?;
    require_two_alternating(c, "the capacity")?;
    apply(c, f)
}

/// `A` is invariant for `c` if `c(A∪B) + c(A∩B) = c(A) + c(B)` for every `B`.
pub fn is_invariant(c: &Capacity, a: Subset) -> bool {
    c.ground().subsets().all(|b| &c[a.union(b)] + &c[a.intersection(b)] == &c[a] + &c[b])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantSubfield {
    pub members: Vec<Subset>,
    /// Whether the members are closed under complement and union.
    pub is_closed_algebra: bool,
    #[serde(skip)]
    flags: Vec<bool>,
}

impl InvariantSubfield {
    pub fn contains(&self, s: Subset) -> bool {
        self.flags.get(s.index()).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// True when every subset is a member.
    pub fn is_everything(&self) -> bool {
        self.members.len() == self.flags.len()
    }

    pub fn is_subset_of(&self, other: &InvariantSubfield) -> bool {
        self.members.iter().all(|&s| other.contains(s))
    }

    pub fn non_members(&self) -> impl Iterator<Item = Subset> + '_ {
        self.flags.iter().enumerate().filter(|(_, &m)| !m).map(|(i, _)| Subset(i as u32))
    }
}

pub fn invariant_subfield(c: &Capacity) -> InvariantSubfield {
    let ground = c.ground();
    let flags: Vec<bool> = ground.subsets().map(|a| is_invariant(c, a)).collect();
    let members: Vec<Subset> = ground.subsets().filter(|a| flags[a.index()]).collect();
    let is_closed_algebra = members
        .iter()
        .all(|&a| flags[ground.complement(a).index()] && members.iter().all(|&b| flags[a.union(b).index()]));
    InvariantSubfield { members, is_closed_algebra, flags }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reduction {
    pub set: Subset,
    pub capacity: Capacity,
}

/// Lowest-index `F` with `c^F ≠ c`. `None` exactly when `c` is additive,
/// i.e. when `c` is minimal among 2-alternating capacities.
pub fn find_strict_reduction(c: &Capacity) -> Result<Option<Reduction>, Error> {
    require_two_alternating(c, "the capacity")?;
    for f in c.ground().subsets() {
        let reduced = apply(c, f)?;
        if reduced != *c {
            if !c.dominates(&reduced)? {
                return Err(Error::breach("find_strict_reduction", format!("c^{f} is not below c")));
            }
            return Ok(Some(Reduction { set: f, capacity: reduced }));
        }
    }
    if !c.is_additive() {
        return Err(Error::breach("find_strict_reduction", "no F moves c, yet c is not additive"));
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepPhase {
    /// Forcing a chain set into the invariant subfield.
    Chain,
    /// Enlarging the subfield until it is everything.
    Completion,
    Sandwich,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtractionStep {
    pub phase: StepPhase,
    pub set: Subset,
    pub before: Capacity,
    pub after: Capacity,
    pub subfield_before: usize,
    pub subfield_after: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Backtrack {
    /// Index of the step at which the candidate was rejected.
    pub step: usize,
    pub candidate: Subset,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub gap: Rational,
    /// A set where the candidate transform fell below the lower capacity.
    pub violated_at: Subset,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ExtractionTrace {
    pub steps: Vec<ExtractionStep>,
    pub backtracks: Vec<Backtrack>,
    #[serde(rename = "final")]
    pub final_measure: Option<ProbabilityMeasure>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case", tag = "order")]
pub enum PivotOrder {
    #[default]
    Lowest,
    Highest,
    Random {
        seed: u64,
    },
}

fn breach_with(construction: &'static str, detail: String, trace: &ExtractionTrace) -> Error {
    Error::TheoremViolation { construction, detail, trace: Some(Box::new(trace.clone())) }
}

/// A probability `P ≤ c` agreeing with `c` on every set of `chain`.
///
/// Phase one applies `Π^{F_i}` to each chain set not yet invariant; phase
/// two applies `Π^A` to non-invariant sets chosen by `pivot` until the
/// subfield is the whole power set.
pub fn extract_chain_probability(
    c: &Capacity,
    chain: &Chain,
    pivot: PivotOrder,
) -> Result<(ProbabilityMeasure, ExtractionTrace), Error> {
    const WHO: &str = "extract_chain_probability";
    require_two_alternating(c, "the capacity")?;
    for &f in chain.sets() {
        c.ground().check(f)?;
    }
    let mut trace = ExtractionTrace::default();
    let mut rng = match pivot {
        PivotOrder::Random { seed } => Some(task_rng(seed, 0)),
        _ => None,
    };
    let mut mu = c.clone();
    let mut subfield = invariant_subfield(&mu);

    loop {
        let pick = match chain.sets().iter().find(|&&f| !subfield.contains(f)) {
            Some(&f) => (StepPhase::Chain, f),
            None if subfield.is_everything() => break,
            None => {
                let candidates: Vec<Subset> = subfield.non_members().collect();
                let chosen = match (pivot, rng.as_mut()) {
                    (PivotOrder::Highest, _) => *candidates.last().expect("non-empty"),
                    (PivotOrder::Random { .. }, Some(rng)) => {
                        candidates[rand::Rng::gen_range(rng, 0..candidates.len())]
                    }
                    _ => candidates[0],
                };
                (StepPhase::Completion, chosen)
            }
        };
        let (phase, f) = pick;
        let next =
            transform(&mu, f).map_err(|e| breach_with(WHO, format!("step {}: {e}", trace.steps.len()), &trace))?;
        let next_subfield = invariant_subfield(&next);
        trace.steps.push(ExtractionStep {
            phase,
            set: f,
            before: mu.clone(),
            after: next.clone(),
            subfield_before: subfield.len(),
            subfield_after: next_subfield.len(),
        });

        if !next_subfield.contains(f) || !subfield.is_subset_of(&next_subfield) || next_subfield.len() <= subfield.len()
        {
            return Err(breach_with(WHO, format!("subfield did not strictly grow at {f}"), &trace));
        }
        if !mu.dominates(&next)? {
            return Err(breach_with(WHO, format!("μ^{f} is not below μ"), &trace));
        }
        if let Some(&g) = chain.sets().iter().find(|&&g| next[g] != c[g]) {
            return Err(breach_with(WHO, format!("chain value at {g} changed"), &trace));
        }
        if trace.steps.len() > c.ground().subset_count() {
            return Err(breach_with(WHO, "more than 2^n steps".into(), &trace));
        }
        mu = next;
        subfield = next_subfield;
    }

    let p = ProbabilityMeasure::try_from_capacity(mu)
        .map_err(|e| breach_with(WHO, format!("final capacity: {e}"), &trace))?;
    if !c.dominates(&p)? {
        return Err(breach_with(WHO, "final measure is not below c".into(), &trace));
    }
    trace.final_measure = Some(p.clone());
    Ok((p, trace))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailedCandidate {
    pub set: Subset,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub gap: Rational,
    pub violated_at: Subset,
}

/// Every remaining pivot would push the upper capacity below the lower one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PivotFailure {
    pub upper: Capacity,
    pub lower: Capacity,
    /// The upper capacity at the point of failure.
    pub current: Capacity,
    pub failed: Vec<FailedCandidate>,
    pub trace: ExtractionTrace,
}

/// A probability `P` with `lower ≤ P ≤ upper`, for 2-alternating `upper`
/// and 2-monotone `lower ≤ upper`.
///
/// Each step transforms by the non-invariant set of smallest gap
/// `upper(A) − lower(A)` (lowest index on ties). A candidate whose transform
/// is not above `lower` is skipped and logged in the trace's backtracks.
pub fn sandwich_probability(
    upper: &Capacity,
    lower: &Capacity,
) -> Result<(ProbabilityMeasure, ExtractionTrace), Error> {
    const WHO: &str = "sandwich_probability";
    upper.same_ground(lower)?;
    require_two_alternating(upper, "the upper capacity")?;
    if let Some(w) = two_monotone_violation(lower) {
        return Err(Error::Precondition(format!(
            "the lower capacity must be 2-monotone; fails at A = {}, B = {}: {} < {}",
            w.sets[0], w.sets[1], w.lhs, w.rhs
        )));
    }
    if let Some(a) = upper.first_excess(lower)? {
        return Err(Error::Precondition(format!(
            "the upper capacity must dominate the lower one; {} < {} at {a}",
            upper[a], lower[a]
        )));
    }

    let mut trace = ExtractionTrace::default();
    let mut mu = upper.clone();
    let mut subfield = invariant_subfield(&mu);
    while !subfield.is_everything() {
        let mut candidates: Vec<(Rational, Subset)> = subfield.non_members().map(|b| (&mu[b] - &lower[b], b)).collect();
        candidates.sort();
        let mut committed = None;
        let mut failed = Vec::new();
        for (gap, a) in candidates {
            let next = apply(&mu, a).map_err(|e| breach_with(WHO, e.to_string(), &trace))?;
            match next.first_excess(lower)? {
                None => {
                    committed = Some((a, next));
                    break;
                }
                Some(at) => {
                    trace.backtracks.push(Backtrack {
                        step: trace.steps.len(),
                        candidate: a,
                        gap: gap.clone(),
                        violated_at: at,
                    });
                    failed.push(FailedCandidate { set: a, gap, violated_at: at });
                }
            }
        }
        let Some((a, next)) = committed else {
            return Err(Error::NoValidPivot(Box::new(PivotFailure {
                upper: upper.clone(),
                lower: lower.clone(),
                current: mu,
                failed,
                trace,
            })));
        };
        let next_subfield = invariant_subfield(&next);
        trace.steps.push(ExtractionStep {
            phase: StepPhase::Sandwich,
            set: a,
            before: mu.clone(),
            after: next.clone(),
            subfield_before: subfield.len(),
            subfield_after: next_subfield.len(),
        });
        if !is_two_alternating(&next) {
            return Err(breach_with(WHO, format!("μ^{a} is not 2-alternating"), &trace));
        }
        if !next_subfield.contains(a) || !subfield.is_subset_of(&next_subfield) || next_subfield.len() <= subfield.len()
        {
            return Err(breach_with(WHO, format!("subfield did not strictly grow at {a}"), &trace));
        }
        if !mu.dominates(&next)? {
            return Err(breach_with(WHO, format!("μ^{a} is not below μ"), &trace));
        }
        mu = next;
        subfield = next_subfield;
    }

    let p = ProbabilityMeasure::try_from_capacity(mu)
        .map_err(|e| breach_with(WHO, format!("final capacity: {e}"), &trace))?;
    if !upper.dominates(&p)? || !p.dominates(lower)? {
        return Err(breach_with(WHO, "final measure is not between the bounds".into(), &trace));
    }
    trace.final_measure = Some(p.clone());
    Ok((p, trace))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainInfimum {
    pub infimum: Capacity,
    /// Position of the input equal to the infimum.
    pub minimum_index: usize,
}

/// Pointwise infimum of a totally ordered family of 2-alternating capacities.
pub fn chain_infimum(capacities: &[Capacity]) -> Result<ChainInfimum, Error> {
    let first = capacities.first().ok_or_else(|| Error::InvalidInput("chain infimum of an empty family".into()))?;
    for (i, c) in capacities.iter().enumerate() {
        first.same_ground(c)?;
        require_two_alternating(c, &format!("capacity #{i}"))?;
    }
    for i in 0..capacities.len() {
        for j in i + 1..capacities.len() {
            let (ci, cj) = (&capacities[i], &capacities[j]);
            if let (Some(up), Some(down)) = (cj.first_excess(ci)?, ci.first_excess(cj)?) {
                return Err(Error::Incomparable { first: i, second: j, up, down });
            }
        }
    }
    let ground = first.ground().clone();
    let infimum = Capacity::from_fn(ground, |a| capacities.iter().map(|c| &c[a]).min().expect("non-empty").clone())
        .map_err(|e| Error::breach("chain_infimum", format!("infimum is not a capacity: {e}")))?;
    if !is_two_alternating(&infimum) {
        return Err(Error::breach("chain_infimum", "infimum is not 2-alternating"));
    }
    let minimum_index = capacities
        .iter()
        .position(|c| *c == infimum)
        .ok_or_else(|| Error::breach("chain_infimum", "no member attains the infimum"))?;
    Ok(ChainInfimum { infimum, minimum_index })
}
