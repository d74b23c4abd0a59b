//! Capacities (normalized monotone set functions), probability measures,
//! duality and the Möbius transform.

use std::ops::{Deref, Index};

use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::error::Error;
use crate::rational::{one, zero, Rational};
use crate::set_algebra::{GroundSet, Subset};

/// Why a value table is not a capacity.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("table has {got} entries, expected 2^n = {expected}")]
    WrongLength { expected: usize, got: usize },

    #[error("C1 violated: c({subset}) = {value}, expected {expected}")]
    Boundary { subset: Subset, value: Rational, expected: Rational },

    #[error("value c({subset}) = {value} lies outside [0, 1]")]
    OutOfRange { subset: Subset, value: Rational },

    #[error("C2 violated: {smaller} ⊂ {larger} but c({smaller}) = {smaller_value} > c({larger}) = {larger_value}")]
    Monotonicity { smaller: Subset, larger: Subset, smaller_value: Rational, larger_value: Rational },
}

/// A certified capacity: `c(∅) = 0`, `c(Ω) = 1`, monotone under inclusion.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Capacity {
    ground: GroundSet,
    #[serde(serialize_with = "crate::rational::serialize_vec")]
    values: Vec<Rational>,
}

impl Capacity {
    /// Validates a dense table in binary-counting order (bit `i` = atom `i`).
    pub fn new(ground: GroundSet, values: Vec<Rational>) -> Result<Self, ValidationError> {
        validate_table(&ground, &values)?;
        Ok(Capacity { ground, values })
    }

    pub fn from_fn(ground: GroundSet, mut f: impl FnMut(Subset) -> Rational) -> Result<Self, ValidationError> {
        let values = ground.subsets().map(&mut f).collect();
        Self::new(ground, values)
    }

    /// `c(A) = 1` iff `target ⊆ A`.
    pub fn unanimity(ground: GroundSet, target: Subset) -> Result<Self, Error> {
        ground.check(target)?;
        if target.is_empty() {
            return Err(Error::InvalidInput("unanimity capacity needs a non-empty carrier".into()));
        }
        Ok(Self::from_fn(ground, |a| if target.is_subset_of(a) { one() } else { zero() })?)
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value(&self, s: Subset) -> &Rational {
        &self.values[s.index()]
    }

    pub fn atoms(&self) -> usize {
        self.ground.len()
    }

    pub(crate) fn same_ground(&self, other: &Capacity) -> Result<(), Error> {
        if self.ground == other.ground {
            Ok(())
        } else {
            Err(Error::GroundSetMismatch)
        }
    }

    /// The dual capacity `A ↦ 1 − c(Aᶜ)`.
    pub fn conjugate(&self) -> Capacity {
        let values = self.ground.subsets().map(|a| one() - &self[self.ground.complement(a)]).collect();
        Capacity { ground: self.ground.clone(), values }
    }

    /// True iff `other ≤ self` pointwise.
    pub fn dominates(&self, other: &Capacity) -> Result<bool, Error> {
        self.same_ground(other)?;
        Ok(self.values.iter().zip(&other.values).all(|(hi, lo)| lo <= hi))
    }

    /// First set where `other` exceeds `self`, if any.
    pub fn first_excess(&self, other: &Capacity) -> Result<Option<Subset>, Error> {
        self.same_ground(other)?;
        Ok(self.ground.subsets().find(|&a| other[a] > self[a]))
    }

    /// First pair `(A, B)` in index order breaking the modular equality.
    pub fn first_non_modular_pair(&self) -> Option<(Subset, Subset)> {
        for a in self.ground.subsets() {
            for b in self.ground.subsets().skip(a.index() + 1) {
                if self[a.union(b)].clone() + &self[a.intersection(b)] != self[a].clone() + &self[b] {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// Additivity, checked through the atom decomposition.
    pub fn is_additive(&self) -> bool {
        let atoms: Vec<&Rational> = (0..self.atoms()).map(|i| &self.values[1 << i]).collect();
        self.ground.subsets().all(|a| a.atoms().map(|i| atoms[i]).fold(zero(), |acc, v| acc + v) == self[a])
    }

    pub fn mobius(&self) -> MobiusRepresentation {
        let mut mass = self.values.clone();
        fast_mobius(&mut mass);
        MobiusRepresentation { ground: self.ground.clone(), mass }
    }
}

impl Index<Subset> for Capacity {
    type Output = Rational;

    fn index(&self, s: Subset) -> &Rational {
        &self.values[s.index()]
    }
}

fn validate_table(ground: &GroundSet, values: &[Rational]) -> Result<(), ValidationError> {
    let expected = ground.subset_count();
    if values.len() != expected {
        return Err(ValidationError::WrongLength { expected, got: values.len() });
    }
    let full = ground.full();
    if !values[0].is_zero() {
        return Err(ValidationError::Boundary { subset: Subset::EMPTY, value: values[0].clone(), expected: zero() });
    }
    if values[full.index()] != one() {
        return Err(ValidationError::Boundary { subset: full, value: values[full.index()].clone(), expected: one() });
    }
    for s in ground.subsets() {
        let v = &values[s.index()];
        if v.is_negative() || *v > one() {
            return Err(ValidationError::OutOfRange { subset: s, value: v.clone() });
        }
    }
    // Covering pairs A ⊂ A ∪ {i} suffice for monotonicity.
    for s in ground.subsets() {
        for i in (0..ground.len()).filter(|&i| !s.contains_atom(i)) {
            let t = s.with_atom(i);
            if values[s.index()] > values[t.index()] {
                return Err(ValidationError::Monotonicity {
                    smaller: s,
                    larger: t,
                    smaller_value: values[s.index()].clone(),
                    larger_value: values[t.index()].clone(),
                });
            }
        }
    }
    Ok(())
}

/// In-place subset-sum inversion: `m(A) = Σ_{B⊆A} (−1)^{|A∖B|} f(B)`.
pub(crate) fn fast_mobius(table: &mut [Rational]) {
    let n = table.len().trailing_zeros();
    for bit in 0..n {
        let step = 1usize << bit;
        for a in 0..table.len() {
            if a & step != 0 {
                let lower = table[a ^ step].clone();
                table[a] -= lower;
            }
        }
    }
}

/// In-place subset-sum: `f(A) = Σ_{B⊆A} m(B)`.
pub(crate) fn fast_zeta(table: &mut [Rational]) {
    let n = table.len().trailing_zeros();
    for bit in 0..n {
        let step = 1usize << bit;
        for a in 0..table.len() {
            if a & step != 0 {
                let lower = table[a ^ step].clone();
                table[a] += lower;
            }
        }
    }
}

/// A capacity certified additive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct ProbabilityMeasure {
    capacity: Capacity,
}

impl ProbabilityMeasure {
    pub fn try_from_capacity(capacity: Capacity) -> Result<Self, Error> {
        if capacity.is_additive() {
            Ok(ProbabilityMeasure { capacity })
        } else {
            let (a, b) = capacity.first_non_modular_pair().expect("a non-additive capacity has a non-modular pair");
            Err(Error::NotAdditive { a, b })
        }
    }

    /// Extends non-negative atom weights summing to one additively.
    pub fn from_atom_weights(ground: GroundSet, weights: &[Rational]) -> Result<Self, Error> {
        if weights.len() != ground.len() {
            return Err(Error::InvalidInput(format!("{} atom weights for {} atoms", weights.len(), ground.len())));
        }
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(Error::InvalidInput(format!("negative atom weight {w}")));
        }
        let total: Rational = weights.iter().sum();
        if total != one() {
            return Err(Error::InvalidInput(format!("atom weights sum to {total}, not 1")));
        }
        let values = ground.subsets().map(|a| a.atoms().map(|i| &weights[i]).sum()).collect();
        Ok(ProbabilityMeasure { capacity: Capacity::new(ground, values)? })
    }

    pub fn capacity(&self) -> &Capacity {
        &self.capacity
    }

    pub fn into_capacity(self) -> Capacity {
        self.capacity
    }

    pub fn atom_weight(&self, atom: usize) -> &Rational {
        &self.capacity.values[1 << atom]
    }

    pub fn atom_weights(&self) -> Vec<Rational> {
        (0..self.capacity.atoms()).map(|i| self.atom_weight(i).clone()).collect()
    }
}

impl Deref for ProbabilityMeasure {
    type Target = Capacity;

    fn deref(&self) -> &Capacity {
        &self.capacity
    }
}

/// Möbius masses `m(A)` of a capacity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MobiusRepresentation {
    ground: GroundSet,
    #[serde(serialize_with = "crate::rational::serialize_vec")]
    mass: Vec<Rational>,
}

impl MobiusRepresentation {
    /// Masses with `m(∅) = 0` and total one. Signs are unconstrained.
    pub fn new(ground: GroundSet, mass: Vec<Rational>) -> Result<Self, Error> {
        if mass.len() != ground.subset_count() {
            return Err(Error::InvalidInput(format!("{} masses for {} subsets", mass.len(), ground.subset_count())));
        }
        if !mass[0].is_zero() {
            return Err(Error::InvalidInput("mass on the empty set must be 0".into()));
        }
        let total: Rational = mass.iter().sum();
        if total != one() {
            return Err(Error::InvalidInput(format!("masses sum to {total}, not 1")));
        }
        Ok(MobiusRepresentation { ground, mass })
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn mass(&self, s: Subset) -> &Rational {
        &self.mass[s.index()]
    }

    pub fn masses(&self) -> &[Rational] {
        &self.mass
    }

    pub fn is_nonnegative(&self) -> bool {
        self.mass.iter().all(|m| !m.is_negative())
    }

    /// First set carrying negative mass.
    pub fn first_negative(&self) -> Option<Subset> {
        self.ground.subsets().find(|&a| self.mass[a.index()].is_negative())
    }

    pub fn is_supported_on_singletons(&self) -> bool {
        self.ground.subsets().all(|a| a.len() == 1 || self.mass[a.index()].is_zero())
    }

    /// Zeta transform back to a set function, validated as a capacity.
    pub fn to_capacity(&self) -> Result<Capacity, ValidationError> {
        let mut values = self.mass.clone();
        fast_zeta(&mut values);
        Capacity::new(self.ground.clone(), values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn g(n: usize) -> GroundSet {
        GroundSet::numbered(n).unwrap()
    }

    pub(crate) fn seven_tenths() -> Capacity {
        Capacity::new(g(2), vec![zero(), ratio(7, 10), ratio(7, 10), one()]).unwrap()
    }

    /// Explicit alternating-sum inversion, independent of the butterfly.
    fn mobius_by_definition(c: &Capacity) -> Vec<Rational> {
        c.ground()
            .subsets()
            .map(|a| {
                c.ground()
                    .subsets()
                    .filter(|b| b.is_subset_of(a))
                    .map(|b| if (a.len() - b.len()) % 2 == 0 { c[b].clone() } else { -c[b].clone() })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn validation_accepts_uniform_probability() {
        let c = Capacity::new(g(2), vec![zero(), ratio(1, 2), ratio(1, 2), one()]).unwrap();
        assert!(c.is_additive());
    }

    #[test]
    fn validation_reports_boundary_violations() {
        let err = Capacity::new(g(2), vec![zero(), ratio(1, 2), ratio(1, 2), ratio(9, 10)]).unwrap_err();
        assert!(matches!(err, ValidationError::Boundary { subset: Subset(3), .. }));
        let err = Capacity::new(g(2), vec![zero(), ratio(3, 4), ratio(1, 4), ratio(1, 2)]).unwrap_err();
        assert!(matches!(err, ValidationError::Boundary { subset: Subset(3), .. }));
        let err = Capacity::new(g(2), vec![ratio(1, 10), ratio(3, 4), ratio(1, 4), one()]).unwrap_err();
        assert!(matches!(err, ValidationError::Boundary { subset: Subset(0), .. }));
    }

    #[test]
    fn validation_reports_range_and_monotonicity() {
        let err = Capacity::new(g(2), vec![zero(), ratio(3, 2), ratio(1, 4), one()]).unwrap_err();
        assert!(matches!(err, ValidationError::OutOfRange { subset: Subset(1), .. }));
        let err = Capacity::new(g(3), vec![zero(), ratio(1, 2), zero(), ratio(1, 4), zero(), zero(), zero(), one()])
            .unwrap_err();
        assert_eq!(
            err,
            ValidationError::Monotonicity {
                smaller: Subset(1),
                larger: Subset(3),
                smaller_value: ratio(1, 2),
                larger_value: ratio(1, 4)
            }
        );
        let err = Capacity::new(g(2), vec![zero(), one()]).unwrap_err();
        assert_eq!(err, ValidationError::WrongLength { expected: 4, got: 2 });
    }

    #[test]
    fn conjugate_of_seven_tenths() {
        let c = seven_tenths();
        let bar = c.conjugate();
        assert_eq!(bar.values(), &[zero(), ratio(3, 10), ratio(3, 10), one()]);
        assert_eq!(bar.conjugate(), c);
        assert!(c.dominates(&bar).unwrap());
        assert!(!bar.dominates(&c).unwrap());
        assert_eq!(bar.first_excess(&c).unwrap(), Some(Subset(1)));
    }

    #[test]
    fn conjugate_fixes_probabilities() {
        let p = ProbabilityMeasure::from_atom_weights(g(3), &[ratio(1, 6), ratio(1, 3), ratio(1, 2)]).unwrap();
        assert_eq!(p.conjugate(), *p.capacity());
    }

    #[test]
    fn dominance_is_reflexive_and_needs_a_shared_ground() {
        let c = seven_tenths();
        assert!(c.dominates(&c).unwrap());
        let other = Capacity::new(g(3), vec![zero(), zero(), zero(), zero(), zero(), zero(), zero(), one()]).unwrap();
        assert!(matches!(c.dominates(&other), Err(Error::GroundSetMismatch)));
    }

    #[test]
    fn mobius_examples() {
        let m = seven_tenths().mobius();
        assert_eq!(m.masses(), &[zero(), ratio(7, 10), ratio(7, 10), ratio(-4, 10)]);
        assert!(!m.is_nonnegative());
        assert_eq!(m.first_negative(), Some(Subset(3)));

        let p = ProbabilityMeasure::from_atom_weights(g(3), &[ratio(1, 6), ratio(1, 3), ratio(1, 2)]).unwrap();
        let m = p.mobius();
        assert!(m.is_supported_on_singletons());
        for i in 0..3 {
            assert_eq!(m.mass(Subset(1 << i)), p.atom_weight(i));
        }

        let u = Capacity::unanimity(g(3), Subset(0b110)).unwrap();
        let m = u.mobius();
        for a in g(3).subsets() {
            assert_eq!(*m.mass(a), if a == Subset(0b110) { one() } else { zero() });
        }
    }

    #[test]
    fn fast_mobius_matches_definition_and_roundtrips() {
        let c = Capacity::new(
            g(3),
            vec![zero(), ratio(1, 5), ratio(1, 3), ratio(1, 2), ratio(1, 4), ratio(1, 2), ratio(3, 5), one()],
        )
        .unwrap();
        let m = c.mobius();
        assert_eq!(m.masses(), mobius_by_definition(&c).as_slice());
        assert_eq!(m.to_capacity().unwrap(), c);
        assert_eq!(m.masses().iter().sum::<Rational>(), one());
    }

    #[test]
    fn non_additive_capacity_is_not_a_probability() {
        let err = ProbabilityMeasure::try_from_capacity(seven_tenths()).unwrap_err();
        assert!(matches!(err, Error::NotAdditive { a: Subset(1), b: Subset(2) }));
        assert!(ProbabilityMeasure::from_atom_weights(g(2), &[ratio(1, 2), ratio(1, 3)]).is_err());
        assert!(ProbabilityMeasure::from_atom_weights(g(2), &[ratio(3, 2), ratio(-1, 2)]).is_err());
    }
}
