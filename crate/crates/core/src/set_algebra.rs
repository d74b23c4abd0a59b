//! Finite ground sets, subsets encoded as characteristic integers, chains and
//! atom permutations.
//!
//! A finite algebra of events is always handled as the power set of its
//! atoms; callers working with a partition pass the blocks as atoms.

use std::fmt;

use serde::Serialize;

use crate::error::Error;

pub const MAX_ATOMS: usize = 16;

/// An ordered list of distinct, named atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GroundSet {
    atoms: Vec<String>,
}

/// A subset of a ground set: bit `i` is set iff atom `i` belongs to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn contains_atom(self, atom: usize) -> bool {
        self.0 >> atom & 1 == 1
    }

    pub fn with_atom(self, atom: usize) -> Subset {
        Subset(self.0 | 1 << atom)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn atoms(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |i| bits >> i & 1 == 1)
    }
}

/// Renders as 1-based atom positions, e.g. `{1,3}`.
impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, atom) in self.atoms().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", atom + 1)?;
        }
        f.write_str("}")
    }
}

impl GroundSet {
    /// Atom names must be non-empty, unique, and free of the `,` and `|`
    /// separators used by the subset-key and chain syntaxes.
    pub fn new<I, S>(names: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let atoms: Vec<String> = names.into_iter().map(Into::into).collect();
        if atoms.is_empty() || atoms.len() > MAX_ATOMS {
            return Err(Error::InvalidInput(format!(
                "ground set must have between 1 and {MAX_ATOMS} atoms, got {}",
                atoms.len()
            )));
        }
        for (i, name) in atoms.iter().enumerate() {
            if name.trim().is_empty() || name.trim() != name {
                return Err(Error::InvalidInput(format!("atom name {name:?} is empty or padded")));
            }
            if name.contains(',') || name.contains('|') {
                return Err(Error::InvalidInput(format!("atom name {name:?} contains ',' or '|'")));
            }
            if atoms[..i].contains(name) {
                return Err(Error::InvalidInput(format!("duplicate atom name {name:?}")));
            }
        }
        Ok(GroundSet { atoms })
    }

    /// Atoms named `1`, `2`, ..., `n`.
    pub fn numbered(n: usize) -> Result<Self, Error> {
        Self::new((1..=n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atom_names(&self) -> &[String] {
        &self.atoms
    }

    /// Number of subsets, `2^n`.
    pub fn subset_count(&self) -> usize {
        1 << self.atoms.len()
    }

    pub fn full(&self) -> Subset {
        Subset(((1u64 << self.atoms.len()) - 1) as u32)
    }

    pub fn subsets(&self) -> impl Iterator<Item = Subset> {
        (0..self.subset_count() as u32).map(Subset)
    }

    pub fn subset(&self, bits: u32) -> Result<Subset, Error> {
        let s = Subset(bits);
        self.check(s)?;
        Ok(s)
    }

    pub fn singleton(&self, atom: usize) -> Result<Subset, Error> {
        if atom >= self.len() {
            return Err(Error::InvalidInput(format!("atom index {atom} out of range for n = {}", self.len())));
        }
        Ok(Subset(1 << atom))
    }

    pub fn check(&self, s: Subset) -> Result<(), Error> {
        if s.index() < self.subset_count() {
            Ok(())
        } else {
            Err(Error::SubsetOutOfRange { bits: s.0, atoms: self.len() })
        }
    }

    pub fn union(&self, a: Subset, b: Subset) -> Result<Subset, Error> {
        self.check(a)?;
        self.check(b)?;
        Ok(a.union(b))
    }

    pub fn intersection(&self, a: Subset, b: Subset) -> Result<Subset, Error> {
        self.check(a)?;
        self.check(b)?;
        Ok(a.intersection(b))
    }

    pub fn is_subset(&self, a: Subset, b: Subset) -> Result<bool, Error> {
        self.check(a)?;
        self.check(b)?;
        Ok(a.is_subset_of(b))
    }

    /// Complement relative to the ground set. Callers guarantee `s` is in range.
    pub fn complement(&self, s: Subset) -> Subset {
        Subset(self.full().0 & !s.0)
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == name)
    }

    /// Parses a comma-joined list of atom names; the empty string is `∅`.
    pub fn parse_subset(&self, key: &str) -> Result<Subset, Error> {
        let key = key.trim();
        if key.is_empty() {
            return Ok(Subset::EMPTY);
        }
        let mut s = Subset::EMPTY;
        for name in key.split(',') {
            let name = name.trim();
            let atom = self
                .atom_index(name)
                .ok_or_else(|| Error::Parse(format!("unknown atom {name:?} in subset {key:?}")))?;
            if s.contains_atom(atom) {
                return Err(Error::Parse(format!("atom {name:?} repeated in subset {key:?}")));
            }
            s = s.with_atom(atom);
        }
        Ok(s)
    }

    /// Comma-joined atom names in ground-set order; `∅` is the empty string.
    pub fn subset_key(&self, s: Subset) -> String {
        s.atoms().filter(|&i| i < self.len()).map(|i| self.atoms[i].as_str()).collect::<Vec<_>>().join(",")
    }

    /// Human-readable form, `{a,b}`.
    pub fn display_subset(&self, s: Subset) -> String {
        format!("{{{}}}", self.subset_key(s))
    }
}

/// A strictly increasing sequence of sets under inclusion.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Chain {
    sets: Vec<Subset>,
}

impl Chain {
    pub fn new(sets: Vec<Subset>) -> Result<Self, Error> {
        for pair in sets.windows(2) {
            if !(pair[0].is_subset_of(pair[1]) && pair[0] != pair[1]) {
                return Err(Error::InvalidInput(format!(
                    "chain is not strictly increasing: {} is not a proper subset of {}",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(Chain { sets })
    }

    /// Parses pipe-separated nested sets, e.g. `a|a,b`.
    pub fn parse(ground: &GroundSet, text: &str) -> Result<Self, Error> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Chain::default());
        }
        let sets = text.split('|').map(|key| ground.parse_subset(key)).collect::<Result<Vec<_>, _>>()?;
        for s in &sets {
            ground.check(*s)?;
        }
        Chain::new(sets)
    }

    pub fn sets(&self) -> &[Subset] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

/// A permutation of the atom positions `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct AtomPermutation {
    order: Vec<usize>,
}

impl AtomPermutation {
    pub fn new(order: Vec<usize>) -> Result<Self, Error> {
        let mut seen = vec![false; order.len()];
        for &i in &order {
            if i >= order.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidInput(format!("{order:?} is not a permutation of 0..{}", order.len())));
            }
        }
        Ok(AtomPermutation { order })
    }

    pub fn identity(n: usize) -> Self {
        AtomPermutation { order: (0..n).collect() }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Union of the first `i` atoms in permutation order; `i = 0` gives `∅`.
    pub fn prefix_set(&self, i: usize) -> Result<Subset, Error> {
        if i > self.order.len() {
            return Err(Error::InvalidInput(format!(
                "prefix length {i} exceeds permutation length {}",
                self.order.len()
            )));
        }
        Ok(self.order[..i].iter().fold(Subset::EMPTY, |s, &a| s.with_atom(a)))
    }

    /// The maximal chain `S_0 ⊂ S_1 ⊂ ... ⊂ S_n`, including `∅`.
    pub fn prefix_chain(&self) -> Vec<Subset> {
        let mut sets = Vec::with_capacity(self.order.len() + 1);
        let mut s = Subset::EMPTY;
        sets.push(s);
        for &a in &self.order {
            s = s.with_atom(a);
            sets.push(s);
        }
        sets
    }

    /// Lexicographic successor, `None` after the last permutation.
    pub fn next_lexicographic(&self) -> Option<AtomPermutation> {
        let mut order = self.order.clone();
        let i = (1..order.len()).rev().find(|&i| order[i - 1] < order[i])?;
        let j = (i..order.len()).rev().find(|&j| order[j] > order[i - 1])?;
        order.swap(i - 1, j);
        order[i..].reverse();
        Some(AtomPermutation { order })
    }

    pub fn all(n: usize) -> impl Iterator<Item = AtomPermutation> {
        std::iter::successors(Some(AtomPermutation::identity(n)), |p| p.next_lexicographic())
    }
}

/// 1-based, matching [`Subset`]'s display.
impl fmt::Display for AtomPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.order.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boolean_operations_on_encodings() {
        let g2 = GroundSet::numbered(2).unwrap();
        assert_eq!(g2.union(Subset(0b01), Subset(0b10)).unwrap(), Subset(0b11));
        let g3 = GroundSet::numbered(3).unwrap();
        assert_eq!(g3.complement(Subset(0b000)), Subset(0b111));
        assert!(g2.is_subset(Subset(0b01), Subset(0b11)).unwrap());
        assert!(!g2.is_subset(Subset(0b11), Subset(0b01)).unwrap());
    }

    #[test]
    fn subsets_from_another_ground_set_are_rejected() {
        let g2 = GroundSet::numbered(2).unwrap();
        assert!(matches!(g2.union(Subset(0b100), Subset(0b1)), Err(Error::SubsetOutOfRange { .. })));
        assert!(g2.intersection(Subset(0b1), Subset(0b1000)).is_err());
        assert!(g2.subset(4).is_err());
    }

    #[test]
    fn complement_is_an_involution_and_de_morgan_holds() {
        for n in 1..=4 {
            let g = GroundSet::numbered(n).unwrap();
            for a in g.subsets() {
                assert_eq!(g.complement(g.complement(a)), a);
                for b in g.subsets() {
                    assert_eq!(g.complement(a.union(b)), g.complement(a).intersection(g.complement(b)));
                    assert_eq!(g.complement(a.intersection(b)), g.complement(a).union(g.complement(b)));
                }
            }
        }
    }

    #[test]
    fn prefix_sets() {
        let pi = AtomPermutation::new(vec![1, 0]).unwrap();
        assert_eq!(pi.prefix_set(1).unwrap(), Subset(0b10));
        assert_eq!(pi.prefix_set(0).unwrap(), Subset::EMPTY);
        let pi3 = AtomPermutation::new(vec![2, 0, 1]).unwrap();
        assert_eq!(pi3.prefix_set(3).unwrap(), Subset(0b111));
        assert!(pi3.prefix_set(4).is_err());
    }

    #[test]
    fn prefix_chain_is_maximal_and_strict() {
        for pi in AtomPermutation::all(4) {
            let sets = pi.prefix_chain();
            assert_eq!(sets.len(), 5);
            for i in 0..sets.len() {
                assert_eq!(sets[i].len(), i);
                assert_eq!(sets[i], pi.prefix_set(i).unwrap());
                for j in i + 1..sets.len() {
                    assert!(sets[i].is_subset_of(sets[j]) && sets[i] != sets[j]);
                }
            }
            assert!(Chain::new(sets).is_ok());
        }
    }

    #[test]
    fn permutation_enumeration_is_complete() {
        assert_eq!(AtomPermutation::all(1).count(), 1);
        assert_eq!(AtomPermutation::all(4).count(), 24);
        let mut all: Vec<_> = AtomPermutation::all(4).collect();
        all.dedup();
        assert_eq!(all.len(), 24);
        assert!(AtomPermutation::new(vec![0, 0]).is_err());
        assert!(AtomPermutation::new(vec![0, 2]).is_err());
    }

    #[test]
    fn ground_set_validation() {
        assert!(GroundSet::new(["a", "a"]).is_err());
        assert!(GroundSet::new(["a", ""]).is_err());
        assert!(GroundSet::new(["a,b"]).is_err());
        assert!(GroundSet::new(Vec::<String>::new()).is_err());
        assert!(GroundSet::numbered(17).is_err());
        assert_eq!(GroundSet::numbered(16).unwrap().full(), Subset(0xffff));
    }

    #[test]
    fn keys_and_chains_parse() {
        let g = GroundSet::new(["a", "b", "c"]).unwrap();
        assert_eq!(g.parse_subset("").unwrap(), Subset::EMPTY);
        assert_eq!(g.parse_subset("c,a").unwrap(), Subset(0b101));
        assert_eq!(g.subset_key(Subset(0b101)), "a,c");
        assert!(g.parse_subset("a,a").is_err());
        assert!(g.parse_subset("d").is_err());
        let chain = Chain::parse(&g, "a|a,b").unwrap();
        assert_eq!(chain.sets(), &[Subset(0b001), Subset(0b011)]);
        assert!(Chain::parse(&g, "a,b|a").is_err());
        assert!(Chain::parse(&g, "a|a").is_err());
    }
}
