//! Exact-arithmetic toolkit for capacities on finite ground sets.
//!
//! A capacity is a normalized, monotone set function on the power set of a
//! finite list of atoms. This crate classifies capacities (2-/k-/∞-
//! alternating and monotone), integrates against them (Choquet), and runs
//! the `c ↦ c^F` transform to extract probability measures that sit below a
//! 2-alternating capacity, agree with it along a chain, or lie between a
//! 2-alternating and a 2-monotone bound.
//!
//! All arithmetic is on reduced [`Rational`]s; nothing is approximate.

// Errors carry exact witness values.
#![allow(clippy::result_large_err)]

pub mod capacity;
pub mod choquet;
pub mod classify;
pub mod error;
pub mod generators;
pub mod rational;
pub mod rng;
pub mod set_algebra;
pub mod transforms;

pub use capacity::{Capacity, MobiusRepresentation, ProbabilityMeasure, ValidationError};
pub use choquet::{
    choquet_integral, comonotone_permutation, dominated_extreme_points, permutation_measure, subadditivity_search,
    MeasurableFunction, PermutationMeasureSet,
};
pub use classify::{
    classify, is_infinity_alternating, is_infinity_monotone, is_k_alternating, is_k_monotone, is_two_alternating,
    is_two_monotone, Budget, ClassificationReport, Witness,
};
pub use error::Error;
pub use rational::{parse_rational, Rational};
pub use set_algebra::{AtomPermutation, Chain, GroundSet, Subset};
pub use transforms::{
    chain_infimum, extract_chain_probability, find_strict_reduction, invariant_subfield, sandwich_probability,
    transform, ExtractionTrace, InvariantSubfield, PivotOrder,
};
