use thiserror::Error;

use crate::capacity::ValidationError;
use crate::set_algebra::Subset;
use crate::transforms::{ExtractionTrace, PivotFailure};

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("subset {bits:#b} is outside the power set of {atoms} atoms")]
    SubsetOutOfRange { bits: u32, atoms: usize },

    #[error("operands live on different ground sets")]
    GroundSetMismatch,

    #[error(transparent)]
    Validation(#[from] ValidationError),

    #[error("not additive: c(A∪B) + c(A∩B) ≠ c(A) + c(B) at A = {a}, B = {b}")]
    NotAdditive { a: Subset, b: Subset },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Exhaustive enumeration would exceed the configured work ceiling.
    #[error("bound too large: {what} needs {count} tuples, budget is {budget}")]
    BudgetExceeded { what: String, count: u128, budget: u128 },

    #[error("capacities #{first} and #{second} are incomparable: they disagree in both directions at {up} and {down}")]
    Incomparable { first: usize, second: usize, up: Subset, down: Subset },

    #[error("no valid pivot: every candidate transform drops below the lower capacity")]
    NoValidPivot(Box<PivotFailure>),

    /// A verified postcondition of a construction failed.
    #[error("internal assertion breach in {construction}: {detail}")]
    TheoremViolation { construction: &'static str, detail: String, trace: Option<Box<ExtractionTrace>> },

    #[error("generator produced a capacity its checker rejects: {0}")]
    Generator(String),
}

impl Error {
    pub(crate) fn breach(construction: &'static str, detail: impl Into<String>) -> Self {
        Error::TheoremViolation { construction, detail: detail.into(), trace: None }
    }
}
