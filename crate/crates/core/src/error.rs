use thiserror::Error;

use crate::axioms::Witness;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("universe must contain at least one alternative")]
    EmptyUniverse,
    #[error("invalid alternative label {0:?}: labels are nonempty tokens without whitespace")]
    InvalidLabel(String),
    #[error("duplicate alternative label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown alternative {0:?}")]
    UnknownAlternative(String),
    #[error("universe of {size} alternatives exceeds the supported maximum of {max}")]
    UniverseTooLarge { size: usize, max: usize },
    #[error("size limit: {what} requires at most {max} alternatives, universe has {size}")]
    SizeLimit {
        what: &'static str,
        size: usize,
        max: usize,
    },
    #[error("choice sets must be nonempty")]
    EmptyChoiceSet,
    #[error("choice set contains alternatives outside the universe")]
    OutsideUniverse,
    #[error("duplicate choice set in family")]
    DuplicateSet,
    #[error("choice set is not in the family")]
    UnknownChoiceSet,
    #[error("alternative is not a member of the choice set")]
    NotAMember,
    #[error("event is not a subset of the choice set")]
    SubsetViolation,
    #[error("invalid distribution on choice set: {0}")]
    InvalidDistribution(String),
    #[error("correspondence value must be a nonempty subset of its choice set")]
    InvalidCorrespondence,
    #[error("objects are defined over different universes or families")]
    Mismatch,
    #[error("weak order must rank every alternative exactly once")]
    InvalidOrder,
    #[error("weights must be finite and strictly positive: {0}")]
    InvalidWeights(String),
    #[error("utility values must be finite")]
    InvalidUtility,
    #[error("noise level must be strictly positive and finite, got {0}")]
    InvalidNoise(f64),
    #[error("schedule must be a nonempty strictly decreasing list of positive values")]
    InvalidSchedule,
    #[error("family lacks the pair {0:?}")]
    MissingPairs(Vec<usize>),
    #[error("support correspondence is not rational (WARP fails)")]
    NotRational(Option<Box<Witness>>),
    #[error("choice axiom fails")]
    ChoiceAxiomFails(Box<Witness>),
    #[error("odds between alternatives {0} and {1} of one indifference class are degenerate")]
    DegenerateOdds(usize, usize),
    #[error("resynthesized rule differs from the input on a choice set")]
    ReconstructionMismatch,
    #[error("correspondence violates WARP; the general Luce model (GLM) is not supported")]
    WarpViolation(Box<Witness>),
    #[error("positive count outside the supplied correspondence")]
    CountsOffSupport,
    #[error("every observed choice set needs a positive total count")]
    EmptyObservation,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
