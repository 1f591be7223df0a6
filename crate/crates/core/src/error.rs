use thiserror::Error;

/// Errors raised by oracles, solvers and the instance tooling.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ground set must contain between 1 and {max} elements, got {got}")]
    BadGroundSize { got: usize, max: usize },

    #[error("element {element} is outside the ground set of size {n}")]
    ElementOutOfRange { element: usize, n: usize },

    #[error("oracle returned negative value {value} on {set}")]
    NegativeValue { value: f64, set: String },

    #[error("element {0} is already in the set")]
    ElementPresent(usize),

    #[error("edge ({from}, {to}) has an endpoint outside 0..{n}")]
    BadEdge { from: usize, to: usize, n: usize },

    #[error("negative weight {0}")]
    NegativeWeight(f64),

    #[error("universe id {id} out of range 0..{universe}")]
    BadUniverseId { id: usize, universe: usize },

    #[error("negative profit entry {value} at client {client}, facility {facility}")]
    NegativeEntry { client: usize, facility: usize, value: f64 },

    #[error("input size {size} exceeds the exhaustive cap {cap}")]
    TooLarge { size: usize, cap: usize },

    #[error("table has {got} entries, expected {expected}")]
    BadTable { got: usize, expected: usize },

    #[error("input set is not independent")]
    DependentInput,

    #[error("cannot contract a dependent set")]
    DependentContraction,

    #[error("independence family is not a matroid: {0}")]
    NotAMatroid(String),

    #[error("internal contradiction: {0}")]
    InternalContradiction(String),

    #[error("ground set and oracle sizes disagree ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },

    #[error("no usable element in the ground set")]
    InfeasibleGround,

    #[error("matroid {0} is not a partition matroid")]
    NotPartition(usize),

    #[error("matroid has no two disjoint bases")]
    NoTwoBases,

    #[error("too many fractional coordinates: {got} > {cap}")]
    TooManyFractional { got: usize, cap: usize },

    #[error("grid resolution {0} does not divide 1")]
    BadGrid(f64),

    #[error("coordinate {index} = {value} outside [0, {upper}]")]
    BadPoint { index: usize, value: f64, upper: f64 },

    #[error("element {element} is infeasible as a singleton in knapsack {knapsack}")]
    SingletonInfeasible { element: usize, knapsack: usize },

    #[error("invalid parameters: {0}")]
    BadParams(String),

    #[error("algorithm {algorithm} does not apply to {constraint} constraints")]
    KindMismatch { algorithm: String, constraint: String },

    #[error("instance format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
