use thiserror::Error;

/// Errors produced by scheme construction, queries and searches.
///
/// Validation errors carry a witness so a failing matrix can be debugged
/// without re-running the validator by hand.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is not square or does not match the declared point count")]
    BadDimensions,

    #[error("point count {0} exceeds the supported maximum of 10000")]
    TooLarge(usize),

    #[error("relation count {0} exceeds the supported maximum of 255")]
    TooManyRelations(usize),

    #[error("relation index {0} does not occur in the matrix")]
    EmptyRelation(u16),

    #[error("diagonal relation violated at ({x},{y}): relation 0 must be exactly the diagonal")]
    NotAPartitionOfDiagonal { x: usize, y: usize },

    #[error("no converse for relation {s}: ({x},{y}) maps to {t1} but ({x2},{y2}) maps to {t2}")]
    NoConverse {
        s: u16,
        x: usize,
        y: usize,
        t1: u16,
        x2: usize,
        y2: usize,
        t2: u16,
    },

    #[error("intersection number a[{s}][{t}][{u}] is not constant: count {c1} at ({x},{y}) but {c2} at ({x2},{y2})")]
    NonConstantIntersection {
        s: u16,
        t: u16,
        u: u16,
        x: usize,
        y: usize,
        c1: u32,
        x2: usize,
        y2: usize,
        c2: u32,
    },

    #[error("complex product of an empty relation set")]
    EmptyFactor,

    #[error("relation set is not closed under the complex product")]
    NotClosed,

    #[error("permutation group is not transitive")]
    NotTransitive,

    #[error("group is not abelian")]
    NotAbelian,

    #[error("map is not an automorphism of the group")]
    NotAutomorphism,

    #[error("search aborted after exceeding the node budget of {0}")]
    Budget(u64),

    #[error("not a p-scheme for p = {0}")]
    NotPScheme(u32),

    #[error("scheme is not commutative")]
    NotCommutative,

    #[error("scheme has order {got}, expected {expected}")]
    WrongOrder { got: usize, expected: usize },

    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),

    #[error("no generator choice satisfies the frame conditions: {0}")]
    ChoiceExhausted(String),

    #[error("frame invariant violated: {0}")]
    FrameInvalid(String),

    #[error("case reduction failed in case {case}: {reason}")]
    CaseReductionFailed { case: &'static str, reason: String },

    #[error("certificate check failed: {0}")]
    CertificateFailed(String),

    #[error("parse error at line {line}, column {col}: {msg}")]
    ParseError { line: usize, col: usize, msg: String },

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
