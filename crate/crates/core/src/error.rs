use thiserror::Error;

/// Failures while reading or validating a presentation document.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid rational scalar `{0}`")]
    Scalar(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("edge `{edge}` references undeclared vertex `{vertex}`")]
    DanglingVertex { edge: String, vertex: String },
    #[error("tail mark on `{vertex}` rejected: {reason}")]
    InvalidTail { vertex: String, reason: String },
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("edge `{edge}` has color {color}, expected a value in 1..={k}")]
    BadColor { edge: String, color: usize, k: usize },
    #[error("rank k must be positive")]
    ZeroRank,
    #[error("missing factorisation square for composable pair ({0}, {1})")]
    MissingSquare(String, String),
    #[error("pair ({0}, {1}) appears in more than one square")]
    DuplicateSquare(String, String),
    #[error("square {first:?} = {second:?} is malformed: {reason}")]
    SquareMismatch {
        first: [String; 2],
        second: [String; 2],
        reason: String,
    },
    #[error("cube inconsistency on 3-color path {path:?}: reshuffles disagree")]
    CubeInconsistency { path: Vec<String> },
    #[error("vertex `{vertex}` emits no edge of color {color}; k-graphs must be row-finite without sinks in every color")]
    MissingColor { vertex: String, color: usize },
    #[error("tails are only supported for k = 1 presentations")]
    TailsInKGraph,
    #[error("generated name `{0}` collides with a declared identifier")]
    NameCollision(String),
    #[error("{0}")]
    Schema(String),
}

impl ParseError {
    pub(crate) fn from_json(err: &serde_json::Error) -> Self {
        ParseError::Syntax {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}

/// Failures of analysis operations on validated presentations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("loop through {cycle:?} has an exit at `{exit_vertex}`; no faithful graph trace exists")]
    LoopWithExit {
        cycle: Vec<String>,
        exit_vertex: String,
    },
    #[error("no value supplied for end `{0}`")]
    MissingEndValue(String),
    #[error("end value for `{0}` must be positive")]
    NonPositiveEndValue(String),
    #[error("unknown end `{0}`")]
    UnknownEnd(String),
    #[error("elements belong to different presentations")]
    PresentationMismatch,
    #[error("segment bounds out of range: need 0 <= {m:?} <= {n:?} <= {degree:?}")]
    SegmentOutOfRange {
        m: Vec<i64>,
        n: Vec<i64>,
        degree: Vec<i64>,
    },
    #[error("degree mismatch: expected {expected:?}, found {found:?}")]
    DegreeMismatch { expected: Vec<i64>, found: Vec<i64> },
    #[error("invalid permutation {0:?}")]
    BadPermutation(Vec<usize>),
    #[error("degree {requested:?} exceeds truncation level {limit}")]
    TruncationExceeded { requested: Vec<i64>, limit: u32 },
    #[error("degree-0 input is not diagonal: term S_{mu}S_{nu}*")]
    NonDiagonal { mu: String, nu: String },
    #[error("canonical form collision: two distinct paths from `{vertex}` reach end `{end}`")]
    AmbiguousEndPath { vertex: String, end: String },
    #[error("chain arity {0} is below the minimum of 2")]
    ArityTooSmall(usize),
    #[error("single exit violated at vertex `{vertex}` for color {color} ({count} entering edges)")]
    SingleExitViolated {
        vertex: String,
        color: usize,
        count: usize,
    },
    #[error("truncation basis is empty")]
    EmptyBasis,
    #[error("no rank-one decomposition of p_{vertex} Phi_{degree:?}: {reason}")]
    NoDecomposition {
        vertex: String,
        degree: Vec<i64>,
        reason: String,
    },
    #[error("window {0} is too small for a stable Dixmier estimate")]
    WindowTooSmall(u64),
    #[error("rank {0} outside the supported Clifford range 1..=12")]
    CliffordRank(usize),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
