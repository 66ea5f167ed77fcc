use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("{{{0}, {1}}} is not an edge")]
    NotAnEdge(usize, usize),
    #[error("invalid contractor: {0}")]
    InvalidContractor(String),
    #[error("vertex universe mismatch: expected {expected}, got {actual}")]
    UniverseMismatch { expected: usize, actual: usize },
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph has no vertices")]
    Empty,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecompositionError {
    #[error("tree-decomposition has no bags")]
    Empty,
    #[error("tree edge ({0}, {1}) references a missing bag")]
    BadTreeEdge(usize, usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid tree-decomposition: {0}")]
    Invalid(crate::decomposition::Violation),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PmcError {
    #[error("{0:?} is not a potential maximal clique")]
    NotPmc(Vec<usize>),
    #[error("refusing exhaustive enumeration on {n} vertices (cap {cap})")]
    TooLarge { n: usize, cap: usize },
    #[error("the PMC set admits no tree-decomposition")]
    Infeasible,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("deadline exceeded")]
    Timeout,
    #[error("no usable PMCs: the state has infinite width")]
    InfiniteWidth,
    #[error("block is not in the feasible set")]
    UnknownBlock,
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
    #[error(transparent)]
    Pmc(#[from] PmcError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}
