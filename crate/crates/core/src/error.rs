use thiserror::Error;

use crate::graph::VertexId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    // linear algebra
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has rank {rank} < {rows} rows")]
    RankDeficient { rank: usize, rows: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,

    // graph input and structure
    #[error("parse error: {0}")]
    Parse(String),
    #[error("graph is not a tree: {0}")]
    NotATree(String),
    #[error("intersection matrix is not negative definite")]
    NotNegativeDefinite,
    #[error("vertex {id} has weight {weight}; weights must be <= -1")]
    BadWeight { id: VertexId, weight: i64 },
    #[error("graph has {0} vertices; at least 2 are required")]
    TooSmall(usize),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("({0}, {1}) is not an edge")]
    NotAnEdge(VertexId, VertexId),
    #[error("{0} is not a current end")]
    NotAnEnd(VertexId),
    #[error("graph is not minimal: vertex {0} has weight -1 and at most two neighbours")]
    NotMinimal(VertexId),

    // lattice
    #[error("cycle is indexed by different vertices than the graph")]
    IndexMismatch,
    #[error("cycles live on different graphs")]
    GraphMismatch,
    #[error("vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    // enumeration and search limits
    #[error("{what}: size {size} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: String,
        cap: u64,
    },
    #[error("gcd of an empty set of cycles")]
    EmptySet,

    // pipeline
    #[error("monomial condition fails at node {node}, branch containing {branch_root}")]
    MonomialConditionFails {
        node: VertexId,
        branch_root: VertexId,
    },
    #[error("more than {0} blowups required")]
    MaxBlowupsExceeded(usize),
    #[error("internal inconsistency: multiplicity {0} is not a positive integer")]
    NonIntegerMultiplicity(String),
}

impl Error {
    pub(crate) fn cap(what: &'static str, size: impl ToString, cap: u64) -> Self {
        Error::CapExceeded {
            what,
            size: size.to_string(),
            cap,
        }
    }

    /// Process exit code under the command-line contract:
    /// 1 input/validation, 2 mathematical precondition, 3 resource cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapExceeded { .. } | Error::MaxBlowupsExceeded(_) => 3,
            Error::MonomialConditionFails { .. } | Error::NonIntegerMultiplicity(_) => 2,
            _ => 1,
        }
    }
}
