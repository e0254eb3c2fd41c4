use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graphs are limited to {max} vertices, got {n}")]
    TooManyVertices { n: usize, max: usize },
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("loop at vertex {vertex}")]
    Loop { vertex: usize },
    #[error("bitstring of length {len} is not an upper-triangular adjacency matrix")]
    BadBitstringLength { len: usize },
    #[error("unexpected character {c:?} in adjacency bitstring")]
    BadBitstringChar { c: char },
    #[error("type has {expected} vertices but {found} roots were given")]
    RootCount { expected: usize, found: usize },
    #[error("vertex {vertex} used twice as a root")]
    RepeatedRoot { vertex: usize },
    #[error("roots {i} and {j} do not induce the type's adjacency")]
    RootPatternMismatch { i: usize, j: usize },
    #[error("root vertex {vertex} is not in the subset")]
    RootNotInSubset { vertex: usize },
    #[error("flags have different types")]
    TypeMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("flag size {size} is smaller than the type order {type_order}")]
    SizeTooSmall { size: usize, type_order: usize },
    #[error("flag size {size} exceeds the enumeration cap of {max}")]
    SizeTooLarge { size: usize, max: usize },
    #[error("petals need {needed} free vertices but only {available} are available")]
    PetalBudget { needed: usize, available: usize },
    #[error("no flags given")]
    NoFlags,
    #[error("averaging needs a type of positive order")]
    ZeroOrderType,
    #[error("matrix dimension {found} does not match basis size {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("basis size {found} does not match the expected size {expected}")]
    BasisMismatch { expected: usize, found: usize },
}
