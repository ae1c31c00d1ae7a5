use thiserror::Error;

/// Errors raised by constructors and operations of this crate.
///
/// Structural errors (mismatched cardinalities, dangling ids, malformed
/// input) are reported here. Checks that merely find a property violated
/// return `false` or a failing report instead.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("value {value} at position {position} is outside 1..={target}")]
    ValueOutOfRange {
        position: usize,
        value: usize,
        target: usize,
    },

    #[error("cannot compose {left} with {right}: cardinalities do not match")]
    Composition { left: String, right: String },

    #[error("malformed finite map {0:?}")]
    Parse(String),

    #[error("invalid partition: {0}")]
    Partition(String),

    #[error("{0} is not selfic")]
    NotSelfic(String),

    #[error("square has mismatched cardinalities: {0}")]
    SquareShape(String),

    #[error("morphisms are not composable: {0}")]
    NotComposable(String),

    #[error("composite square violates the pullback injectivity condition: {0}")]
    ClosureViolation(String),

    #[error("invalid category: {0}")]
    InvalidCategory(String),

    #[error("invalid simplicial set: {0}")]
    InvalidSimplicialSet(String),

    #[error("invalid simplicial map: {0}")]
    InvalidSimplicialMap(String),

    #[error("square does not commute: {0}")]
    NonCommutingSquare(String),

    #[error("level {level} exceeds the stored dimension {max_dim}")]
    LevelOutOfRange { level: usize, max_dim: usize },

    #[error("{0} is not an object")]
    NotAnObject(usize),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid graph map: {0}")]
    InvalidGraphMap(String),

    #[error("not a covering: {0}")]
    NotACovering(String),

    #[error("start vertex {start} does not lie over {base}")]
    MisplacedStart { start: usize, base: usize },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("configuration is not injective: {0:?}")]
    NotInjective(Vec<usize>),

    #[error("invalid tower: {0}")]
    InvalidTower(String),
}

pub type Result<T> = std::result::Result<T, Error>;
