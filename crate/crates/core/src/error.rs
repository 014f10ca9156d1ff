use thiserror::Error;

/// Errors raised while constructing or combining objects.
///
/// Axiom failures of otherwise well-formed objects are not errors; they are
/// returned as report entries by the various `validate_*` functions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("element `{element}` does not belong to {group}")]
    DescriptorMismatch { element: String, group: String },
    #[error("`{op}` is only defined for free group elements")]
    NotFree { op: &'static str },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("invalid multiplication table: {0}")]
    InvalidTable(String),
    #[error("invalid group element syntax: {0}")]
    ElementSyntax(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("map is not injective: {0}")]
    NotInjective(String),
    #[error("invalid partial dynamical system: {0}")]
    InvalidSystem(String),
    #[error("invalid groupoid: {0}")]
    InvalidGroupoid(String),
    #[error("refusing to answer from truncated data: {0}")]
    Truncated(String),
    #[error("morphism error: {0}")]
    Morphism(String),
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(crate::category::Hypothesis),
    #[error("invalid partition: {0}")]
    Partition(String),
    #[error("invalid graph data: {0}")]
    Graph(String),
    #[error("invalid boolean dynamical system: {0}")]
    Boolean(String),
    #[error("{0}")]
    Io(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
