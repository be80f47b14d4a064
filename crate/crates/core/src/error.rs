use thiserror::Error;

/// Failure to read the KB or query text.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BddError {
    #[error("variable index {index} out of range (manager has {count} variables)")]
    VarOutOfRange { index: usize, count: usize },
    #[error("no probability for variable {0}")]
    MissingProbability(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Bdd(#[from] BddError),
    #[error("resource cap exceeded: more than {limit} {what}")]
    ResourceCap { what: &'static str, limit: usize },
    #[error("explanation cap exceeded: more than {cap} explanations")]
    ExplanationCap { cap: usize },
    #[error("oracle cap exceeded: {count} probabilistic axioms, cap is {cap}")]
    OracleCap { count: usize, cap: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
