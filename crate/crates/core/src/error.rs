use thiserror::Error;

/// Parse failure at a specific source line. Samples that fail to parse are
/// reported and skipped, never fatal to a corpus run.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("syntax error at line {line}: {message}")]
pub struct SyntaxError {
    pub line: u32,
    pub message: String,
}

impl SyntaxError {
    pub fn new(line: u32, message: impl Into<String>) -> Self {
        SyntaxError { line, message: message.into() }
    }
}

/// Errors from applying an edit script to source text.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EditError {
    #[error("edits overlap at byte {0}")]
    Overlap(usize),
    #[error("edit out of bounds: {0}")]
    OutOfBounds(String),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CpgError {
    #[error("unsupported construct at line {line}: {what}")]
    UnsupportedConstruct { line: u32, what: String },
    #[error("unknown graph target: {0}")]
    UnknownTarget(String),
}

/// A perturbation recipe whose anchor tokens cannot be located or rewritten;
/// the variant is skipped and logged.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("uneditable witness for {feature}: {reason}")]
pub struct UneditableWitness {
    pub feature: String,
    pub reason: String,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("missing prediction for {0}")]
    MissingPrediction(String),
}
