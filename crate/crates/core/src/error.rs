use thiserror::Error;

/// Errors raised by the core library.
///
/// Verification failures are not errors: checks report them as content.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("SyntaxError at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("UnknownSymbol: {0}")]
    UnknownSymbol(String),
    #[error("ArityError: {0}")]
    Arity(String),
    #[error("LanguageError: {0}")]
    Language(String),
    #[error("CapExceeded: {0}")]
    CapExceeded(String),
    #[error("UnknownInternIndex: {0}")]
    UnknownInternIndex(u64),
    #[error("CompositionError: {0}")]
    Composition(String),
    #[error("SignatureError: {0}")]
    Signature(String),
    #[error("ConfigError: {0}")]
    Config(String),
    #[error("OntoSigError: {0}")]
    OntoSig(String),
    #[error("DuplicateName: {0}")]
    DuplicateName(String),
    #[error("UnknownName: {0}")]
    UnknownName(String),
    #[error("ValidationFailed: {0}")]
    ValidationFailed(String),
    #[error("CycleError: {0}")]
    Cycle(String),
    #[error("EvidenceRefuted: {0}")]
    EvidenceRefuted(String),
    #[error("UnknownNode: {0}")]
    UnknownNode(String),
    #[error("MissingSplittingLink: {0}")]
    MissingSplittingLink(String),
    #[error("FormatError: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Syntax { line, col, msg: msg.into() }
    }
}
