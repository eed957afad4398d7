use std::fmt;

/// Line/column position in a source text, both 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LangErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("duplicate declaration of `{0}`")]
    DuplicateDeclaration(String),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("constant `{0}` has no value; bind it with --const {0}=VALUE")]
    UnboundConstant(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("variable `{var}` assigned {value}, outside its range [{low}..{high}]")]
    RangeOverflow {
        var: String,
        value: i64,
        low: i64,
        high: i64,
    },
    #[error("command {command} has an invalid distribution: {detail}")]
    InvalidDistribution { command: String, detail: String },
    #[error("interval lower bound {lower} exceeds upper bound {upper}")]
    InvertedInterval { lower: String, upper: String },
    #[error("{0}")]
    Unsupported(String),
    #[error("unknown label \"{0}\"")]
    UnknownLabel(String),
}

/// Error raised while parsing or elaborating a model or query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LangError {
    pub kind: LangErrorKind,
    pub pos: Option<Pos>,
}

impl LangError {
    pub fn new(kind: LangErrorKind, pos: Pos) -> Self {
        LangError {
            kind,
            pos: Some(pos),
        }
    }

    pub fn at(kind: LangErrorKind, pos: Option<Pos>) -> Self {
        LangError { kind, pos }
    }

    pub fn nowhere(kind: LangErrorKind) -> Self {
        LangError { kind, pos: None }
    }
}

impl fmt::Display for LangError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pos {
            Some(p) => write!(f, "{p}: {}", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

impl std::error::Error for LangError {}
