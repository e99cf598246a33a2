use std::fmt;

use serde::Serialize;

/// Half-open byte range into the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report. Syntax errors carry a span into the
/// original source; evaluation errors generally do not.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("unexpected character {found:?} at {span}")]
    Lex { span: Span, found: char },
    #[error("symbol of {len} characters at {span} exceeds the 100 character limit")]
    SymbolTooLong { span: Span, len: usize },
    #[error("integer literal at {span} is out of range")]
    IntegerOverflow { span: Span },
    #[error("empty expression")]
    EmptyExpression,
    #[error("expected {expected}, found {found} at {span}")]
    Parse {
        span: Span,
        expected: String,
        found: String,
    },
    #[error("dice cannot have a negative number of sides (at {span})")]
    NegativeSides { span: Span },
    #[error("dice must have at least one side (at {span})")]
    ZeroSides { span: Span },
    #[error("number of sides missing after 'd' at {span}")]
    MissingSides { span: Span },
    #[error("keep/drop count at {span} must not be negative")]
    NegativeKeepCount { span: Span },
    #[error("face list at {span} mixes numeric and symbolic faces")]
    MixedFaces { span: Span },
    #[error("range {start}..{end} at {span} is empty")]
    EmptyRange { span: Span, start: i64, end: i64 },
    #[error("face list at {span} has too many faces")]
    TooManyFaces { span: Span },
    #[error("pool of {requested} dice exceeds the limit of {max}")]
    PoolTooLarge { requested: i64, max: u64 },
    #[error("roll needs more than {max} random draws")]
    DrawLimit { max: u64 },
    #[error("{op} needs ordered faces and cannot be applied to symbolic dice")]
    SymbolicOrdering { op: &'static str },
    #[error("type error: {0}")]
    Type(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("arithmetic overflow")]
    ArithmeticOverflow,
    #[error("macro @{name} is not defined")]
    UndefinedMacro { name: String },
    #[error("macro @{name} nests deeper than {limit} levels")]
    MacroDepthExceeded { name: String, limit: u32 },
    #[error("randomness source exhausted")]
    SourceExhausted,
    #[error("scripted index {index} is out of range for a draw over {bound} outcomes")]
    ScriptOutOfRange { index: u64, bound: u64 },
    #[error("outcome space exceeds {max} evaluations")]
    StateSpaceTooLarge { max: u64 },
    #[error("invalid macro file line {line}: {message}")]
    MacroFile { line: usize, message: String },
}

impl Error {
    /// Stable, screaming-case identifier used by the JSON and C surfaces.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Lex { .. } => "LEX_ERROR",
            Error::SymbolTooLong { .. } => "SYMBOL_TOO_LONG",
            Error::IntegerOverflow { .. } => "INTEGER_OVERFLOW",
            Error::EmptyExpression => "EMPTY_EXPRESSION",
            Error::Parse { .. } => "PARSE_ERROR",
            Error::NegativeSides { .. } => "NEGATIVE_SIDES",
            Error::ZeroSides { .. } => "ZERO_SIDES",
            Error::MissingSides { .. } => "MISSING_SIDES",
            Error::NegativeKeepCount { .. } => "NEGATIVE_KEEP_COUNT",
            Error::MixedFaces { .. } => "MIXED_FACES",
            Error::EmptyRange { .. } => "EMPTY_RANGE",
            Error::TooManyFaces { .. } => "TOO_MANY_FACES",
            Error::PoolTooLarge { .. } => "POOL_TOO_LARGE",
            Error::DrawLimit { .. } => "DRAW_LIMIT",
            Error::SymbolicOrdering { .. } => "SYMBOLIC_ORDERING",
            Error::Type(_) => "TYPE_ERROR",
            Error::DivisionByZero => "DIVISION_BY_ZERO",
            Error::ArithmeticOverflow => "ARITHMETIC_OVERFLOW",
            Error::UndefinedMacro { .. } => "UNDEFINED_MACRO",
            Error::MacroDepthExceeded { .. } => "MACRO_DEPTH_EXCEEDED",
            Error::SourceExhausted => "SOURCE_EXHAUSTED",
            Error::ScriptOutOfRange { .. } => "SCRIPT_OUT_OF_RANGE",
            Error::StateSpaceTooLarge { .. } => "STATE_SPACE_TOO_LARGE",
            Error::MacroFile { .. } => "MACRO_FILE",
        }
    }

    pub fn span(&self) -> Option<Span> {
        match self {
            Error::Lex { span, .. }
            | Error::SymbolTooLong { span, .. }
            | Error::IntegerOverflow { span }
            | Error::Parse { span, .. }
            | Error::NegativeSides { span }
            | Error::ZeroSides { span }
            | Error::MissingSides { span }
            | Error::NegativeKeepCount { span }
            | Error::MixedFaces { span }
            | Error::EmptyRange { span, .. }
            | Error::TooManyFaces { span } => Some(*span),
            _ => None,
        }
    }

    /// True for resource guards (as opposed to mistakes in the expression).
    pub fn is_limit(&self) -> bool {
        matches!(
            self,
            Error::PoolTooLarge { .. }
                | Error::DrawLimit { .. }
                | Error::MacroDepthExceeded { .. }
                | Error::StateSpaceTooLarge { .. }
                | Error::SourceExhausted
                | Error::ScriptOutOfRange { .. }
        )
    }
}
