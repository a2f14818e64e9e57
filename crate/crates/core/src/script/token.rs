use std::collections::BTreeMap;
use std::fmt;

use crate::kernel::LibUri;

/// Half-open range of Unicode scalar offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Span {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn shift(self, by: usize) -> Span {
        Span { start: self.start + by, end: self.end + by }
    }

    pub fn to(self, other: Span) -> Span {
        Span { start: self.start, end: other.end }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Keyword,
    Symbol,
    Number,
    Str,
    Dot,
    Comment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// The token text. Strings drop their quotes; comments keep their
    /// delimiters and any embedded HTML verbatim.
    pub lexeme: String,
    pub span: Span,
    pub index: usize,
}

/// Hyperlink hints, keyed by token stream index.
pub type LinkTable = BTreeMap<usize, LibUri>;

/// A region that was wrapped in `<T>…</T>`, as inclusive token indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceRegion {
    pub first: usize,
    pub last: usize,
}

/// Tokens plus the side structures recovered from markup.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Lexed {
    pub tokens: Vec<Token>,
    pub links: LinkTable,
    pub traces: Vec<TraceRegion>,
}

impl Lexed {
    pub fn trace_starting_at(&self, index: usize) -> Option<TraceRegion> {
        self.traces.iter().copied().find(|t| t.first == index)
    }
}

/// A lexing or parsing failure, located in Unicode scalars.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message}")]
pub struct SyntaxError {
    pub message: String,
    pub span: Span,
}

impl SyntaxError {
    pub fn new(message: impl Into<String>, span: Span) -> SyntaxError {
        SyntaxError { message: message.into(), span }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}
