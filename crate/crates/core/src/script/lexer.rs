//! Markup-aware lexer.
//!
//! Hyperlink tags `<A href="URI">…</A>` and trace tags `<T>…</T>` produce no
//! tokens. A hyperlink must wrap exactly one identifier or symbol and is
//! recorded in the [`LinkTable`] under that token's stream index; trace
//! regions are recorded as token ranges. Inside comments markup is plain text.

use crate::kernel::{is_ident_char, LibUri};

use super::notation::NotationTable;
use super::token::{Lexed, Span, SyntaxError, Token, TokenKind, TraceRegion};

pub const KEYWORDS: &[&str] = &[
    "theorem", "axiom", "definition", "notation", "qed", "intro", "apply", "exact", "assumption", "split", "left",
    "right", "elim", "auto", "using", "depth", "for", "priority", "infixl", "infixr", "prefix",
];

pub const PUNCTUATION: &[&str] = &["(", ")", ",", ":", ":="];

/// Nullary connectives, lexed as symbols.
pub const CONSTANT_SYMBOLS: &[&str] = &["⊥", "⊤", "False", "True"];

const LINK_OPEN: &str = "<A href=\"";
const LINK_CLOSE: &str = "</A>";
const TRACE_OPEN: &str = "<T>";
const TRACE_CLOSE: &str = "</T>";

/// Lexes a whole text against a fixed notation table.
pub fn lex(text: &str, table: &NotationTable) -> Result<Lexed, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut lexer = Lexer::new(&chars, table);
    while lexer.next_token()?.is_some() {}
    lexer.finish()
}

/// One statement's worth of tokens, lexed from the start of a text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexedStatement {
    pub lexed: Lexed,
    /// Scalars consumed, through the terminating dot when there is one.
    pub len: usize,
    pub terminated: bool,
}

/// Lexes leading comments and one statement through its dot.
///
/// Returns `None` when only whitespace and comments remain: a trailing
/// comment is never consumed on its own.
pub fn lex_statement(chars: &[char], table: &NotationTable) -> Result<Option<LexedStatement>, SyntaxError> {
    let mut lexer = Lexer::new(chars, table);
    while let Some(kind) = lexer.next_token()? {
        if kind == TokenKind::Dot {
            let len = lexer.pos;
            return Ok(Some(LexedStatement { lexed: lexer.finish()?, len, terminated: true }));
        }
    }
    let lexed = lexer.finish()?;
    if lexed.tokens.iter().all(|t| t.kind == TokenKind::Comment) {
        return Ok(None);
    }
    Ok(Some(LexedStatement { lexed, len: chars.len(), terminated: false }))
}

struct OpenLink {
    uri: LibUri,
    tag: Span,
    first_token: usize,
}

struct OpenTrace {
    tag: Span,
    first_token: usize,
}

pub(crate) struct Lexer<'a> {
    chars: &'a [char],
    pos: usize,
    symbols: Vec<Vec<char>>,
    out: Lexed,
    link: Option<OpenLink>,
    trace: Option<OpenTrace>,
}

impl<'a> Lexer<'a> {
    pub(crate) fn new(chars: &'a [char], table: &NotationTable) -> Lexer<'a> {
        let mut symbols: Vec<Vec<char>> = table
            .symbols()
            .chain(PUNCTUATION.iter().copied())
            .chain(CONSTANT_SYMBOLS.iter().copied())
            .map(|s| s.chars().collect())
            .collect();
        symbols.sort_by_key(|s| std::cmp::Reverse(s.len()));
        Lexer { chars, pos: 0, symbols, out: Lexed::default(), link: None, trace: None }
    }

    fn at(&self, s: &str) -> bool {
        let mut i = self.pos;
        for c in s.chars() {
            if self.chars.get(i) != Some(&c) {
                return false;
            }
            i += 1;
        }
        true
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn slice(&self, span: Span) -> String {
        self.chars[span.start..span.end].iter().collect()
    }

    fn push(&mut self, kind: TokenKind, lexeme: String, span: Span) -> TokenKind {
        let index = self.out.tokens.len();
        self.out.tokens.push(Token { kind, lexeme, span, index });
        kind
    }

    /// Lexes the next token, consuming any markup before it.
    pub(crate) fn next_token(&mut self) -> Result<Option<TokenKind>, SyntaxError> {
        loop {
            while self.peek().is_some_and(char::is_whitespace) {
                self.pos += 1;
            }
            let Some(c) = self.peek() else { return Ok(None) };
            if self.at("(*") {
                return self.comment().map(Some);
            }
            if c == '<' {
                self.markup()?;
                continue;
            }
            let start = self.pos;
            if c == '"' {
                return self.string().map(Some);
            }
            if c == '.' {
                self.pos += 1;
                let span = Span::new(start, self.pos);
                if let Some(open) = &self.link {
                    return Err(SyntaxError::new("hyperlink crosses the statement terminator", open.tag));
                }
                if let Some(open) = &self.trace {
                    return Err(SyntaxError::new("trace region crosses the statement terminator", open.tag));
                }
                return Ok(Some(self.push(TokenKind::Dot, ".".into(), span)));
            }
            if c.is_ascii_digit() {
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let span = Span::new(start, self.pos);
                return Ok(Some(self.push(TokenKind::Number, self.slice(span), span)));
            }
            let ident_len = if c.is_alphabetic() || c == '_' {
                self.chars[start..].iter().take_while(|c| is_ident_char(**c)).count()
            } else {
                0
            };
            let symbol_len = self
                .symbols
                .iter()
                .find(|s| self.chars[start..].starts_with(s))
                .map_or(0, Vec::len);
            if ident_len == 0 && symbol_len == 0 {
                return Err(SyntaxError::new(format!("unexpected character `{c}`"), Span::new(start, start + 1)));
            }
            let (kind, len) = if symbol_len >= ident_len {
                (TokenKind::Symbol, symbol_len)
            } else {
                (TokenKind::Ident, ident_len)
            };
            self.pos += len;
            let span = Span::new(start, self.pos);
            let lexeme = self.slice(span);
            let kind = if kind == TokenKind::Ident && KEYWORDS.contains(&lexeme.as_str()) { TokenKind::Keyword } else { kind };
            return Ok(Some(self.push(kind, lexeme, span)));
        }
    }

    fn comment(&mut self) -> Result<TokenKind, SyntaxError> {
        let start = self.pos;
        let mut nesting = 0usize;
        loop {
            if self.at("(*") {
                nesting += 1;
                self.pos += 2;
            } else if self.at("*)") {
                nesting -= 1;
                self.pos += 2;
                if nesting == 0 {
                    break;
                }
            } else if self.pos < self.chars.len() {
                self.pos += 1;
            } else {
                return Err(SyntaxError::new("unterminated comment", Span::new(start, start + 2)));
            }
        }
        let span = Span::new(start, self.pos);
        Ok(self.push(TokenKind::Comment, self.slice(span), span))
    }

    fn string(&mut self) -> Result<TokenKind, SyntaxError> {
        let start = self.pos;
        self.pos += 1;
        while self.peek().is_some_and(|c| c != '"') {
            self.pos += 1;
        }
        if self.peek().is_none() {
            return Err(SyntaxError::new("unterminated string", Span::new(start, start + 1)));
        }
        self.pos += 1;
        let span = Span::new(start, self.pos);
        let content = self.slice(Span::new(start + 1, self.pos - 1));
        Ok(self.push(TokenKind::Str, content, span))
    }

    fn markup(&mut self) -> Result<(), SyntaxError> {
        let start = self.pos;
        let next_index = self.out.tokens.len();
        if self.at(LINK_OPEN) {
            self.pos += LINK_OPEN.chars().count();
            let uri_start = self.pos;
            while self.peek().is_some_and(|c| c != '"' && c != '>') {
                self.pos += 1;
            }
            if !self.at("\">") {
                return Err(SyntaxError::new("unterminated markup tag", Span::new(start, self.pos)));
            }
            let text = self.slice(Span::new(uri_start, self.pos));
            self.pos += 2;
            let tag = Span::new(start, self.pos);
            let uri: LibUri =
                text.parse().map_err(|_| SyntaxError::new(format!("ill-formed uri `{text}`"), tag))?;
            if self.link.is_some() {
                return Err(SyntaxError::new("hyperlinks may not nest", tag));
            }
            self.link = Some(OpenLink { uri, tag, first_token: next_index });
        } else if self.at(LINK_CLOSE) {
            self.pos += LINK_CLOSE.len();
            let tag = Span::new(start, self.pos);
            let open = self.link.take().ok_or_else(|| SyntaxError::new("unbalanced </A>", tag))?;
            let wrapped = &self.out.tokens[open.first_token..];
            match wrapped {
                [t] if matches!(t.kind, TokenKind::Ident | TokenKind::Symbol) => {
                    self.out.links.insert(t.index, open.uri);
                }
                _ => {
                    return Err(SyntaxError::new(
                        "a hyperlink must wrap exactly one identifier or symbol",
                        open.tag.to(tag),
                    ))
                }
            }
        } else if self.at(TRACE_OPEN) {
            self.pos += TRACE_OPEN.len();
            let tag = Span::new(start, self.pos);
            if self.trace.is_some() {
                return Err(SyntaxError::new("trace regions may not nest", tag));
            }
            if self.link.is_some() {
                return Err(SyntaxError::new("a trace region may not start inside a hyperlink", tag));
            }
            self.trace = Some(OpenTrace { tag, first_token: next_index });
        } else if self.at(TRACE_CLOSE) {
            self.pos += TRACE_CLOSE.len();
            let tag = Span::new(start, self.pos);
            let open = self.trace.take().ok_or_else(|| SyntaxError::new("unbalanced </T>", tag))?;
            if self.link.is_some() {
                return Err(SyntaxError::new("a trace region may not end inside a hyperlink", tag));
            }
            if next_index == open.first_token {
                return Err(SyntaxError::new("empty trace region", open.tag.to(tag)));
            }
            self.out.traces.push(TraceRegion { first: open.first_token, last: next_index - 1 });
        } else {
            let end = (self.pos + 1..=self.chars.len())
                .find(|&i| self.chars.get(i - 1) == Some(&'>'))
                .unwrap_or(self.chars.len());
            return Err(SyntaxError::new("unknown markup tag", Span::new(start, end)));
        }
        Ok(())
    }

    pub(crate) fn finish(self) -> Result<Lexed, SyntaxError> {
        if let Some(open) = self.link {
            return Err(SyntaxError::new("unterminated markup tag", open.tag));
        }
        if let Some(open) = self.trace {
            return Err(SyntaxError::new("unterminated markup tag", open.tag));
        }
        Ok(self.out)
    }
}
