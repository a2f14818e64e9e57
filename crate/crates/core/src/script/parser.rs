//! Statement parser with precedence climbing over the notation table.

use crate::kernel::Connective;

use super::ast::{AutoArgs, FormulaAst, Leaf, Statement, StatementKind, TacticAst, TraceArgs};
use super::notation::{Fixity, NotationDecl, NotationTable};
use super::token::{Lexed, Span, SyntaxError, Token, TokenKind, TraceRegion};

/// Parses one statement starting at stream index `from`.
///
/// Returns the statement and the index just past its dot. The statement's
/// `raw` slice starts where the previous token ended.
pub fn parse_statement(
    text: &str,
    lexed: &Lexed,
    table: &NotationTable,
    from: usize,
) -> Result<(Statement, usize), SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    parse_chars(&chars, lexed, table, from)
}

pub(crate) fn parse_chars(
    chars: &[char],
    lexed: &Lexed,
    table: &NotationTable,
    from: usize,
) -> Result<(Statement, usize), SyntaxError> {
    let start = match from {
        0 => 0,
        i => lexed.tokens[i - 1].span.end,
    };
    let tokens: Vec<&Token> = lexed.tokens[from..].iter().filter(|t| t.kind != TokenKind::Comment).collect();
    let mut p = Parser { tokens, traces: &lexed.traces, table, pos: 0, text_end: chars.len() };
    let head_span = p.here();
    let kind = p.statement()?;
    let dot = p.expect_dot()?;
    let next = p.tokens[p.pos - 1].index + 1;
    let span = Span::new(start, dot.end);
    let raw = chars[span.start..span.end].iter().collect();
    Ok((Statement { kind, raw, span, body: head_span.to(dot) }, next))
}

/// Works on the comment-free view of the token stream; leaves keep their
/// stream indices.
struct Parser<'a> {
    tokens: Vec<&'a Token>,
    traces: &'a [TraceRegion],
    table: &'a NotationTable,
    pos: usize,
    text_end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos).copied()
    }

    fn here(&self) -> Span {
        match self.tokens.get(self.pos) {
            Some(t) => t.span,
            None => Span::new(self.text_end, self.text_end),
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, SyntaxError> {
        match self.tokens.get(self.pos) {
            None => Err(SyntaxError::new("missing statement terminator", self.here())),
            Some(_) => Err(SyntaxError::new(message, self.here())),
        }
    }

    fn bump(&mut self) -> &'a Token {
        let t = self.tokens[self.pos];
        self.pos += 1;
        t
    }

    fn is(&self, kind: TokenKind, lexeme: &str) -> bool {
        self.peek().is_some_and(|t| t.kind == kind && t.lexeme == lexeme)
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        let hit = self.is(TokenKind::Keyword, kw);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn expect(&mut self, kind: TokenKind, lexeme: &str) -> Result<&'a Token, SyntaxError> {
        if self.is(kind, lexeme) {
            Ok(self.bump())
        } else {
            self.error(format!("expected `{lexeme}`"))
        }
    }

    fn expect_dot(&mut self) -> Result<Span, SyntaxError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Dot => Ok(self.bump().span),
            _ => self.error("expected `.`"),
        }
    }

    fn ident(&mut self) -> Result<Leaf, SyntaxError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Ident => {
                let t = self.bump();
                Ok(Leaf { name: t.lexeme.clone(), token: t.index })
            }
            _ => self.error("expected an identifier"),
        }
    }

    fn number(&mut self) -> Result<u32, SyntaxError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Number => {
                let span = t.span;
                let n = self.bump().lexeme.parse().map_err(|_| SyntaxError::new("number too large", span))?;
                Ok(n)
            }
            _ => self.error("expected a number"),
        }
    }

    fn statement(&mut self) -> Result<StatementKind, SyntaxError> {
        let Some(head) = self.peek() else { return self.error("expected a statement") };
        if head.kind != TokenKind::Keyword {
            return self.error(format!("unknown statement `{}`", head.lexeme));
        }
        self.pos += 1;
        Ok(match head.lexeme.as_str() {
            "theorem" | "axiom" => {
                let name = self.ident()?.name;
                self.expect(TokenKind::Symbol, ":")?;
                let formula = self.formula(0)?;
                if head.lexeme == "theorem" {
                    StatementKind::Theorem { name, formula }
                } else {
                    StatementKind::Axiom { name, formula }
                }
            }
            "definition" => {
                let name = self.ident()?.name;
                self.expect(TokenKind::Symbol, ":=")?;
                StatementKind::Definition { name, formula: self.formula(0)? }
            }
            "notation" => StatementKind::Notation(self.notation()?),
            "qed" => StatementKind::Qed,
            "intro" => {
                let name = if self.peek().is_some_and(|t| t.kind == TokenKind::Ident) {
                    Some(self.ident()?.name)
                } else {
                    None
                };
                StatementKind::Tactic(TacticAst::Intro(name))
            }
            "apply" => StatementKind::Tactic(TacticAst::Apply(self.ident()?)),
            "exact" => StatementKind::Tactic(TacticAst::Exact(self.ident()?)),
            "elim" => StatementKind::Tactic(TacticAst::Elim(self.ident()?)),
            "assumption" => StatementKind::Tactic(TacticAst::Assumption),
            "split" => StatementKind::Tactic(TacticAst::Split),
            "left" => StatementKind::Tactic(TacticAst::Left),
            "right" => StatementKind::Tactic(TacticAst::Right),
            "auto" => StatementKind::Tactic(TacticAst::Auto(self.auto_args(head.index)?)),
            other => {
                self.pos -= 1;
                return self.error(format!("unknown statement `{other}`"));
            }
        })
    }

    fn notation(&mut self) -> Result<NotationDecl, SyntaxError> {
        let fixity = match self.peek().map(|t| (t.kind, t.lexeme.as_str())) {
            Some((TokenKind::Keyword, "infixl")) => Fixity::InfixL,
            Some((TokenKind::Keyword, "infixr")) => Fixity::InfixR,
            Some((TokenKind::Keyword, "prefix")) => Fixity::Prefix,
            _ => return self.error("expected `infixl`, `infixr` or `prefix`"),
        };
        self.pos += 1;
        let symbol = match self.peek() {
            Some(t) if t.kind == TokenKind::Str => self.bump().lexeme.clone(),
            _ => return self.error("expected a quoted symbol"),
        };
        self.expect(TokenKind::Keyword, "for")?;
        let connective = self.ident()?.name;
        self.expect(TokenKind::Keyword, "priority")?;
        let priority = self.number()?;
        Ok(NotationDecl { fixity, symbol, connective, priority })
    }

    fn ident_list(&mut self) -> Result<Vec<Leaf>, SyntaxError> {
        let mut out = vec![self.ident()?];
        while self.is(TokenKind::Symbol, ",") {
            self.pos += 1;
            out.push(self.ident()?);
        }
        Ok(out)
    }

    /// `auto [<T> [using L] depth N </T>] [using L] [depth N]`
    fn auto_args(&mut self, auto_index: usize) -> Result<AutoArgs, SyntaxError> {
        let trace = match self.traces.iter().find(|t| t.first == auto_index + 1) {
            Some(region) => {
                let using = if self.eat_keyword("using") { self.ident_list()? } else { Vec::new() };
                self.expect(TokenKind::Keyword, "depth")?;
                let depth = self.number()?;
                if self.tokens[self.pos - 1].index != region.last {
                    return self.error("a trace holds only `using` and `depth` arguments");
                }
                Some(TraceArgs { using, depth })
            }
            None => None,
        };
        let using = if self.eat_keyword("using") { self.ident_list()? } else { Vec::new() };
        let depth = if self.eat_keyword("depth") { Some(self.number()?) } else { None };
        if depth == Some(0) || trace.as_ref().is_some_and(|t| t.depth == 0) {
            self.pos -= 1;
            return self.error("depth must be at least 1");
        }
        Ok(AutoArgs { trace, using, depth })
    }

    fn formula(&mut self, min: u8) -> Result<FormulaAst, SyntaxError> {
        let mut lhs = self.primary()?;
        loop {
            let Some(t) = self.peek().filter(|t| t.kind == TokenKind::Symbol) else { break };
            let entries = self.table.infix(&t.lexeme);
            let Some(first) = entries.first().copied() else { break };
            if first.priority < min {
                break;
            }
            self.pos += 1;
            let next_min = if first.fixity == Fixity::InfixR { first.priority } else { first.priority + 1 };
            let rhs = self.formula(next_min)?;
            lhs = if entries.len() >= 2 {
                FormulaAst::Overloaded {
                    symbol: t.lexeme.clone(),
                    token: t.index,
                    fixity: first.fixity,
                    args: vec![lhs, rhs],
                }
            } else {
                FormulaAst::Binary(first.connective, Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn primary(&mut self) -> Result<FormulaAst, SyntaxError> {
        let Some(t) = self.peek() else { return self.error("expected a formula") };
        match (t.kind, t.lexeme.as_str()) {
            (TokenKind::Ident, _) => Ok(FormulaAst::Ident(self.ident()?)),
            (TokenKind::Symbol, "(") => {
                self.pos += 1;
                let inner = self.formula(0)?;
                self.expect(TokenKind::Symbol, ")")?;
                Ok(inner)
            }
            (TokenKind::Symbol, "⊥" | "False") => {
                self.pos += 1;
                Ok(FormulaAst::Bot)
            }
            (TokenKind::Symbol, "⊤" | "True") => {
                self.pos += 1;
                Ok(FormulaAst::Top)
            }
            (TokenKind::Symbol, sym) => {
                let entries = self.table.prefix(sym);
                let Some(first) = entries.first().copied() else { return self.error("expected a formula") };
                self.pos += 1;
                let arg = self.formula(first.priority)?;
                debug_assert_eq!(first.connective, Connective::Not);
                Ok(if entries.len() >= 2 {
                    FormulaAst::Overloaded { symbol: t.lexeme.clone(), token: t.index, fixity: Fixity::Prefix, args: vec![arg] }
                } else {
                    FormulaAst::Not(Box::new(arg))
                })
            }
            _ => self.error("expected a formula"),
        }
    }
}
