//! Script surface syntax: the markup-aware lexer, the runtime-extensible
//! notation table and the statement parser.

mod ast;
mod lexer;
mod notation;
mod parser;
mod token;

pub use ast::{AutoArgs, FormulaAst, FormulaLeaf, Leaf, Statement, StatementKind, TacticAst, TraceArgs};
pub use lexer::{lex, lex_statement, LexedStatement, CONSTANT_SYMBOLS, KEYWORDS, PUNCTUATION};
pub use notation::{Fixity, NotationDecl, NotationEntry, NotationError, NotationTable};
pub(crate) use parser::parse_chars;
pub use parser::parse_statement;
pub use token::{Lexed, LinkTable, Span, SyntaxError, Token, TokenKind, TraceRegion};

use crate::kernel::Formula;

/// Prints a normalized formula with the default Unicode connectives and
/// the minimal parentheses the builtin priorities require.
pub fn render_formula(f: &Formula) -> String {
    f.to_string()
}
