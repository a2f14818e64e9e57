use crate::kernel::Connective;

use super::notation::{Fixity, NotationDecl};
use super::token::Span;

/// An identifier occurrence that disambiguation may resolve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Leaf {
    pub name: String,
    pub token: usize,
}

/// A formula before disambiguation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormulaAst {
    Ident(Leaf),
    Bot,
    Top,
    Not(Box<FormulaAst>),
    Binary(Connective, Box<FormulaAst>, Box<FormulaAst>),
    /// A use of an overloaded notation symbol.
    Overloaded { symbol: String, token: usize, fixity: Fixity, args: Vec<FormulaAst> },
}

impl FormulaAst {
    /// Identifier leaves and overloaded symbol uses, by token index.
    pub fn leaves(&self, out: &mut Vec<FormulaLeaf>) {
        match self {
            FormulaAst::Ident(leaf) => out.push(FormulaLeaf::Ident(leaf.clone())),
            FormulaAst::Bot | FormulaAst::Top => {}
            FormulaAst::Not(a) => a.leaves(out),
            FormulaAst::Binary(_, a, b) => {
                a.leaves(out);
                b.leaves(out);
            }
            FormulaAst::Overloaded { symbol, token, fixity, args } => {
                out.push(FormulaLeaf::Symbol { symbol: symbol.clone(), token: *token, fixity: *fixity });
                args.iter().for_each(|a| a.leaves(out));
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormulaLeaf {
    Ident(Leaf),
    Symbol { symbol: String, token: usize, fixity: Fixity },
}

impl FormulaLeaf {
    pub fn token(&self) -> usize {
        match self {
            FormulaLeaf::Ident(l) => l.token,
            FormulaLeaf::Symbol { token, .. } => *token,
        }
    }
}

/// `using` and `depth` arguments recorded inside a trace region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceArgs {
    pub using: Vec<Leaf>,
    pub depth: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutoArgs {
    pub trace: Option<TraceArgs>,
    pub using: Vec<Leaf>,
    pub depth: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TacticAst {
    Intro(Option<String>),
    Apply(Leaf),
    Exact(Leaf),
    Assumption,
    Split,
    Left,
    Right,
    Elim(Leaf),
    Auto(AutoArgs),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StatementKind {
    Axiom { name: String, formula: FormulaAst },
    Definition { name: String, formula: FormulaAst },
    Theorem { name: String, formula: FormulaAst },
    Notation(NotationDecl),
    Tactic(TacticAst),
    Qed,
}

/// One parsed statement, with the exact source slice it came from
/// (leading whitespace and comments through the terminating dot).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub kind: StatementKind,
    pub raw: String,
    pub span: Span,
    /// From the first non-comment token through the dot; used for error reports.
    pub body: Span,
}
