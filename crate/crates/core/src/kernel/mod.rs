//! The trusted core: propositional formulas, natural-deduction proof terms,
//! library environments and the syntax-directed checker.
//!
//! Every proof produced by a tactic or by automation is rechecked here
//! before it is stored in an [`Environment`].

mod check;
mod env;
mod formula;
mod uri;

use std::fmt;

pub use check::{check, infer, unfold_normalize};
pub use env::{Entry, EntryKind, Environment};
pub use formula::{complete_subst, match_conclusion, Formula, ProofTerm, Subst};
pub use uri::{is_ident_char, is_module, is_name, is_user_id, Connective, LibUri, ModuleId};

/// Path from the root of a proof term to a subterm, by child index.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Position(pub Vec<usize>);

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "root.{}", parts.join("."))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("ill-formed uri `{0}`")]
    BadUri(String),
    #[error("reference to unknown entry {0}")]
    DanglingRef(LibUri),
    #[error("{0} is not a definition")]
    NotADefinition(LibUri),
    #[error("{0} is not a lemma or axiom")]
    NotAConstant(LibUri),
    #[error("{0} is already defined")]
    Duplicate(LibUri),
    #[error("{0} is used by another proof")]
    InUse(LibUri),
    #[error("unbound hypothesis `{name}` at {at}")]
    UnboundHyp { name: String, at: Position },
    #[error("at {at}: {message}")]
    RuleMismatch { at: Position, message: String },
    #[error("instantiation of {uri} at {at} does not cover exactly the atoms of its statement")]
    BadSubst { uri: LibUri, at: Position },
    #[error("open goal at {at}")]
    Incomplete { at: Position },
    #[error("proof concludes {found}, expected {expected}")]
    WrongConclusion { expected: Formula, found: Formula },
}

/// Binding power used when printing; mirrors the builtin notations.
fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Imp(_, b) if **b == Formula::Bot => 40,
        Formula::Imp(..) => 10,
        Formula::Or(..) => 20,
        Formula::And(..) => 30,
        _ => 100,
    }
}

/// Prints with the default Unicode connectives and minimal parentheses.
/// `a → ⊥` is printed as `¬a`.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, 0, f)
    }
}

fn write_formula(form: &Formula, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let paren = precedence(form) < min;
    if paren {
        f.write_str("(")?;
    }
    match form {
        Formula::Atom(a) => f.write_str(a)?,
        Formula::Ref(u) => f.write_str(u.short_name())?,
        Formula::Bot => f.write_str("⊥")?,
        Formula::Top => f.write_str("⊤")?,
        Formula::Imp(a, b) if **b == Formula::Bot => {
            f.write_str("¬")?;
            write_formula(a, 40, f)?;
        }
        Formula::Imp(a, b) => binary(a, " → ", b, 10, f)?,
        Formula::Or(a, b) => binary(a, " ∨ ", b, 20, f)?,
        Formula::And(a, b) => binary(a, " ∧ ", b, 30, f)?,
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

/// Right-associative infix: the left operand needs strictly higher binding.
fn binary(a: &Formula, op: &str, b: &Formula, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write_formula(a, prec + 1, f)?;
    f.write_str(op)?;
    write_formula(b, prec, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: &str) -> Formula {
        Formula::atom(n)
    }

    #[test]
    fn display_minimal_parens() {
        assert_eq!(Formula::and(a("a"), Formula::or(a("b"), a("c"))).to_string(), "a ∧ (b ∨ c)");
        assert_eq!(Formula::imp(a("a"), Formula::imp(a("b"), a("c"))).to_string(), "a → b → c");
        assert_eq!(Formula::imp(Formula::imp(a("a"), a("b")), a("c")).to_string(), "(a → b) → c");
        assert_eq!(Formula::not(Formula::and(a("a"), a("b"))).to_string(), "¬(a ∧ b)");
        assert_eq!(Formula::imp(Formula::not(a("a")), a("b")).to_string(), "¬a → b");
        assert_eq!(Formula::not(Formula::Bot).to_string(), "¬⊥");
    }

    #[test]
    fn position_display() {
        assert_eq!(Position(vec![]).to_string(), "root");
        assert_eq!(Position(vec![0, 2]).to_string(), "root.0.2");
    }
}
