use std::collections::BTreeMap;

use crate::kernel::Connective;

use super::lexer::{CONSTANT_SYMBOLS, KEYWORDS, PUNCTUATION};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixity {
    InfixL,
    InfixR,
    Prefix,
}

impl Fixity {
    pub fn keyword(self) -> &'static str {
        match self {
            Fixity::InfixL => "infixl",
            Fixity::InfixR => "infixr",
            Fixity::Prefix => "prefix",
        }
    }

    pub fn is_infix(self) -> bool {
        self != Fixity::Prefix
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NotationEntry {
    pub connective: Connective,
    pub fixity: Fixity,
    pub priority: u8,
}

/// A `notation` statement as written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotationDecl {
    pub fixity: Fixity,
    pub symbol: String,
    pub connective: String,
    pub priority: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NotationError {
    #[error("symbol `{0}` is reserved")]
    Reserved(String),
    #[error("priority {0} is outside 1..99")]
    BadPriority(u32),
    #[error("unknown connective `{0}`")]
    UnknownConnective(String),
    #[error("`{0}` is unary and must be declared prefix; only `not` may be prefix")]
    BadFixity(String),
    #[error("`{symbol}` is already bound to {connective} with a different fixity or priority")]
    Conflict { symbol: String, connective: &'static str },
}

/// Runtime-extensible operator table, symbol text → entries in
/// registration order. A symbol with two or more entries is overloaded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotationTable {
    entries: BTreeMap<String, Vec<NotationEntry>>,
}

impl Default for NotationTable {
    fn default() -> NotationTable {
        let mut entries = BTreeMap::new();
        let builtin = [
            (["→", "->"], Connective::Imp, Fixity::InfixR, 10),
            (["∨", "\\/"], Connective::Or, Fixity::InfixR, 20),
            (["∧", "/\\"], Connective::And, Fixity::InfixR, 30),
            (["¬", "~"], Connective::Not, Fixity::Prefix, 40),
        ];
        for (symbols, connective, fixity, priority) in builtin {
            for s in symbols {
                entries.insert(s.to_string(), vec![NotationEntry { connective, fixity, priority }]);
            }
        }
        NotationTable { entries }
    }
}

impl NotationTable {
    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn entries(&self, symbol: &str) -> &[NotationEntry] {
        self.entries.get(symbol).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn infix(&self, symbol: &str) -> Vec<NotationEntry> {
        self.entries(symbol).iter().copied().filter(|e| e.fixity.is_infix()).collect()
    }

    pub fn prefix(&self, symbol: &str) -> Vec<NotationEntry> {
        self.entries(symbol).iter().copied().filter(|e| !e.fixity.is_infix()).collect()
    }

    pub fn is_overloaded(&self, symbol: &str) -> bool {
        self.entries(symbol).len() >= 2
    }

    /// Returns the table extended with `decl`. Re-registering an identical
    /// entry is a no-op; binding a symbol to a second connective overloads it.
    pub fn register(&self, decl: &NotationDecl) -> Result<NotationTable, NotationError> {
        validate_symbol(&decl.symbol)?;
        let priority = u8::try_from(decl.priority)
            .ok()
            .filter(|p| (1..=99).contains(p))
            .ok_or(NotationError::BadPriority(decl.priority))?;
        let connective = Connective::from_name(&decl.connective)
            .ok_or_else(|| NotationError::UnknownConnective(decl.connective.clone()))?;
        if (connective == Connective::Not) != (decl.fixity == Fixity::Prefix) {
            return Err(NotationError::BadFixity(decl.connective.clone()));
        }
        let entry = NotationEntry { connective, fixity: decl.fixity, priority };
        let mut next = self.clone();
        let list = next.entries.entry(decl.symbol.clone()).or_default();
        match list.iter().find(|e| e.connective == connective) {
            Some(existing) if *existing == entry => {}
            Some(_) => {
                return Err(NotationError::Conflict { symbol: decl.symbol.clone(), connective: connective.name() })
            }
            None => list.push(entry),
        }
        Ok(next)
    }
}

/// Symbols may not collide with markup, comments, strings, the statement
/// terminator, punctuation, keywords or the constant symbols.
fn validate_symbol(symbol: &str) -> Result<(), NotationError> {
    let reserved = symbol.is_empty()
        || symbol.starts_with('<')
        || symbol.starts_with('(')
        || symbol.starts_with(')')
        || symbol.chars().any(|c| c.is_whitespace() || matches!(c, '.' | '"' | '<'))
        || PUNCTUATION.contains(&symbol)
        || KEYWORDS.contains(&symbol)
        || CONSTANT_SYMBOLS.contains(&symbol);
    if reserved {
        Err(NotationError::Reserved(symbol.to_string()))
    } else {
        Ok(())
    }
}
