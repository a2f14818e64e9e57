use std::fmt;
use std::str::FromStr;

use super::KernelError;

const LIB_SCHEME: &str = "lib://";
const BUILTIN_SCHEME: &str = "builtin://logic#";

/// The four connectives that notations may be bound to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Connective {
    And,
    Or,
    Imp,
    Not,
}

impl Connective {
    pub const ALL: [Connective; 4] = [Connective::And, Connective::Or, Connective::Imp, Connective::Not];

    pub fn name(self) -> &'static str {
        match self {
            Connective::And => "and",
            Connective::Or => "or",
            Connective::Imp => "imp",
            Connective::Not => "not",
        }
    }

    pub fn from_name(name: &str) -> Option<Connective> {
        Connective::ALL.into_iter().find(|c| c.name() == name)
    }

    pub fn uri(self) -> LibUri {
        LibUri::Builtin(self)
    }
}

/// A hyperlink target: a library entry or a builtin connective.
///
/// Textual forms are `lib://<owner>/<module>#<name>` and
/// `builtin://logic#<and|or|imp|not>`. Ordering follows the textual form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LibUri {
    Lib { owner: String, module: String, name: String },
    Builtin(Connective),
}

impl LibUri {
    pub fn lib(owner: &str, module: &str, name: &str) -> Result<LibUri, KernelError> {
        let uri = LibUri::Lib {
            owner: owner.to_string(),
            module: module.to_string(),
            name: name.to_string(),
        };
        if is_owner(owner) && is_module(module) && is_name(name) {
            Ok(uri)
        } else {
            Err(KernelError::BadUri(uri.to_string()))
        }
    }

    /// The final name segment, used to build the overload table.
    pub fn short_name(&self) -> &str {
        match self {
            LibUri::Lib { name, .. } => name,
            LibUri::Builtin(c) => c.name(),
        }
    }

    pub fn module_id(&self) -> Option<ModuleId> {
        match self {
            LibUri::Lib { owner, module, .. } => Some(ModuleId::new(owner, module)),
            LibUri::Builtin(_) => None,
        }
    }

    pub fn owner(&self) -> Option<&str> {
        match self {
            LibUri::Lib { owner, .. } => Some(owner),
            LibUri::Builtin(_) => None,
        }
    }
}

impl fmt::Display for LibUri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LibUri::Lib { owner, module, name } => write!(f, "{LIB_SCHEME}{owner}/{module}#{name}"),
            LibUri::Builtin(c) => write!(f, "{BUILTIN_SCHEME}{}", c.name()),
        }
    }
}

impl FromStr for LibUri {
    type Err = KernelError;

    fn from_str(s: &str) -> Result<LibUri, KernelError> {
        let bad = || KernelError::BadUri(s.to_string());
        if let Some(conn) = s.strip_prefix(BUILTIN_SCHEME) {
            return Connective::from_name(conn).map(LibUri::Builtin).ok_or_else(bad);
        }
        let rest = s.strip_prefix(LIB_SCHEME).ok_or_else(bad)?;
        let (path, name) = rest.split_once('#').ok_or_else(bad)?;
        let (owner, module) = path.split_once('/').ok_or_else(bad)?;
        LibUri::lib(owner, module, name).map_err(|_| bad())
    }
}

impl PartialOrd for LibUri {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LibUri {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.to_string().cmp(&other.to_string())
    }
}

/// An `(owner, module)` pair; the unit of visibility.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModuleId {
    pub owner: String,
    pub module: String,
}

impl ModuleId {
    pub fn new(owner: &str, module: &str) -> ModuleId {
        ModuleId { owner: owner.to_string(), module: module.to_string() }
    }
}

impl fmt::Display for ModuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.owner, self.module)
    }
}

/// Account ids: lowercase alphanumerics and `_`, 1 to 32 characters.
pub fn is_user_id(s: &str) -> bool {
    (1..=32).contains(&s.len()) && s.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_')
}

fn is_owner(s: &str) -> bool {
    s == "shared" || is_user_id(s)
}

/// Module paths are `/`-separated segments of ASCII alphanumerics and `_`.
pub fn is_module(s: &str) -> bool {
    !s.is_empty()
        && s.split('/')
            .all(|seg| !seg.is_empty() && seg.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_'))
}

/// Entry names must lex as a single identifier.
pub fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => chars.all(is_ident_char),
        _ => false,
    }
}

pub fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}
