use std::collections::{BTreeMap, BTreeSet};

use super::check::{check, unfold_normalize};
use super::formula::{Formula, ProofTerm};
use super::uri::{LibUri, ModuleId};
use super::KernelError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entry {
    Definition { body: Formula },
    Axiom { statement: Formula },
    Lemma { statement: Formula, proof: ProofTerm },
}

impl Entry {
    /// The statement of a lemma or axiom.
    pub fn statement(&self) -> Option<&Formula> {
        match self {
            Entry::Axiom { statement } | Entry::Lemma { statement, .. } => Some(statement),
            Entry::Definition { .. } => None,
        }
    }

    pub fn kind(&self) -> EntryKind {
        match self {
            Entry::Definition { .. } => EntryKind::Definition,
            Entry::Axiom { .. } => EntryKind::Axiom,
            Entry::Lemma { .. } => EntryKind::Lemma,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    Definition,
    Axiom,
    Lemma,
}

/// Library entries plus the overload table of the currently visible modules.
///
/// Every stored formula is in unfold-normal form. Definitions may only refer
/// to definitions that already exist, so the dependency graph is acyclic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Environment {
    entries: BTreeMap<LibUri, Entry>,
    visible: BTreeSet<ModuleId>,
    names: BTreeMap<String, BTreeSet<LibUri>>,
}

impl Environment {
    pub fn new() -> Environment {
        Environment::default()
    }

    pub fn get(&self, uri: &LibUri) -> Option<&Entry> {
        self.entries.get(uri)
    }

    pub fn contains(&self, uri: &LibUri) -> bool {
        self.entries.contains_key(uri)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&LibUri, &Entry)> {
        self.entries.iter()
    }

    pub fn is_visible(&self, module: &ModuleId) -> bool {
        self.visible.contains(module)
    }

    /// Makes every entry of `module` (present and future) visible by short name.
    pub fn import(&mut self, module: ModuleId) {
        if !self.visible.insert(module.clone()) {
            return;
        }
        for uri in self.entries.keys() {
            if uri.module_id().as_ref() == Some(&module) {
                self.names.entry(uri.short_name().to_string()).or_default().insert(uri.clone());
            }
        }
    }

    /// Visible entries whose final name segment is `name`, in uri order.
    pub fn named<'a>(&'a self, name: &str) -> impl Iterator<Item = (&'a LibUri, &'a Entry)> + 'a {
        self.names
            .get(name)
            .into_iter()
            .flatten()
            .map(move |u| (u, &self.entries[u]))
    }

    /// Visible lemmas and axioms, in uri order.
    pub fn visible_constants(&self) -> impl Iterator<Item = (&LibUri, &Formula)> {
        self.entries.iter().filter_map(move |(u, e)| {
            let visible = u.module_id().is_some_and(|m| self.visible.contains(&m));
            e.statement().filter(|_| visible).map(|s| (u, s))
        })
    }

    /// Adds an entry after normalizing its formulas and, for lemmas,
    /// checking the proof against the statement.
    pub fn insert(&mut self, uri: LibUri, entry: Entry) -> Result<(), KernelError> {
        if matches!(uri, LibUri::Builtin(_)) {
            return Err(KernelError::BadUri(uri.to_string()));
        }
        if self.entries.contains_key(&uri) {
            return Err(KernelError::Duplicate(uri));
        }
        let entry = match entry {
            Entry::Definition { body } => Entry::Definition { body: unfold_normalize(&body, self)? },
            Entry::Axiom { statement } => Entry::Axiom { statement: unfold_normalize(&statement, self)? },
            Entry::Lemma { statement, proof } => {
                let statement = unfold_normalize(&statement, self)?;
                check(&proof, &statement, self)?;
                Entry::Lemma { statement, proof }
            }
        };
        if uri.module_id().is_some_and(|m| self.visible.contains(&m)) {
            self.names.entry(uri.short_name().to_string()).or_default().insert(uri.clone());
        }
        self.entries.insert(uri, entry);
        Ok(())
    }

    /// Removes a lemma or axiom no other proof depends on.
    pub fn remove_constant(&mut self, uri: &LibUri) -> Result<Entry, KernelError> {
        match self.entries.get(uri) {
            Some(e) if e.statement().is_some() => {}
            Some(_) => return Err(KernelError::NotAConstant(uri.clone())),
            None => return Err(KernelError::DanglingRef(uri.clone())),
        }
        let used = self.entries.values().any(|e| match e {
            Entry::Lemma { proof, .. } => proof.constants().contains(uri),
            _ => false,
        });
        if used {
            return Err(KernelError::InUse(uri.clone()));
        }
        if let Some(set) = self.names.get_mut(uri.short_name()) {
            set.remove(uri);
            if set.is_empty() {
                self.names.remove(uri.short_name());
            }
        }
        Ok(self.entries.remove(uri).expect("checked above"))
    }
}
