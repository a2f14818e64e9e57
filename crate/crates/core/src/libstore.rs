//! Accounts, per-user script trees, and a centrally revisioned shared library.
//!
//! Layout under the store root:
//!
//! ```text
//! accounts                 id<TAB>salt-hex<TAB>digest-hex
//! accounts.created         id<TAB>unix-seconds
//! shared/files/…           head content of every shared file
//! shared/meta              head<TAB>N, then rev<TAB>user<TAB>path,path,…
//! users/<id>/files/…       working copy
//! users/<id>/meta          path<TAB>base-rev<TAB>0|1 (locally modified)
//! ```

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use parking_lot::{Mutex, RwLock};
use rand::RngCore;
use sha2::{Digest, Sha256};

use crate::kernel::is_user_id;

pub const SHARED_USER: &str = "shared";
pub const MIN_PASSWORD: usize = 8;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("access denied: {0}")]
    Access(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("user id `{0}` is taken")]
    Taken(String),
    #[error("invalid: {0}")]
    Invalid(String),
    #[error("corrupt metadata: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    File,
    Dir,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ListEntry {
    pub name: String,
    pub kind: EntryKind,
    /// For directories: whether anything below is modified.
    pub modified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CommitOutcome {
    Committed { revision: u64, changed: Vec<String> },
    /// Nothing was written; these paths had stale bases.
    Conflicts(Vec<String>),
    NothingToCommit,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UpdateOutcome {
    pub revision: u64,
    pub updated: Vec<String>,
    pub conflicts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Commit {
    pub revision: u64,
    pub user: String,
    pub paths: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct WcEntry {
    base: u64,
    modified: bool,
}

/// Normalizes a file or directory path; `..` is refused.
pub fn normalize(path: &str) -> Result<String, StoreError> {
    let mut parts = Vec::new();
    for seg in path.split('/') {
        match seg {
            "" | "." => {}
            ".." => return Err(StoreError::Access(path.to_string())),
            s if s.contains('\\') || s.contains('\0') || s.contains('\t') || s.contains('\n') || s.contains(',') => {
                return Err(StoreError::Access(path.to_string()))
            }
            s => parts.push(s),
        }
    }
    Ok(parts.join("/"))
}

/// A normalized path naming a script file.
pub fn normalize_file(path: &str) -> Result<String, StoreError> {
    let p = normalize(path)?;
    let stem = p.rsplit('/').next().and_then(|n| n.strip_suffix(".ma"));
    match stem {
        Some(s) if !s.is_empty() => Ok(p),
        _ => Err(StoreError::Invalid(format!("`{path}` is not a .ma file"))),
    }
}

fn digest(salt: &[u8], password: &str) -> String {
    let mut h = Sha256::new();
    h.update(salt);
    h.update(password.as_bytes());
    hex::encode(h.finalize())
}

fn write_atomic(path: &Path, content: &str) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp~");
    fs::write(&tmp, content)?;
    fs::rename(tmp, path)
}

fn read_opt(path: &Path) -> io::Result<Option<String>> {
    match fs::read_to_string(path) {
        Ok(s) => Ok(Some(s)),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e),
    }
}

/// The on-disk store. Shared-repo writes are serialized; working copies are
/// guarded per user.
pub struct Store {
    root: PathBuf,
    shared: RwLock<()>,
    accounts: Mutex<()>,
    users: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

impl Store {
    pub fn open(root: impl Into<PathBuf>) -> Result<Store, StoreError> {
        let root = root.into();
        fs::create_dir_all(root.join("shared/files"))?;
        fs::create_dir_all(root.join("users"))?;
        if !root.join("shared/meta").exists() {
            write_atomic(&root.join("shared/meta"), "head\t0\n")?;
        }
        if !root.join("accounts").exists() {
            write_atomic(&root.join("accounts"), "")?;
        }
        Ok(Store {
            root,
            shared: RwLock::new(()),
            accounts: Mutex::new(()),
            users: Mutex::new(HashMap::new()),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn user_lock(&self, user: &str) -> Arc<Mutex<()>> {
        self.users.lock().entry(user.to_string()).or_default().clone()
    }

    fn user_dir(&self, user: &str) -> PathBuf {
        self.root.join("users").join(user)
    }

    // ---- accounts

    pub fn register(&self, user: &str, password: &str) -> Result<(), StoreError> {
        if !is_user_id(user) || user == SHARED_USER {
            return Err(StoreError::Invalid(format!("`{user}` is not a valid user id")));
        }
        if password.chars().count() < MIN_PASSWORD {
            return Err(StoreError::Invalid(format!("passwords need at least {MIN_PASSWORD} characters")));
        }
        let _g = self.accounts.lock();
        let accounts = fs::read_to_string(self.root.join("accounts"))?;
        if accounts.lines().any(|l| l.split('\t').next() == Some(user)) {
            return Err(StoreError::Taken(user.to_string()));
        }
        let mut salt = [0u8; 16];
        rand::rng().fill_bytes(&mut salt);
        let line = format!("{user}\t{}\t{}\n", hex::encode(salt), digest(&salt, password));
        write_atomic(&self.root.join("accounts"), &(accounts + &line))?;
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let created = read_opt(&self.root.join("accounts.created"))?.unwrap_or_default();
        write_atomic(&self.root.join("accounts.created"), &format!("{created}{user}\t{now}\n"))?;
        drop(_g);
        self.checkout(user)
    }

    /// Checks credentials; unknown users and wrong passwords look the same.
    pub fn authenticate(&self, user: &str, password: &str) -> Result<bool, StoreError> {
        let _g = self.accounts.lock();
        let accounts = fs::read_to_string(self.root.join("accounts"))?;
        for line in accounts.lines() {
            let f: Vec<&str> = line.split('\t').collect();
            if let [id, salt, stored] = f[..] {
                if id == user {
                    let salt = hex::decode(salt).map_err(|_| StoreError::Corrupt("accounts".into()))?;
                    return Ok(digest(&salt, password) == stored);
                }
            }
        }
        Ok(false)
    }

    pub fn user_exists(&self, user: &str) -> Result<bool, StoreError> {
        let _g = self.accounts.lock();
        let accounts = fs::read_to_string(self.root.join("accounts"))?;
        Ok(accounts.lines().any(|l| l.split('\t').next() == Some(user)))
    }

    // ---- shared repository

    fn shared_meta(&self) -> Result<(u64, Vec<Commit>), StoreError> {
        let text = fs::read_to_string(self.root.join("shared/meta"))?;
        let corrupt = || StoreError::Corrupt("shared/meta".into());
        let mut lines = text.lines();
        let head = lines
            .next()
            .and_then(|l| l.strip_prefix("head\t"))
            .and_then(|n| n.parse().ok())
            .ok_or_else(corrupt)?;
        let mut history = Vec::new();
        for line in lines {
            let f: Vec<&str> = line.split('\t').collect();
            let [rev, user, paths] = f[..] else { return Err(corrupt()) };
            history.push(Commit {
                revision: rev.parse().map_err(|_| corrupt())?,
                user: user.to_string(),
                paths: paths.split(',').filter(|p| !p.is_empty()).map(str::to_string).collect(),
            });
        }
        Ok((head, history))
    }

    fn write_shared_meta(&self, head: u64, history: &[Commit]) -> Result<(), StoreError> {
        let mut out = format!("head\t{head}\n");
        for c in history {
            out.push_str(&format!("{}\t{}\t{}\n", c.revision, c.user, c.paths.join(",")));
        }
        Ok(write_atomic(&self.root.join("shared/meta"), &out)?)
    }

    /// Last-changed revision of every shared file.
    fn last_changed(history: &[Commit]) -> BTreeMap<String, u64> {
        let mut out = BTreeMap::new();
        for c in history {
            for p in &c.paths {
                out.insert(p.clone(), c.revision);
            }
        }
        out
    }

    pub fn head(&self) -> Result<u64, StoreError> {
        let _g = self.shared.read();
        Ok(self.shared_meta()?.0)
    }

    pub fn history(&self) -> Result<Vec<Commit>, StoreError> {
        let _g = self.shared.read();
        Ok(self.shared_meta()?.1)
    }

    /// The head revision and its files in path order.
    pub fn shared_snapshot(&self) -> Result<(u64, Vec<(String, String)>), StoreError> {
        let _g = self.shared.read();
        let (head, history) = self.shared_meta()?;
        let mut files = Vec::new();
        for path in Self::last_changed(&history).into_keys() {
            files.push((path.clone(), fs::read_to_string(self.root.join("shared/files").join(&path))?));
        }
        Ok((head, files))
    }

    /// Creates revision 1 from `files` on an empty repository.
    pub fn import(&self, files: &[(&str, &str)]) -> Result<u64, StoreError> {
        let _g = self.shared.write();
        let (head, mut history) = self.shared_meta()?;
        if head != 0 {
            return Err(StoreError::Invalid("the shared library is not empty".into()));
        }
        let mut paths = BTreeSet::new();
        for (path, content) in files {
            let p = normalize_file(path)?;
            write_atomic(&self.root.join("shared/files").join(&p), content)?;
            paths.insert(p);
        }
        history.push(Commit { revision: 1, user: SHARED_USER.into(), paths: paths.into_iter().collect() });
        self.write_shared_meta(1, &history)?;
        Ok(1)
    }

    // ---- working copies

    fn wc_meta(&self, user: &str) -> Result<BTreeMap<String, WcEntry>, StoreError> {
        let Some(text) = read_opt(&self.user_dir(user).join("meta"))? else {
            return Ok(BTreeMap::new());
        };
        let corrupt = || StoreError::Corrupt(format!("users/{user}/meta"));
        let mut out = BTreeMap::new();
        for line in text.lines() {
            let f: Vec<&str> = line.split('\t').collect();
            let [path, base, modified] = f[..] else { return Err(corrupt()) };
            let modified = match modified {
                "0" => false,
                "1" => true,
                _ => return Err(corrupt()),
            };
            out.insert(path.to_string(), WcEntry { base: base.parse().map_err(|_| corrupt())?, modified });
        }
        Ok(out)
    }

    fn write_wc_meta(&self, user: &str, meta: &BTreeMap<String, WcEntry>) -> Result<(), StoreError> {
        let mut out = String::new();
        for (p, e) in meta {
            out.push_str(&format!("{p}\t{}\t{}\n", e.base, u8::from(e.modified)));
        }
        Ok(write_atomic(&self.user_dir(user).join("meta"), &out)?)
    }

    fn checkout(&self, user: &str) -> Result<(), StoreError> {
        let lock = self.user_lock(user);
        let _u = lock.lock();
        let _s = self.shared.read();
        let (head, history) = self.shared_meta()?;
        fs::create_dir_all(self.user_dir(user).join("files"))?;
        let mut meta = BTreeMap::new();
        for path in Self::last_changed(&history).into_keys() {
            let content = fs::read_to_string(self.root.join("shared/files").join(&path))?;
            write_atomic(&self.user_dir(user).join("files").join(&path), &content)?;
            meta.insert(path, WcEntry { base: head, modified: false });
        }
        self.write_wc_meta(user, &meta)
    }

    pub fn save(&self, user: &str, path: &str, content: &str) -> Result<(), StoreError> {
        let path = normalize_file(path)?;
        let lock = self.user_lock(user);
        let _u = lock.lock();
        let mut meta = self.wc_meta(user)?;
        write_atomic(&self.user_dir(user).join("files").join(&path), content)?;
        meta.entry(path).or_insert(WcEntry { base: 0, modified: true }).modified = true;
        self.write_wc_meta(user, &meta)
    }

    pub fn read(&self, user: &str, path: &str) -> Result<String, StoreError> {
        let path = normalize_file(path)?;
        let lock = self.user_lock(user);
        let _u = lock.lock();
        if !self.wc_meta(user)?.contains_key(&path) {
            return Err(StoreError::NotFound(path));
        }
        Ok(fs::read_to_string(self.user_dir(user).join("files").join(&path))?)
    }

    /// Immediate children of a directory in the user's tree.
    pub fn ls(&self, user: &str, path: &str) -> Result<Vec<ListEntry>, StoreError> {
        let dir = normalize(path)?;
        let lock = self.user_lock(user);
        let _u = lock.lock();
        let prefix = if dir.is_empty() { String::new() } else { format!("{dir}/") };
        let mut out: BTreeMap<String, ListEntry> = BTreeMap::new();
        for (p, e) in self.wc_meta(user)? {
            let Some(rest) = p.strip_prefix(&prefix) else { continue };
            let (name, kind) = match rest.split_once('/') {
                Some((d, _)) => (d.to_string(), EntryKind::Dir),
                None => (rest.to_string(), EntryKind::File),
            };
            let entry = out.entry(name.clone()).or_insert(ListEntry { name, kind, modified: false });
            entry.modified |= e.modified;
        }
        if out.is_empty() && !dir.is_empty() {
            return Err(StoreError::NotFound(dir));
        }
        Ok(out.into_values().collect())
    }

    /// Publishes locally modified files (all of them, or `paths`) as one
    /// revision, or nothing at all when any of them is stale.
    pub fn commit(&self, user: &str, paths: Option<&[&str]>) -> Result<CommitOutcome, StoreError> {
        let lock = self.user_lock(user);
        let _u = lock.lock();
        let mut meta = self.wc_meta(user)?;
        let selected: Vec<String> = match paths {
            Some(ps) => {
                let mut out = Vec::new();
                for p in ps {
                    let p = normalize_file(p)?;
                    match meta.get(&p) {
                        Some(e) if e.modified => out.push(p),
                        Some(_) => {}
                        None => return Err(StoreError::NotFound(p)),
                    }
                }
                out.sort();
                out.dedup();
                out
            }
            None => meta.iter().filter(|(_, e)| e.modified).map(|(p, _)| p.clone()).collect(),
        };
        if selected.is_empty() {
            return Ok(CommitOutcome::NothingToCommit);
        }

        let _s = self.shared.write();
        let (head, mut history) = self.shared_meta()?;
        let changed = Self::last_changed(&history);
        let conflicts: Vec<String> = selected
            .iter()
            .filter(|p| changed.get(*p).copied().unwrap_or(0) > meta[*p].base)
            .cloned()
            .collect();
        if !conflicts.is_empty() {
            return Ok(CommitOutcome::Conflicts(conflicts));
        }
        let revision = head + 1;
        for p in &selected {
            let content = fs::read_to_string(self.user_dir(user).join("files").join(p))?;
            write_atomic(&self.root.join("shared/files").join(p), &content)?;
        }
        history.push(Commit { revision, user: user.to_string(), paths: selected.clone() });
        self.write_shared_meta(revision, &history)?;
        for p in &selected {
            meta.insert(p.clone(), WcEntry { base: revision, modified: false });
        }
        self.write_wc_meta(user, &meta)?;
        log::info!("{user} committed revision {revision}: {}", selected.join(","));
        Ok(CommitOutcome::Committed { revision, changed: selected })
    }

    /// Brings unmodified files up to the shared head; modified files that
    /// changed upstream are reported and left alone.
    pub fn update(&self, user: &str) -> Result<UpdateOutcome, StoreError> {
        let lock = self.user_lock(user);
        let _u = lock.lock();
        let mut meta = self.wc_meta(user)?;
        let _s = self.shared.read();
        let (head, history) = self.shared_meta()?;
        let mut out = UpdateOutcome { revision: head, ..Default::default() };
        let changed = Self::last_changed(&history);
        for (path, &rev) in &changed {
            let local = meta.get(path).copied();
            if local.is_some_and(|e| e.base >= rev) {
                continue;
            }
            match local {
                Some(e) if e.modified => out.conflicts.push(path.clone()),
                _ => {
                    let content = fs::read_to_string(self.root.join("shared/files").join(path))?;
                    write_atomic(&self.user_dir(user).join("files").join(path), &content)?;
                    meta.insert(path.clone(), WcEntry { base: head, modified: false });
                    out.updated.push(path.clone());
                }
            }
        }
        for (path, e) in meta.iter_mut() {
            if !out.conflicts.contains(path) {
                e.base = e.base.max(head);
            }
        }
        self.write_wc_meta(user, &meta)?;
        Ok(out)
    }
}
