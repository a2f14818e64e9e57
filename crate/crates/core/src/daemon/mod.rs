//! The prover as a web service: authentication, sessions, file access and
//! library sync, answering every request with an XML document.
//!
//! [`Daemon::handle`] is transport-independent; the `webprover-daemon`
//! binary puts it behind HTTP.

mod xml;

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use parking_lot::Mutex;
use rand::RngCore;

use crate::executor::{ExecError, Mode, ProverStatus, Session};
use crate::kernel::{is_module, Environment};
use crate::libstore::{normalize_file, CommitOutcome, EntryKind, Store, StoreError, SHARED_USER};

use xml::Xml;

pub const MAX_BODY: usize = 1 << 20;
pub const DEFAULT_IDLE: Duration = Duration::from_secs(120 * 60);
pub const DEFAULT_MODULE: &str = "scratch";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    pub status: u16,
    pub body: String,
}

/// Failures reported outside the execution result.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Fault {
    Auth,
    Busy,
    NotFound(String),
    TooLarge,
    Taken(String),
    Invalid(String),
    Internal(String),
}

impl Fault {
    fn respond(&self) -> Response {
        let (status, code, message) = match self {
            Fault::Auth => (401, "auth", "authentication failed".to_string()),
            Fault::Busy => (409, "busy", "the session is busy".to_string()),
            Fault::NotFound(m) => (404, "notfound", m.clone()),
            Fault::TooLarge => (413, "toolarge", format!("request bodies are limited to {MAX_BODY} bytes")),
            Fault::Taken(m) => (409, "taken", m.clone()),
            Fault::Invalid(m) => (400, "invalid", m.clone()),
            Fault::Internal(m) => (500, "internal", m.clone()),
        };
        let mut x = Xml::new();
        x.text("error", &[("code", code)], &message);
        Response { status, body: x.finish() }
    }
}

impl From<StoreError> for Fault {
    fn from(e: StoreError) -> Fault {
        match e {
            StoreError::Access(_) | StoreError::Invalid(_) => Fault::Invalid(e.to_string()),
            StoreError::NotFound(_) => Fault::NotFound(e.to_string()),
            StoreError::Taken(_) => Fault::Taken(e.to_string()),
            StoreError::Corrupt(_) | StoreError::Io(_) => {
                log::error!("store failure: {e}");
                Fault::Internal("storage failure".into())
            }
        }
    }
}

struct Login {
    user: String,
    last_used: Instant,
}

/// A session id's prover state, created on first use.
struct Slot {
    user: String,
    module: String,
    session: Option<Session>,
}

type Params = HashMap<String, String>;

pub struct Daemon {
    store: Store,
    idle: Duration,
    tokens: Mutex<HashMap<String, Login>>,
    sessions: Mutex<HashMap<(String, String), Arc<Mutex<Slot>>>>,
    next_session: AtomicU64,
    base: Mutex<Option<(u64, Environment)>>,
}

/// Compiles shared library files, in order, into one environment. Each
/// file `p.ma` becomes module `p` owned by `shared`; a file stops at its
/// first failing statement.
pub fn compile_library(files: &[(String, String)]) -> (Environment, Vec<(String, ExecError)>) {
    let mut env = Environment::new();
    let mut failures = Vec::new();
    for (path, content) in files {
        let module = path.strip_suffix(".ma").unwrap_or(path);
        if !is_module(module) {
            log::warn!("skipping shared file with unusable module name: {path}");
            continue;
        }
        let mut session = Session::new(path, ProverStatus::new(SHARED_USER, module, env.clone()));
        let r = session.execute(content, Mode::All);
        let failure = r.error.or_else(|| {
            r.choices.map(|c| ExecError {
                code: crate::executor::ErrorCode::Parse,
                message: format!("ambiguous `{}` needs a hyperlink", c.lexeme),
                span: c.span,
            })
        });
        if let Some(e) = failure {
            log::warn!("{path}: {e}");
            failures.push((path.clone(), e));
        }
        env = session.status().env.clone();
    }
    (env, failures)
}

fn token() -> String {
    let mut bytes = [0u8; 16];
    rand::rng().fill_bytes(&mut bytes);
    hex::encode(bytes)
}

fn ok(x: Xml) -> Result<Response, Fault> {
    Ok(Response { status: 200, body: x.finish() })
}

fn param<'p>(params: &'p Params, name: &str) -> Result<&'p str, Fault> {
    params.get(name).map(String::as_str).ok_or_else(|| Fault::Invalid(format!("missing parameter `{name}`")))
}

impl Daemon {
    pub fn new(store: Store) -> Daemon {
        Daemon {
            store,
            idle: DEFAULT_IDLE,
            tokens: Mutex::new(HashMap::new()),
            sessions: Mutex::new(HashMap::new()),
            next_session: AtomicU64::new(1),
            base: Mutex::new(None),
        }
    }

    pub fn with_idle_timeout(mut self, idle: Duration) -> Daemon {
        self.idle = idle;
        self
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    /// The compiled shared head, cached per revision.
    pub fn base_environment(&self) -> Result<Environment, StoreError> {
        let head = self.store.head()?;
        let mut base = self.base.lock();
        if let Some((rev, env)) = base.as_ref() {
            if *rev == head {
                return Ok(env.clone());
            }
        }
        let (rev, files) = self.store.shared_snapshot()?;
        let (env, _) = compile_library(&files);
        *base = Some((rev, env.clone()));
        Ok(env)
    }

    /// The reply to a request whose body exceeds [`MAX_BODY`].
    pub fn too_large() -> Response {
        Fault::TooLarge.respond()
    }

    /// Answers one request. `target` is the path with its query string.
    pub fn handle(&self, method: &str, target: &str, body: &[u8]) -> Response {
        let (path, query) = target.split_once('?').unwrap_or((target, ""));
        let mut params: Params = form_urlencoded::parse(query.as_bytes()).into_owned().collect();
        let result = match (method, path) {
            ("POST", "/matita/register") | ("POST", "/matita/login") => {
                params.extend(form_urlencoded::parse(body).into_owned());
                if path.ends_with("register") {
                    self.register(&params)
                } else {
                    self.login(&params)
                }
            }
            ("POST", "/matita/logout") => self.logout(&params),
            ("POST", "/matita/session/new") => self.new_session(&params),
            ("POST", "/matita/execute") => self.execute(&params, body),
            ("POST", "/matita/undo") => self.undo(&params),
            ("GET", "/matita/goals") => self.goals(&params),
            ("GET", "/matita/ls") => self.ls(&params),
            ("GET", "/matita/read") => self.read(&params),
            ("POST", "/matita/save") => self.save(&params, body),
            ("POST", "/matita/commit") => self.commit(&params),
            ("POST", "/matita/update") => self.update(&params),
            (_, p) if ENDPOINTS.contains(&p) => Err(Fault::Invalid(format!("{method} is not allowed on {p}"))),
            (_, p) => Err(Fault::NotFound(format!("no endpoint {p}"))),
        };
        result.unwrap_or_else(|f| f.respond())
    }

    fn authenticate(&self, params: &Params) -> Result<String, Fault> {
        let token = params.get("token").ok_or(Fault::Auth)?;
        let mut tokens = self.tokens.lock();
        let login = tokens.get_mut(token).ok_or(Fault::Auth)?;
        if login.last_used.elapsed() > self.idle {
            tokens.remove(token);
            drop(tokens);
            self.sessions.lock().retain(|(t, _), _| t != token);
            return Err(Fault::Auth);
        }
        login.last_used = Instant::now();
        Ok(login.user.clone())
    }

    fn register(&self, params: &Params) -> Result<Response, Fault> {
        let user = param(params, "user")?;
        self.store.register(user, param(params, "password")?)?;
        let mut x = Xml::new();
        x.empty("registered", &[("user", user)]);
        ok(x)
    }

    fn login(&self, params: &Params) -> Result<Response, Fault> {
        let (Some(user), Some(password)) = (params.get("user"), params.get("password")) else {
            return Err(Fault::Auth);
        };
        if !self.store.authenticate(user, password)? {
            return Err(Fault::Auth);
        }
        let t = token();
        self.tokens.lock().insert(t.clone(), Login { user: user.clone(), last_used: Instant::now() });
        let mut x = Xml::new();
        x.text("token", &[], &t);
        ok(x)
    }

    fn logout(&self, params: &Params) -> Result<Response, Fault> {
        self.authenticate(params)?;
        let token = &params["token"];
        self.tokens.lock().remove(token);
        self.sessions.lock().retain(|(t, _), _| t != token);
        let mut x = Xml::new();
        x.empty("loggedout", &[]);
        ok(x)
    }

    fn new_session(&self, params: &Params) -> Result<Response, Fault> {
        let user = self.authenticate(params)?;
        let module = match params.get("file") {
            Some(f) => {
                let path = normalize_file(f)?;
                let module = path.strip_suffix(".ma").expect("checked by normalize_file").to_string();
                if !is_module(&module) {
                    return Err(Fault::Invalid(format!("`{f}` does not name a module")));
                }
                module
            }
            None => DEFAULT_MODULE.to_string(),
        };
        let id = format!("s{}", self.next_session.fetch_add(1, Ordering::Relaxed));
        let slot = Slot { user, module, session: None };
        self.sessions.lock().insert((params["token"].clone(), id.clone()), Arc::new(Mutex::new(slot)));
        let mut x = Xml::new();
        x.empty("session", &[("id", &id)]);
        ok(x)
    }

    /// Runs `f` on the caller's session, rejecting overlapping calls.
    fn with_session<T>(&self, params: &Params, f: impl FnOnce(&mut Session) -> T) -> Result<T, Fault> {
        self.authenticate(params)?;
        let key = (params["token"].clone(), param(params, "session")?.to_string());
        let slot = self.sessions.lock().get(&key).cloned().ok_or_else(|| Fault::NotFound(format!("no session {}", key.1)))?;
        let mut slot = slot.try_lock().ok_or(Fault::Busy)?;
        if slot.session.is_none() {
            let env = self.base_environment()?;
            let status = ProverStatus::new(&slot.user, &slot.module, env);
            slot.session = Some(Session::new(&key.1, status));
        }
        Ok(f(slot.session.as_mut().expect("just created")))
    }

    fn execute(&self, params: &Params, body: &[u8]) -> Result<Response, Fault> {
        self.authenticate(params)?;
        if body.len() > MAX_BODY {
            return Err(Fault::TooLarge);
        }
        let mode = match param(params, "mode")? {
            "one" => Mode::One,
            "all" => Mode::All,
            m => return Err(Fault::Invalid(format!("unknown mode `{m}`"))),
        };
        let text = std::str::from_utf8(body).map_err(|_| Fault::Invalid("the script is not UTF-8".into()))?;
        let result = self.with_session(params, |s| s.execute(text, mode))?;
        let mut x = Xml::new();
        x.exec_result(&result);
        ok(x)
    }

    fn undo(&self, params: &Params) -> Result<Response, Fault> {
        let steps = match param(params, "steps")? {
            "all" => None,
            n => match n.parse::<usize>() {
                Ok(n) if n >= 1 => Some(n),
                _ => return Err(Fault::Invalid(format!("bad step count `{n}`"))),
            },
        };
        let (undone, remaining, goals) = self.with_session(params, |s| {
            let before = s.history().len();
            let (remaining, goals) = s.undo(steps);
            (before - remaining, remaining, goals)
        })?;
        let mut x = Xml::new();
        x.empty("undone", &[("steps", &undone.to_string()), ("remaining", &remaining.to_string())]);
        x.goals(&goals);
        ok(x)
    }

    fn goals(&self, params: &Params) -> Result<Response, Fault> {
        let goals = self.with_session(params, |s| s.current_goals())?;
        let mut x = Xml::new();
        x.goals(&goals);
        ok(x)
    }

    fn ls(&self, params: &Params) -> Result<Response, Fault> {
        let user = self.authenticate(params)?;
        let path = params.get("path").map_or("", String::as_str);
        let entries = self.store.ls(&user, path)?;
        let mut x = Xml::new();
        x.start("listing", &[("path", path)]);
        for e in entries {
            let kind = match e.kind {
                EntryKind::File => "file",
                EntryKind::Dir => "dir",
            };
            x.empty("entry", &[("name", &e.name), ("kind", kind), ("modified", if e.modified { "1" } else { "0" })]);
        }
        x.end("listing");
        ok(x)
    }

    fn read(&self, params: &Params) -> Result<Response, Fault> {
        let user = self.authenticate(params)?;
        let file = param(params, "file")?;
        let content = self.store.read(&user, file)?;
        let mut x = Xml::new();
        x.cdata("file", &[("path", file)], &content);
        ok(x)
    }

    fn save(&self, params: &Params, body: &[u8]) -> Result<Response, Fault> {
        let user = self.authenticate(params)?;
        if body.len() > MAX_BODY {
            return Err(Fault::TooLarge);
        }
        let file = param(params, "file")?;
        let content = std::str::from_utf8(body).map_err(|_| Fault::Invalid("the file is not UTF-8".into()))?;
        self.store.save(&user, file, content)?;
        let mut x = Xml::new();
        x.empty("saved", &[("path", file)]);
        ok(x)
    }

    fn commit(&self, params: &Params) -> Result<Response, Fault> {
        let user = self.authenticate(params)?;
        let paths: Vec<&str> = params.get("paths").map(|p| p.split(',').collect()).unwrap_or_default();
        let outcome = self.store.commit(&user, (!paths.is_empty()).then_some(&paths[..]))?;
        let mut x = Xml::new();
        match outcome {
            CommitOutcome::Committed { revision, changed } => {
                x.start("committed", &[("revision", &revision.to_string()), ("changed", &changed.len().to_string())]);
                for p in &changed {
                    x.text("path", &[], p);
                }
                x.end("committed");
            }
            CommitOutcome::Conflicts(paths) => {
                x.start("conflicts", &[]);
                for p in &paths {
                    x.text("path", &[], p);
                }
                x.end("conflicts");
            }
            CommitOutcome::NothingToCommit => {
                x.empty("committed", &[("revision", &self.store.head()?.to_string()), ("changed", "0")]);
            }
        }
        ok(x)
    }

    fn update(&self, params: &Params) -> Result<Response, Fault> {
        let user = self.authenticate(params)?;
        let up = self.store.update(&user)?;
        let mut x = Xml::new();
        let revision = up.revision.to_string();
        if up.updated.is_empty() {
            x.empty("updated", &[("revision", &revision)]);
        } else {
            x.start("updated", &[("revision", &revision)]);
            for p in &up.updated {
                x.text("path", &[], p);
            }
            x.end("updated");
        }
        if !up.conflicts.is_empty() {
            x.start("conflicts", &[]);
            for p in &up.conflicts {
                x.text("path", &[], p);
            }
            x.end("conflicts");
        }
        ok(x)
    }
}

const ENDPOINTS: [&str; 12] = [
    "/matita/register",
    "/matita/login",
    "/matita/logout",
    "/matita/session/new",
    "/matita/execute",
    "/matita/undo",
    "/matita/goals",
    "/matita/ls",
    "/matita/read",
    "/matita/save",
    "/matita/commit",
    "/matita/update",
];
