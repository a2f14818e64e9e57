//! Statement-granular execution with snapshot undo.

use std::fmt;

use crate::disambig::{disambiguate, elaborate, elaborate_tactic, ChoiceRequest, Outcome, Scope};
use crate::enricher::{enrich, EnrichedStatement};
use crate::kernel::{unfold_normalize, Entry, Environment, KernelError, LibUri, ModuleId};
use crate::script::{lex_statement, parse_chars, NotationTable, Span, StatementKind, TacticAst, TokenKind};
use crate::tactics::{apply_tactic, Goal, ProofState, SearchStats, Tactic, TacticError, DEFAULT_BUDGET};

/// Everything a statement can observe or change.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProverStatus {
    user: String,
    module: String,
    pub env: Environment,
    pub notation: NotationTable,
    pub proof: Option<ProofState>,
}

impl ProverStatus {
    /// In-session declarations get uris under `lib://<user>/<module>`.
    pub fn new(user: &str, module: &str, mut env: Environment) -> ProverStatus {
        env.import(ModuleId::new(user, module));
        ProverStatus {
            user: user.to_string(),
            module: module.to_string(),
            env,
            notation: NotationTable::default(),
            proof: None,
        }
    }

    pub fn user(&self) -> &str {
        &self.user
    }

    pub fn module(&self) -> &str {
        &self.module
    }

    pub fn goals(&self) -> &[Goal] {
        self.proof.as_ref().map_or(&[], |p| &p.goals)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepSnapshot {
    pub pre: ProverStatus,
    pub enriched: EnrichedStatement,
    /// Search counters when the step ran `auto`.
    pub stats: Option<SearchStats>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    One,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCode {
    Parse,
    Tactic,
    Kernel,
    Order,
}

impl ErrorCode {
    pub fn name(self) -> &'static str {
        match self {
            ErrorCode::Parse => "parse",
            ErrorCode::Tactic => "tactic",
            ErrorCode::Kernel => "kernel",
            ErrorCode::Order => "order",
        }
    }
}

/// A failure located in the submitted text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecError {
    pub code: ErrorCode,
    pub message: String,
    pub span: Span,
}

impl fmt::Display for ExecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error at {}: {}", self.code.name(), self.span, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecResult {
    /// Scalars of the submitted text that were executed.
    pub consumed: usize,
    /// History index of the first returned statement.
    pub first_index: usize,
    pub statements: Vec<EnrichedStatement>,
    pub goals: Vec<Goal>,
    pub error: Option<ExecError>,
    /// Spans are absolute in the submitted text.
    pub choices: Option<ChoiceRequest>,
}

enum Stop {
    Error(ExecError),
    Choice(ChoiceRequest),
}

fn err(code: ErrorCode, message: impl fmt::Display, span: Span) -> Stop {
    Stop::Error(ExecError { code, message: message.to_string(), span })
}

fn kernel_code(e: &TacticError) -> ErrorCode {
    match e {
        TacticError::Kernel(_) => ErrorCode::Kernel,
        _ => ErrorCode::Tactic,
    }
}

pub struct Session {
    id: String,
    status: ProverStatus,
    history: Vec<StepSnapshot>,
    budget: u64,
}

impl Session {
    pub fn new(id: &str, status: ProverStatus) -> Session {
        Session { id: id.to_string(), status, history: Vec::new(), budget: DEFAULT_BUDGET }
    }

    pub fn with_budget(mut self, budget: u64) -> Session {
        self.budget = budget;
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn status(&self) -> &ProverStatus {
        &self.status
    }

    pub fn history(&self) -> &[StepSnapshot] {
        &self.history
    }

    pub fn current_goals(&self) -> Vec<Goal> {
        self.status.goals().to_vec()
    }

    /// Executes statements from the front of `text`: one, or as many as
    /// succeed.
    pub fn execute(&mut self, text: &str, mode: Mode) -> ExecResult {
        let chars: Vec<char> = text.chars().collect();
        let mut result = ExecResult {
            consumed: 0,
            first_index: self.history.len(),
            statements: Vec::new(),
            goals: Vec::new(),
            error: None,
            choices: None,
        };
        loop {
            match self.step(&chars, result.consumed) {
                Ok(Some(enriched)) => {
                    result.consumed = enriched.original.end;
                    result.statements.push(enriched);
                    if mode == Mode::One {
                        break;
                    }
                }
                Ok(None) => break,
                Err(Stop::Error(e)) => {
                    result.error = Some(e);
                    break;
                }
                Err(Stop::Choice(c)) => {
                    result.choices = Some(c);
                    break;
                }
            }
        }
        result.goals = self.current_goals();
        result
    }

    /// Pops `steps` snapshots (all of them for `None`). Returns the
    /// remaining history depth and the goals after undoing.
    pub fn undo(&mut self, steps: Option<usize>) -> (usize, Vec<Goal>) {
        let n = steps.unwrap_or(self.history.len()).min(self.history.len());
        if n > 0 {
            let keep = self.history.len() - n;
            let oldest = self.history.drain(keep..).next().expect("n > 0");
            self.status = oldest.pre;
        }
        (self.history.len(), self.current_goals())
    }

    /// Runs the statement starting at `offset`; `None` when only trivia remain.
    fn step(&mut self, chars: &[char], offset: usize) -> Result<Option<EnrichedStatement>, Stop> {
        let rest = &chars[offset..];
        let shifted = |e: crate::script::SyntaxError| err(ErrorCode::Parse, &e.message, e.span.shift(offset));
        let Some(ls) = lex_statement(rest, &self.status.notation).map_err(shifted)? else {
            return Ok(None);
        };
        let slice = &rest[..ls.len];
        let (stmt, _) = parse_chars(slice, &ls.lexed, &self.status.notation, 0).map_err(shifted)?;
        let body = stmt.body.shift(offset);
        self.check_order(&stmt.kind, body)?;

        let scope = Scope {
            env: &self.status.env,
            notation: &self.status.notation,
            goal: self.status.proof.as_ref().and_then(|p| p.goals.first()),
        };
        let res = match disambiguate(&stmt.kind, &ls.lexed.tokens, &ls.lexed.links, &scope) {
            Ok(Outcome::Resolved(res)) => res,
            Ok(Outcome::Choice(mut c)) => {
                c.span = c.span.shift(offset);
                return Err(Stop::Choice(c));
            }
            Err(e) => return Err(err(ErrorCode::Parse, &e, e.span().shift(offset))),
        };

        let pre = self.status.clone();
        let mut trace = None;
        let mut stats = None;
        let status = &mut self.status;
        match &stmt.kind {
            StatementKind::Axiom { name, formula } | StatementKind::Definition { name, formula } => {
                let uri = self::uri(status, name, body)?;
                let f = elaborate(formula, &res);
                let entry = match stmt.kind {
                    StatementKind::Axiom { .. } => Entry::Axiom { statement: f },
                    _ => Entry::Definition { body: f },
                };
                status.env.insert(uri, entry).map_err(|e| err(ErrorCode::Kernel, e, body))?;
            }
            StatementKind::Theorem { name, formula } => {
                self::uri(status, name, body)?;
                let statement = unfold_normalize(&elaborate(formula, &res), &status.env)
                    .map_err(|e| err(ErrorCode::Kernel, e, body))?;
                status.proof = Some(ProofState::new(name, statement));
            }
            StatementKind::Notation(decl) => {
                status.notation = status.notation.register(decl).map_err(|e| err(ErrorCode::Parse, e, body))?;
            }
            StatementKind::Tactic(ast) => {
                let tactic = elaborate_tactic(ast, &res);
                let ps = status.proof.as_ref().expect("order checked");
                let (next, report) = apply_tactic(ps, &tactic, &status.env, self.budget)
                    .map_err(|e| err(kernel_code(&e), e, body))?;
                status.proof = Some(next);
                if let Some(report) = report {
                    stats = Some(report.stats);
                    if let (Tactic::Auto { traced: false, .. }, TacticAst::Auto(_)) = (&tactic, ast) {
                        let auto = ls.lexed.tokens.iter().find(|t| t.kind == TokenKind::Keyword).expect("auto keyword");
                        trace = Some((auto.index, report.trace));
                    }
                }
            }
            StatementKind::Qed => {
                let ps = status.proof.take().expect("order checked");
                let uri = self::uri(status, &ps.theorem, body)?;
                let entry = Entry::Lemma { statement: ps.statement.clone(), proof: ps.proof.clone() };
                if let Err(e) = status.env.insert(uri, entry) {
                    status.proof = Some(ps);
                    return Err(err(ErrorCode::Kernel, e, body));
                }
            }
        }
        let text = enrich(&stmt.raw, &ls.lexed.tokens, &ls.lexed.links, &res, trace.as_ref().map(|(i, t)| (*i, t)));
        let enriched = EnrichedStatement { text, original: stmt.span.shift(offset) };
        self.history.push(StepSnapshot { pre, enriched: enriched.clone(), stats });
        Ok(Some(enriched))
    }

    fn check_order(&self, kind: &StatementKind, body: Span) -> Result<(), Stop> {
        let open = self.status.proof.as_ref();
        match (kind, open) {
            (StatementKind::Tactic(_), None) => Err(err(ErrorCode::Order, "no proof is open", body)),
            (StatementKind::Qed, None) => Err(err(ErrorCode::Order, "qed without an open proof", body)),
            (StatementKind::Qed, Some(ps)) if !ps.is_complete() => {
                Err(err(ErrorCode::Order, format!("qed with {} open goal(s)", ps.goals.len()), body))
            }
            (StatementKind::Tactic(_) | StatementKind::Qed, Some(_)) => Ok(()),
            (_, Some(ps)) => {
                Err(err(ErrorCode::Order, format!("declarations are not allowed inside the proof of {}", ps.theorem), body))
            }
            (_, None) => Ok(()),
        }
    }
}

/// The uri a new in-session declaration gets; taken names are an order error.
fn uri(status: &ProverStatus, name: &str, body: Span) -> Result<LibUri, Stop> {
    let uri = LibUri::lib(&status.user, &status.module, name).map_err(|e| err(ErrorCode::Parse, e, body))?;
    if status.env.contains(&uri) {
        return Err(err(ErrorCode::Order, KernelError::Duplicate(uri), body));
    }
    Ok(uri)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Formula;

    fn session() -> Session {
        Session::new("s", ProverStatus::new("alice", "scratch", Environment::new()))
    }

    const IDENTITY: &str = "theorem t : a → a. intro H. exact H. qed.";

    #[test]
    fn identity_all() {
        let mut s = session();
        let r = s.execute(IDENTITY, Mode::All);
        assert_eq!(r.consumed, IDENTITY.chars().count());
        assert_eq!(r.statements.len(), 4);
        assert!(r.goals.is_empty() && r.error.is_none() && r.choices.is_none());
        let uri: LibUri = "lib://alice/scratch#t".parse().unwrap();
        assert!(s.status().env.contains(&uri));
    }

    #[test]
    fn identity_one() {
        let mut s = session();
        let r = s.execute(IDENTITY, Mode::One);
        assert_eq!(r.consumed, "theorem t : a → a.".chars().count());
        assert_eq!(r.statements.len(), 1);
        assert_eq!(r.goals.len(), 1);
        assert_eq!(r.goals[0].concl, Formula::imp(Formula::atom("a"), Formula::atom("a")));
    }

    #[test]
    fn qed_without_proof() {
        let mut s = session();
        let r = s.execute("qed.", Mode::All);
        assert_eq!(r.consumed, 0);
        assert!(r.statements.is_empty());
        let e = r.error.unwrap();
        assert_eq!((e.code, e.span.start), (ErrorCode::Order, 0));
    }

    #[test]
    fn error_offsets_are_absolute() {
        let mut s = session();
        let r = s.execute("theorem t : a ∨ b. split.", Mode::All);
        assert_eq!(r.consumed, 18);
        let e = r.error.unwrap();
        assert_eq!(e.code, ErrorCode::Tactic);
        assert_eq!(e.span, Span::new(19, 25));
    }

    #[test]
    fn split_goals_and_undo() {
        let mut s = session();
        let r = s.execute("theorem t : a∧b → b∧a. intro H. split.", Mode::All);
        assert_eq!(r.goals.len(), 2);
        let initial = ProverStatus::new("alice", "scratch", Environment::new());
        let after_intro = s.history()[2].pre.goals().to_vec();
        assert_eq!(s.undo(Some(1)), (2, after_intro));
        assert_eq!(s.undo(None).0, 0);
        assert_eq!(*s.status(), initial);
        assert_eq!(s.undo(Some(3)).0, 0);
    }

    #[test]
    fn auto_gains_trace_and_replays() {
        let mut s = session();
        let text = "theorem t : p∧q → q∧p. auto.";
        let r = s.execute(text, Mode::All);
        assert!(r.error.is_none(), "{:?}", r.error);
        assert_eq!(r.statements[1].text, " auto<T> depth 1</T>.");
        let first = s.history()[1].stats.unwrap();

        let mut again = session();
        let enriched: String = r.statements.iter().map(|e| e.text.as_str()).collect();
        let r2 = again.execute(&enriched, Mode::All);
        assert_eq!(r2.statements[1].text, " auto<T> depth 1</T>.");
        assert!(again.history()[1].stats.unwrap().nodes <= first.nodes);
        assert_eq!(again.status().proof, s.status().proof);
    }

    #[test]
    fn declarations_inside_proof_and_duplicates() {
        let mut s = session();
        let r = s.execute("theorem t : a → a. axiom x : b.", Mode::All);
        assert_eq!(r.error.unwrap().code, ErrorCode::Order);
        let mut s = session();
        let r = s.execute("axiom x : b. axiom x : c.", Mode::All);
        assert_eq!(r.statements.len(), 1);
        assert_eq!(r.error.unwrap().code, ErrorCode::Order);
    }

    #[test]
    fn notation_mid_script() {
        let mut s = session();
        let text = "notation infixr \"&&\" for and priority 30. theorem t : a && b → b. intro H. elim H. exact H2. qed.";
        let r = s.execute(text, Mode::All);
        assert!(r.error.is_none(), "{:?}", r.error);
        assert_eq!(r.consumed, text.chars().count());
    }

    #[test]
    fn trailing_comment_is_not_consumed() {
        let mut s = session();
        let r = s.execute("axiom x : b. (* done *)", Mode::All);
        assert_eq!(r.consumed, 12);
        assert!(r.error.is_none());
    }

    #[test]
    fn unterminated_statement() {
        let mut s = session();
        let r = s.execute("axiom x : b", Mode::All);
        assert_eq!(r.error.unwrap().code, ErrorCode::Parse);
    }
}
