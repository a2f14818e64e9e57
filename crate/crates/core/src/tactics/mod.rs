//! The proof engine: goals, the tactic set, and bounded automation that
//! records replayable traces.

mod auto;

use std::fmt;

use indexmap::IndexMap;

use crate::kernel::{check, complete_subst, match_conclusion, Environment, Formula, KernelError, LibUri, ProofTerm, Subst};

pub use auto::{auto_search, replay, AutoFailure, AutoSuccess, AutoTrace, SearchStats, DEFAULT_BUDGET, DEFAULT_DEPTH};

/// What a tactic argument denotes after disambiguation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Referent {
    Lib(LibUri),
    Hyp(String),
}

impl fmt::Display for Referent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Referent::Lib(u) => write!(f, "{u}"),
            Referent::Hyp(h) => f.write_str(h),
        }
    }
}

/// A sequent awaiting proof. `id` names the hole it fills in the partial proof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Goal {
    pub id: usize,
    pub hyps: IndexMap<String, Formula>,
    pub concl: Formula,
}

impl Goal {
    pub fn new(concl: Formula) -> Goal {
        Goal { id: 0, hyps: IndexMap::new(), concl }
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, h) in &self.hyps {
            write!(f, "{name} : {h}, ")?;
        }
        write!(f, "⊢ {}", self.concl)
    }
}

/// `H1, H2, …`, skipping names already in `hyps`.
pub fn fresh_name<'a>(taken: impl Fn(&str) -> bool + 'a) -> String {
    (1..).map(|i| format!("H{i}")).find(|n| !taken(n)).expect("unbounded")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tactic {
    Intro(Option<String>),
    Apply(Referent),
    Exact(Referent),
    Assumption,
    Split,
    Left,
    Right,
    Elim(Referent),
    /// `using: None` searches the whole visible library.
    Auto { using: Option<Vec<LibUri>>, depth: u32, traced: bool },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TacticError {
    #[error("no goals left")]
    NoGoals,
    #[error("{tactic} expects {expected}, but the goal is {found}")]
    Shape { tactic: &'static str, expected: &'static str, found: Formula },
    #[error("elim expects a conjunction, disjunction or ⊥, but {arg} is {found}")]
    ElimShape { arg: String, found: Formula },
    #[error("{0} does not apply")]
    DoesNotApply(String),
    #[error("hypothesis name `{0}` is already taken")]
    NameTaken(String),
    #[error("unknown hypothesis `{0}`")]
    UnknownHyp(String),
    #[error("{0} is not a lemma or axiom in scope")]
    UnknownConstant(LibUri),
    #[error("no assumption matches the goal")]
    NoAssumption,
    #[error("auto failed after {} of {} nodes", .0.nodes, .0.budget)]
    AutoFailed(SearchStats),
    #[error("kernel rejected the proof: {0}")]
    Kernel(#[from] KernelError),
}

/// An open proof: remaining goals and the partial proof with one hole per goal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofState {
    pub theorem: String,
    pub statement: Formula,
    pub goals: Vec<Goal>,
    pub proof: ProofTerm,
    next_hole: usize,
}

/// Search output of a successful `auto` step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutoReport {
    pub trace: AutoTrace,
    pub stats: SearchStats,
}

impl ProofState {
    pub fn new(theorem: &str, statement: Formula) -> ProofState {
        ProofState {
            theorem: theorem.to_string(),
            goals: vec![Goal::new(statement.clone())],
            statement,
            proof: ProofTerm::Hole(0),
            next_hole: 1,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.goals.is_empty()
    }

    fn hole(&mut self) -> usize {
        self.next_hole += 1;
        self.next_hole - 1
    }
}

/// Runs `tactic` on the first goal.
///
/// When the last goal closes, the assembled proof is rechecked by the kernel.
pub fn apply_tactic(
    ps: &ProofState,
    tactic: &Tactic,
    env: &Environment,
    budget: u64,
) -> Result<(ProofState, Option<AutoReport>), TacticError> {
    let mut next = ps.clone();
    let goal = next.goals.first().cloned().ok_or(TacticError::NoGoals)?;
    let mut report = None;
    let (term, subgoals) = match tactic {
        Tactic::Intro(name) => {
            let Formula::Imp(a, b) = &goal.concl else {
                return Err(shape("intro", "an implication", &goal));
            };
            let name = match name {
                Some(n) if goal.hyps.contains_key(n) => return Err(TacticError::NameTaken(n.clone())),
                Some(n) => n.clone(),
                None => fresh_name(|n| goal.hyps.contains_key(n)),
            };
            let mut hyps = goal.hyps.clone();
            hyps.insert(name.clone(), (**a).clone());
            let sub = Goal { id: next.hole(), hyps, concl: (**b).clone() };
            (ProofTerm::lam(&name, (**a).clone(), ProofTerm::Hole(sub.id)), vec![sub])
        }
        Tactic::Apply(arg) => {
            let (head, statement, subst) = instantiate(arg, &goal, env, true)?;
            let (premises, _) = statement.split_premises();
            let mut term = head;
            let mut subs = Vec::new();
            for p in premises {
                let sub = Goal { id: next.hole(), hyps: goal.hyps.clone(), concl: p.subst(&subst) };
                term = ProofTerm::app(term, ProofTerm::Hole(sub.id));
                subs.push(sub);
            }
            (term, subs)
        }
        Tactic::Exact(arg) => (instantiate(arg, &goal, env, false)?.0, vec![]),
        Tactic::Assumption => {
            let name = goal.hyps.iter().find(|(_, f)| **f == goal.concl).ok_or(TacticError::NoAssumption)?.0;
            (ProofTerm::hyp(name), vec![])
        }
        Tactic::Split => {
            let Formula::And(a, b) = &goal.concl else {
                return Err(shape("split", "a conjunction", &goal));
            };
            let l = Goal { id: next.hole(), hyps: goal.hyps.clone(), concl: (**a).clone() };
            let r = Goal { id: next.hole(), hyps: goal.hyps.clone(), concl: (**b).clone() };
            (ProofTerm::pair(ProofTerm::Hole(l.id), ProofTerm::Hole(r.id)), vec![l, r])
        }
        Tactic::Left | Tactic::Right => {
            let Formula::Or(a, b) = &goal.concl else {
                let name = if *tactic == Tactic::Left { "left" } else { "right" };
                return Err(shape(name, "a disjunction", &goal));
            };
            let id = next.hole();
            if *tactic == Tactic::Left {
                let sub = Goal { id, hyps: goal.hyps.clone(), concl: (**a).clone() };
                (ProofTerm::Inl(Box::new(ProofTerm::Hole(id)), (**b).clone()), vec![sub])
            } else {
                let sub = Goal { id, hyps: goal.hyps.clone(), concl: (**b).clone() };
                (ProofTerm::Inr(Box::new(ProofTerm::Hole(id)), (**a).clone()), vec![sub])
            }
        }
        Tactic::Elim(arg) => {
            let (scrut, formula) = match arg {
                Referent::Hyp(h) => {
                    let f = goal.hyps.get(h).ok_or_else(|| TacticError::UnknownHyp(h.clone()))?;
                    (ProofTerm::hyp(h), f.clone())
                }
                Referent::Lib(u) => {
                    let statement = lemma_statement(u, env)?;
                    (ProofTerm::Inst(u.clone(), complete_subst(statement, &Subst::new())), statement.clone())
                }
            };
            match formula {
                Formula::Bot => (ProofTerm::ExFalso(Box::new(scrut), goal.concl.clone()), vec![]),
                Formula::And(a, b) => {
                    let n1 = fresh_name(|n| goal.hyps.contains_key(n));
                    let n2 = fresh_name(|n| n == n1 || goal.hyps.contains_key(n));
                    let mut hyps = goal.hyps.clone();
                    hyps.insert(n1.clone(), (*a).clone());
                    hyps.insert(n2.clone(), (*b).clone());
                    let sub = Goal { id: next.hole(), hyps, concl: goal.concl.clone() };
                    let body = ProofTerm::let_in(&n2, *b, ProofTerm::snd(scrut.clone()), ProofTerm::Hole(sub.id));
                    (ProofTerm::let_in(&n1, *a, ProofTerm::fst(scrut), body), vec![sub])
                }
                Formula::Or(a, b) => {
                    let n = fresh_name(|n| goal.hyps.contains_key(n));
                    let mut lh = goal.hyps.clone();
                    lh.insert(n.clone(), *a);
                    let mut rh = goal.hyps.clone();
                    rh.insert(n.clone(), *b);
                    let l = Goal { id: next.hole(), hyps: lh, concl: goal.concl.clone() };
                    let r = Goal { id: next.hole(), hyps: rh, concl: goal.concl.clone() };
                    let term = ProofTerm::Case {
                        scrut: Box::new(scrut),
                        left: n.clone(),
                        left_body: Box::new(ProofTerm::Hole(l.id)),
                        right: n,
                        right_body: Box::new(ProofTerm::Hole(r.id)),
                    };
                    (term, vec![l, r])
                }
                other => return Err(TacticError::ElimShape { arg: arg.to_string(), found: other }),
            }
        }
        Tactic::Auto { using, depth, .. } => {
            let found = auto_search(&goal, env, *depth, using.as_deref(), budget)
                .map_err(|f| TacticError::AutoFailed(f.stats))?;
            report = Some(AutoReport { trace: found.trace, stats: found.stats });
            (found.proof, vec![])
        }
    };
    next.proof.fill(goal.id, &term);
    next.goals.splice(0..1, subgoals);
    if next.goals.is_empty() {
        check(&next.proof, &next.statement, env)?;
    }
    Ok((next, report))
}

fn shape(tactic: &'static str, expected: &'static str, goal: &Goal) -> TacticError {
    TacticError::Shape { tactic, expected, found: goal.concl.clone() }
}

pub(crate) fn lemma_statement<'e>(uri: &LibUri, env: &'e Environment) -> Result<&'e Formula, TacticError> {
    env.get(uri).and_then(|e| e.statement()).ok_or_else(|| TacticError::UnknownConstant(uri.clone()))
}

/// Whether `arg` passes the applicability test `apply` (strip every premise,
/// then match) or `exact` (match the whole statement) performs on `goal`.
pub fn applicable(statement: &Formula, is_hyp: bool, goal: &Formula, strip_premises: bool) -> Option<Subst> {
    let target = if strip_premises { statement.split_premises().1 } else { statement };
    if is_hyp {
        (target == goal).then(Subst::new)
    } else {
        match_conclusion(target, goal)
    }
}

/// Resolves an apply/exact argument to its head term, instantiated statement
/// and substitution.
fn instantiate(
    arg: &Referent,
    goal: &Goal,
    env: &Environment,
    strip_premises: bool,
) -> Result<(ProofTerm, Formula, Subst), TacticError> {
    let fail = || TacticError::DoesNotApply(arg.to_string());
    match arg {
        Referent::Hyp(h) => {
            let f = goal.hyps.get(h).ok_or_else(|| TacticError::UnknownHyp(h.clone()))?;
            applicable(f, true, &goal.concl, strip_premises).ok_or_else(fail)?;
            Ok((ProofTerm::hyp(h), f.clone(), Subst::new()))
        }
        Referent::Lib(u) => {
            let statement = lemma_statement(u, env)?;
            let partial = applicable(statement, false, &goal.concl, strip_premises).ok_or_else(fail)?;
            let subst = complete_subst(statement, &partial);
            Ok((ProofTerm::Inst(u.clone(), subst.clone()), statement.subst(&subst), subst))
        }
    }
}
