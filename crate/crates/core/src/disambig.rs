//! Resolution of overloaded identifiers and notation symbols.
//!
//! Leaves are resolved one at a time, left to right: a hyperlink hint wins,
//! then the applicability filter, and only then is the user asked.

use std::collections::BTreeMap;
use std::fmt;

use crate::kernel::{Connective, Entry, EntryKind, Environment, Formula, LibUri};
use crate::script::{
    AutoArgs, Fixity, FormulaAst, FormulaLeaf, Leaf, LinkTable, NotationTable, Span, StatementKind, TacticAst, Token,
};
use crate::tactics::{applicable, Goal, Referent, Tactic, DEFAULT_DEPTH};

/// Chosen interpretation per resolved leaf, keyed by token index. Leaves
/// that denote atoms or hypotheses are absent.
pub type Resolution = BTreeMap<usize, LibUri>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateKind {
    Lemma,
    Axiom,
    Definition,
    Hypothesis,
    Connective,
}

impl CandidateKind {
    pub fn name(self) -> &'static str {
        match self {
            CandidateKind::Lemma => "lemma",
            CandidateKind::Axiom => "axiom",
            CandidateKind::Definition => "definition",
            CandidateKind::Hypothesis => "hypothesis",
            CandidateKind::Connective => "connective",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub referent: Referent,
    pub display: String,
    pub kind: CandidateKind,
}

/// The user must pick one of `candidates` for the leaf at `span`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceRequest {
    pub lexeme: String,
    pub span: Span,
    pub candidates: Vec<Candidate>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DisambiguationError {
    #[error("stale hyperlink: `{lexeme}` no longer denotes {uri}")]
    StaleHyperlink { lexeme: String, uri: LibUri, span: Span },
    #[error("no interpretation of `{lexeme}` applies")]
    NoInterpretation { lexeme: String, span: Span },
}

impl DisambiguationError {
    pub fn span(&self) -> Span {
        match self {
            DisambiguationError::StaleHyperlink { span, .. } | DisambiguationError::NoInterpretation { span, .. } => *span,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Resolved(Resolution),
    Choice(ChoiceRequest),
}

/// What a statement's leaves are resolved against.
#[derive(Debug, Clone, Copy)]
pub struct Scope<'a> {
    pub env: &'a Environment,
    pub notation: &'a NotationTable,
    pub goal: Option<&'a Goal>,
}

/// Where a leaf occurs, which decides its candidates and filter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeafSite {
    Formula(Leaf),
    Symbol { symbol: String, token: usize, fixity: Fixity },
    Apply(Leaf),
    Exact(Leaf),
    Elim(Leaf),
    /// An `auto` argument; library constants only.
    Using(Leaf),
}

impl LeafSite {
    pub fn token(&self) -> usize {
        match self {
            LeafSite::Symbol { token, .. } => *token,
            LeafSite::Formula(l) | LeafSite::Apply(l) | LeafSite::Exact(l) | LeafSite::Elim(l) | LeafSite::Using(l) => {
                l.token
            }
        }
    }
}

/// Every resolvable leaf of a statement, ordered by token index.
pub fn leaf_sites(kind: &StatementKind) -> Vec<LeafSite> {
    let mut out = Vec::new();
    match kind {
        StatementKind::Axiom { formula, .. }
        | StatementKind::Definition { formula, .. }
        | StatementKind::Theorem { formula, .. } => {
            let mut leaves = Vec::new();
            formula.leaves(&mut leaves);
            out.extend(leaves.into_iter().map(|l| match l {
                FormulaLeaf::Ident(leaf) => LeafSite::Formula(leaf),
                FormulaLeaf::Symbol { symbol, token, fixity } => LeafSite::Symbol { symbol, token, fixity },
            }));
        }
        StatementKind::Tactic(t) => match t {
            TacticAst::Apply(l) => out.push(LeafSite::Apply(l.clone())),
            TacticAst::Exact(l) => out.push(LeafSite::Exact(l.clone())),
            TacticAst::Elim(l) => out.push(LeafSite::Elim(l.clone())),
            TacticAst::Auto(args) => {
                let traced = args.trace.iter().flat_map(|t| t.using.iter());
                out.extend(traced.chain(args.using.iter()).cloned().map(LeafSite::Using));
            }
            _ => {}
        },
        StatementKind::Notation(_) | StatementKind::Qed => {}
    }
    out.sort_by_key(LeafSite::token);
    out
}

fn lib_candidate(uri: &LibUri, env: &Environment) -> Option<Candidate> {
    let entry = env.get(uri)?;
    let name = uri.short_name();
    let (kind, display) = match entry {
        Entry::Definition { body } => (CandidateKind::Definition, format!("{name} := {body}")),
        Entry::Axiom { statement } => (CandidateKind::Axiom, format!("{name} : {statement}")),
        Entry::Lemma { statement, .. } => (CandidateKind::Lemma, format!("{name} : {statement}")),
    };
    Some(Candidate { referent: Referent::Lib(uri.clone()), display, kind })
}

/// All interpretations of a leaf, before hints and filtering.
pub fn candidates_for(site: &LeafSite, scope: &Scope<'_>) -> Vec<Candidate> {
    let constants = |name: &str| -> Vec<Candidate> {
        scope
            .env
            .named(name)
            .filter(|(_, e)| e.statement().is_some())
            .filter_map(|(u, _)| lib_candidate(u, scope.env))
            .collect()
    };
    match site {
        LeafSite::Formula(leaf) => scope
            .env
            .named(&leaf.name)
            .filter(|(_, e)| e.kind() == EntryKind::Definition)
            .filter_map(|(u, _)| lib_candidate(u, scope.env))
            .collect(),
        LeafSite::Symbol { symbol, fixity, .. } => scope
            .notation
            .entries(symbol)
            .iter()
            .filter(|e| e.fixity.is_infix() == fixity.is_infix())
            .map(|e| Candidate {
                referent: Referent::Lib(e.connective.uri()),
                display: format!("{symbol} : {} ({} {})", e.connective.name(), e.fixity.keyword(), e.priority),
                kind: CandidateKind::Connective,
            })
            .collect(),
        LeafSite::Apply(leaf) | LeafSite::Exact(leaf) | LeafSite::Elim(leaf) => {
            match scope.goal.and_then(|g| g.hyps.get(&leaf.name)) {
                Some(f) => vec![Candidate {
                    referent: Referent::Hyp(leaf.name.clone()),
                    display: format!("{} : {f}", leaf.name),
                    kind: CandidateKind::Hypothesis,
                }],
                None => constants(&leaf.name),
            }
        }
        LeafSite::Using(leaf) => constants(&leaf.name),
    }
}

/// The applicability filter: only `apply` and `exact` arguments have one.
fn passes(site: &LeafSite, candidate: &Candidate, scope: &Scope<'_>) -> bool {
    let strip = match site {
        LeafSite::Apply(_) => true,
        LeafSite::Exact(_) => false,
        _ => return true,
    };
    let Some(goal) = scope.goal else { return true };
    match &candidate.referent {
        Referent::Hyp(h) => goal.hyps.get(h).is_some_and(|f| applicable(f, true, &goal.concl, strip).is_some()),
        Referent::Lib(u) => scope
            .env
            .get(u)
            .and_then(|e| e.statement())
            .is_some_and(|f| applicable(f, false, &goal.concl, strip).is_some()),
    }
}

/// Resolves the leaves of one statement.
///
/// `tokens` and `links` come from the same lex pass as the statement; spans
/// in the result are those of `tokens`.
pub fn disambiguate(
    kind: &StatementKind,
    tokens: &[Token],
    links: &LinkTable,
    scope: &Scope<'_>,
) -> Result<Outcome, DisambiguationError> {
    let mut resolution = Resolution::new();
    for site in leaf_sites(kind) {
        let token = &tokens[site.token()];
        let candidates = candidates_for(&site, scope);
        let lexeme = || token.lexeme.clone();
        if let Some(hint) = links.get(&token.index) {
            if candidates.iter().any(|c| c.referent == Referent::Lib(hint.clone())) {
                resolution.insert(token.index, hint.clone());
                continue;
            }
            return Err(DisambiguationError::StaleHyperlink { lexeme: lexeme(), uri: hint.clone(), span: token.span });
        }
        let survivors: Vec<Candidate> = match candidates.len() {
            0 if matches!(site, LeafSite::Formula(_)) => continue,
            0 => return Err(DisambiguationError::NoInterpretation { lexeme: lexeme(), span: token.span }),
            1 => candidates,
            _ => candidates.into_iter().filter(|c| passes(&site, c, scope)).collect(),
        };
        match survivors.len() {
            0 => return Err(DisambiguationError::NoInterpretation { lexeme: lexeme(), span: token.span }),
            1 => {
                if let Referent::Lib(u) = &survivors[0].referent {
                    resolution.insert(token.index, u.clone());
                }
            }
            _ => return Ok(Outcome::Choice(ChoiceRequest { lexeme: lexeme(), span: token.span, candidates: survivors })),
        }
    }
    Ok(Outcome::Resolved(resolution))
}

/// Builds a kernel formula; resolved identifiers become references,
/// unresolved ones atoms.
pub fn elaborate(ast: &FormulaAst, res: &Resolution) -> Formula {
    match ast {
        FormulaAst::Ident(leaf) => match res.get(&leaf.token) {
            Some(uri) => Formula::Ref(uri.clone()),
            None => Formula::atom(&leaf.name),
        },
        FormulaAst::Bot => Formula::Bot,
        FormulaAst::Top => Formula::Top,
        FormulaAst::Not(a) => Formula::not(elaborate(a, res)),
        FormulaAst::Binary(c, a, b) => connect(*c, vec![elaborate(a, res), elaborate(b, res)]),
        FormulaAst::Overloaded { token, args, .. } => {
            let conn = match res.get(token) {
                Some(LibUri::Builtin(c)) => *c,
                other => unreachable!("overloaded symbol resolved to {other:?}"),
            };
            connect(conn, args.iter().map(|a| elaborate(a, res)).collect())
        }
    }
}

fn connect(c: Connective, mut args: Vec<Formula>) -> Formula {
    if c == Connective::Not {
        return Formula::not(args.pop().expect("one operand"));
    }
    let b = args.pop().expect("two operands");
    let a = args.pop().expect("two operands");
    match c {
        Connective::And => Formula::and(a, b),
        Connective::Or => Formula::or(a, b),
        Connective::Imp => Formula::imp(a, b),
        Connective::Not => unreachable!(),
    }
}

fn referent(leaf: &Leaf, res: &Resolution) -> Referent {
    match res.get(&leaf.token) {
        Some(u) => Referent::Lib(u.clone()),
        None => Referent::Hyp(leaf.name.clone()),
    }
}

/// Builds an executable tactic from a resolved tactic statement.
pub fn elaborate_tactic(ast: &TacticAst, res: &Resolution) -> Tactic {
    match ast {
        TacticAst::Intro(n) => Tactic::Intro(n.clone()),
        TacticAst::Apply(l) => Tactic::Apply(referent(l, res)),
        TacticAst::Exact(l) => Tactic::Exact(referent(l, res)),
        TacticAst::Elim(l) => Tactic::Elim(referent(l, res)),
        TacticAst::Assumption => Tactic::Assumption,
        TacticAst::Split => Tactic::Split,
        TacticAst::Left => Tactic::Left,
        TacticAst::Right => Tactic::Right,
        TacticAst::Auto(AutoArgs { trace, using, depth }) => {
            let uris = |leaves: &[Leaf]| leaves.iter().filter_map(|l| res.get(&l.token).cloned()).collect::<Vec<_>>();
            match trace {
                Some(t) => Tactic::Auto { using: Some(uris(&t.using)), depth: t.depth, traced: true },
                None => Tactic::Auto {
                    using: (!using.is_empty()).then(|| uris(using)),
                    depth: depth.unwrap_or(DEFAULT_DEPTH),
                    traced: false,
                },
            }
        }
    }
}

impl fmt::Display for ChoiceRequest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}` is ambiguous:", self.lexeme)?;
        for c in &self.candidates {
            write!(f, " [{}] {};", c.referent, c.display)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::ModuleId;
    use crate::script::{lex, parse_statement, NotationDecl, Statement};

    fn a(n: &str) -> Formula {
        Formula::atom(n)
    }

    fn env() -> Environment {
        let mut env = Environment::new();
        for (owner, module) in [("shared", "logic"), ("shared", "alt"), ("alice", "m2")] {
            env.import(ModuleId::new(owner, module));
        }
        let ax = |env: &mut Environment, u: &str, f: Formula| env.insert(u.parse().unwrap(), Entry::Axiom { statement: f }).unwrap();
        let cc = Formula::imp(Formula::and(a("X"), a("Y")), Formula::and(a("Y"), a("X")));
        ax(&mut env, "lib://shared/logic#conj_comm", cc);
        ax(&mut env, "lib://shared/alt#conj_comm", Formula::imp(a("X"), Formula::or(a("X"), a("Y"))));
        ax(&mut env, "lib://shared/alt#idem", Formula::imp(Formula::and(a("X"), a("X")), a("X")));
        ax(&mut env, "lib://shared/logic#idem", Formula::imp(Formula::and(a("X"), a("X")), a("X")));
        for u in ["lib://shared/logic#d", "lib://alice/m2#d"] {
            env.insert(u.parse().unwrap(), Entry::Definition { body: a("p") }).unwrap();
        }
        env
    }

    fn run(text: &str, table: &NotationTable, env: &Environment, goal: Option<&Goal>) -> Result<Outcome, DisambiguationError> {
        let lexed = lex(text, table).unwrap();
        let (st, _): (Statement, _) = parse_statement(text, &lexed, table, 0).unwrap();
        disambiguate(&st.kind, &lexed.tokens, &lexed.links, &Scope { env, notation: table, goal })
    }

    fn goal(concl: Formula) -> Goal {
        Goal::new(concl)
    }

    #[test]
    fn filter_selects_unique_applicable() {
        let env = env();
        let g = goal(Formula::and(a("q"), a("p")));
        let out = run("apply conj_comm.", &NotationTable::default(), &env, Some(&g)).unwrap();
        let expected: Resolution = [(1, "lib://shared/logic#conj_comm".parse().unwrap())].into();
        assert_eq!(out, Outcome::Resolved(expected));
    }

    #[test]
    fn matcher_admits_both() {
        let env = env();
        let g = goal(Formula::and(a("q"), a("p")));
        let Outcome::Choice(c) = run("apply idem.", &NotationTable::default(), &env, Some(&g)).unwrap() else {
            panic!("expected a choice");
        };
        assert_eq!(c.candidates.len(), 2);
        assert_eq!(c.span, Span::new(6, 10));
    }

    #[test]
    fn hint_short_circuits() {
        let env = env();
        let g = goal(Formula::or(a("q"), a("p")));
        let text = r#"apply <A href="lib://shared/logic#conj_comm">conj_comm</A>."#;
        let out = run(text, &NotationTable::default(), &env, Some(&g)).unwrap();
        assert!(matches!(out, Outcome::Resolved(r) if r.len() == 1));
    }

    #[test]
    fn stale_hint() {
        let env = env();
        let text = r#"theorem t : <A href="lib://shared/gone#d">d</A>."#;
        let err = run(text, &NotationTable::default(), &env, None).unwrap_err();
        assert!(matches!(err, DisambiguationError::StaleHyperlink { .. }));
    }

    #[test]
    fn hypotheses_shadow_library() {
        let env = env();
        let mut g = goal(a("p"));
        g.hyps.insert("conj_comm".into(), a("p"));
        let site = LeafSite::Apply(Leaf { name: "conj_comm".into(), token: 1 });
        let scope = Scope { env: &env, notation: &NotationTable::default(), goal: Some(&g) };
        let cands = candidates_for(&site, &scope);
        assert_eq!(cands.len(), 1);
        assert_eq!(cands[0].kind, CandidateKind::Hypothesis);
        let out = run("exact conj_comm.", &NotationTable::default(), &env, Some(&g)).unwrap();
        assert_eq!(out, Outcome::Resolved(Resolution::new()));
    }

    #[test]
    fn definitions_and_atoms() {
        let env = env();
        let out = run("theorem t : d -> e.", &NotationTable::default(), &env, None).unwrap();
        let Outcome::Choice(c) = out else { panic!() };
        assert_eq!(c.lexeme, "d");
        assert_eq!(c.candidates.len(), 2);
    }

    #[test]
    fn overloaded_symbol() {
        let env = env();
        let amp = |c: &str| NotationDecl { fixity: Fixity::InfixR, symbol: "&".into(), connective: c.into(), priority: 30 };
        let table = NotationTable::default().register(&amp("and")).unwrap().register(&amp("or")).unwrap();
        let Outcome::Choice(c) = run("axiom x : a & b.", &table, &env, None).unwrap() else { panic!() };
        let uris: Vec<String> = c.candidates.iter().map(|c| c.referent.to_string()).collect();
        assert_eq!(uris, ["builtin://logic#and", "builtin://logic#or"]);

        let text = r#"axiom x : a <A href="builtin://logic#or">&</A> b."#;
        let lexed = lex(text, &table).unwrap();
        let (st, _) = parse_statement(text, &lexed, &table, 0).unwrap();
        let scope = Scope { env: &env, notation: &table, goal: None };
        let Outcome::Resolved(res) = disambiguate(&st.kind, &lexed.tokens, &lexed.links, &scope).unwrap() else { panic!() };
        let StatementKind::Axiom { formula, .. } = &st.kind else { panic!() };
        assert_eq!(elaborate(formula, &res), Formula::or(a("a"), a("b")));
    }

    #[test]
    fn unknown_argument() {
        let env = env();
        let err = run("apply nothing.", &NotationTable::default(), &env, Some(&goal(a("p")))).unwrap_err();
        assert_eq!(err, DisambiguationError::NoInterpretation { lexeme: "nothing".into(), span: Span::new(6, 13) });
    }

    #[test]
    fn elaborated_auto() {
        let env = env();
        let table = NotationTable::default();
        let text = r#"auto<T> using <A href="lib://shared/logic#idem">idem</A> depth 2</T>."#;
        let lexed = lex(text, &table).unwrap();
        let (st, _) = parse_statement(text, &lexed, &table, 0).unwrap();
        let scope = Scope { env: &env, notation: &table, goal: Some(&goal(a("p"))) };
        let Outcome::Resolved(res) = disambiguate(&st.kind, &lexed.tokens, &lexed.links, &scope).unwrap() else { panic!() };
        let StatementKind::Tactic(t) = &st.kind else { panic!() };
        let idem: LibUri = "lib://shared/logic#idem".parse().unwrap();
        assert_eq!(elaborate_tactic(t, &res), Tactic::Auto { using: Some(vec![idem]), depth: 2, traced: true });
    }
}
