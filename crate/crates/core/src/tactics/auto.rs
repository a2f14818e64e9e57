use std::collections::BTreeSet;

use crate::kernel::{complete_subst, match_conclusion, Environment, Formula, LibUri, ProofTerm};

use super::{fresh_name, Goal};

pub const DEFAULT_DEPTH: u32 = 3;
pub const DEFAULT_BUDGET: u64 = 10_000;

/// What is needed to rerun a successful search cheaply: the library
/// constants the proof uses, in first-use order, and the apply depth it needed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutoTrace {
    pub lemmas: Vec<LibUri>,
    pub depth: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub budget: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutoSuccess {
    pub proof: ProofTerm,
    pub trace: AutoTrace,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutoFailure {
    pub stats: SearchStats,
    /// The node budget ran out before the space was exhausted.
    pub exhausted: bool,
}

struct Lemma<'e> {
    uri: &'e LibUri,
    statement: &'e Formula,
    premises: Vec<&'e Formula>,
    concl: &'e Formula,
}

struct OutOfBudget;

type Hyps = Vec<(String, Formula)>;

/// A proof and the apply nesting it used.
struct Found {
    term: ProofTerm,
    used: u32,
}

struct Search<'e> {
    lemmas: Vec<Lemma<'e>>,
    nodes: u64,
    budget: u64,
}

/// Depth-bounded search for a closed proof of `goal`, run with bounds
/// 1 through `depth` in turn so that a shallowest proof is found first.
///
/// Only applications (of hypotheses or library constants) consume depth.
/// Each expanded node counts toward `budget`. `allowed` restricts the
/// library constants tried; `None` means every visible lemma and axiom.
pub fn auto_search(
    goal: &Goal,
    env: &Environment,
    depth: u32,
    allowed: Option<&[LibUri]>,
    budget: u64,
) -> Result<AutoSuccess, AutoFailure> {
    let lemmas = env
        .visible_constants()
        .filter(|(u, _)| allowed.is_none_or(|a| a.contains(u)))
        .map(|(uri, statement)| {
            let (premises, concl) = statement.split_premises();
            Lemma { uri, statement, premises, concl }
        })
        .collect();
    let mut search = Search { lemmas, nodes: 0, budget };
    let hyps: Hyps = goal.hyps.iter().map(|(n, f)| (n.clone(), f.clone())).collect();
    let mut result = Ok(None);
    for bound in depth.min(1)..=depth {
        result = search.prove(&hyps, &goal.concl, bound, &BTreeSet::new());
        if !matches!(result, Ok(None)) {
            break;
        }
    }
    let stats = SearchStats { nodes: search.nodes, budget };
    match result {
        Ok(Some(found)) => Ok(AutoSuccess {
            trace: AutoTrace { lemmas: found.term.constants(), depth: found.used.max(1) },
            proof: found.term,
            stats,
        }),
        Ok(None) => Err(AutoFailure { stats, exhausted: false }),
        Err(OutOfBudget) => Err(AutoFailure { stats, exhausted: true }),
    }
}

/// Reruns a recorded search restricted to its trace.
pub fn replay(goal: &Goal, env: &Environment, trace: &AutoTrace, budget: u64) -> Result<AutoSuccess, AutoFailure> {
    auto_search(goal, env, trace.depth, Some(&trace.lemmas), budget)
}

fn fresh(hyps: &Hyps, extra: &[&str]) -> String {
    fresh_name(|n| extra.contains(&n) || hyps.iter().any(|(h, _)| h == n))
}

fn with(hyps: &Hyps, added: &[(&str, &Formula)]) -> Hyps {
    let mut out = hyps.clone();
    out.extend(added.iter().map(|(n, f)| (n.to_string(), (*f).clone())));
    out
}

impl<'e> Search<'e> {
    fn prove(
        &mut self,
        hyps: &Hyps,
        concl: &Formula,
        depth: u32,
        eliminated: &BTreeSet<String>,
    ) -> Result<Option<Found>, OutOfBudget> {
        if self.nodes >= self.budget {
            return Err(OutOfBudget);
        }
        self.nodes += 1;
        let leaf = |term| Ok(Some(Found { term, used: 0 }));

        if let Some((h, _)) = hyps.iter().find(|(_, f)| f == concl) {
            return leaf(ProofTerm::hyp(h));
        }
        if *concl == Formula::Top {
            return leaf(ProofTerm::TT);
        }
        if let Some((h, _)) = hyps.iter().find(|(_, f)| *f == Formula::Bot) {
            return leaf(ProofTerm::ExFalso(Box::new(ProofTerm::hyp(h)), concl.clone()));
        }

        match concl {
            Formula::Imp(a, b) => {
                let n = fresh(hyps, &[]);
                if let Some(f) = self.prove(&with(hyps, &[(&n, a)]), b, depth, eliminated)? {
                    return Ok(Some(Found { term: ProofTerm::lam(&n, (**a).clone(), f.term), used: f.used }));
                }
            }
            Formula::And(a, b) => {
                if let Some(l) = self.prove(hyps, a, depth, eliminated)? {
                    if let Some(r) = self.prove(hyps, b, depth, eliminated)? {
                        return Ok(Some(Found { term: ProofTerm::pair(l.term, r.term), used: l.used.max(r.used) }));
                    }
                }
            }
            Formula::Or(a, b) => {
                if let Some(l) = self.prove(hyps, a, depth, eliminated)? {
                    return Ok(Some(Found { term: ProofTerm::Inl(Box::new(l.term), (**b).clone()), used: l.used }));
                }
                if let Some(r) = self.prove(hyps, b, depth, eliminated)? {
                    return Ok(Some(Found { term: ProofTerm::Inr(Box::new(r.term), (**a).clone()), used: r.used }));
                }
            }
            _ => {}
        }

        for (h, f) in hyps {
            if eliminated.contains(h) {
                continue;
            }
            let mut elim = eliminated.clone();
            elim.insert(h.clone());
            match f {
                Formula::And(a, b) => {
                    let n1 = fresh(hyps, &[]);
                    let n2 = fresh(hyps, &[&n1]);
                    if let Some(found) = self.prove(&with(hyps, &[(&n1, a), (&n2, b)]), concl, depth, &elim)? {
                        let inner = ProofTerm::let_in(&n2, (**b).clone(), ProofTerm::snd(ProofTerm::hyp(h)), found.term);
                        let term = ProofTerm::let_in(&n1, (**a).clone(), ProofTerm::fst(ProofTerm::hyp(h)), inner);
                        return Ok(Some(Found { term, used: found.used }));
                    }
                }
                Formula::Or(a, b) => {
                    let n = fresh(hyps, &[]);
                    let Some(l) = self.prove(&with(hyps, &[(&n, a)]), concl, depth, &elim)? else {
                        continue;
                    };
                    if let Some(r) = self.prove(&with(hyps, &[(&n, b)]), concl, depth, &elim)? {
                        let term = ProofTerm::Case {
                            scrut: Box::new(ProofTerm::hyp(h)),
                            left: n.clone(),
                            left_body: Box::new(l.term),
                            right: n,
                            right_body: Box::new(r.term),
                        };
                        return Ok(Some(Found { term, used: l.used.max(r.used) }));
                    }
                }
                _ => {}
            }
        }

        if depth == 0 {
            return Ok(None);
        }
        // A hypothesis concluding ⊥ applies to any goal through ex falso.
        for (h, f) in hyps {
            let (premises, c) = f.split_premises();
            let absurd = *c == Formula::Bot && *concl != Formula::Bot;
            if premises.is_empty() || (c != concl && !absurd) {
                continue;
            }
            if let Some(mut found) = self.prove_all(hyps, &premises, depth - 1, eliminated, ProofTerm::hyp(h))? {
                if absurd {
                    found.term = ProofTerm::ExFalso(Box::new(found.term), concl.clone());
                }
                return Ok(Some(found));
            }
        }
        for i in 0..self.lemmas.len() {
            let lemma = &self.lemmas[i];
            let Some(partial) = match_conclusion(lemma.concl, concl) else {
                continue;
            };
            let subst = complete_subst(lemma.statement, &partial);
            let premises: Vec<Formula> = lemma.premises.iter().map(|p| p.subst(&subst)).collect();
            let head = ProofTerm::Inst(lemma.uri.clone(), subst);
            let refs: Vec<&Formula> = premises.iter().collect();
            if let Some(found) = self.prove_all(hyps, &refs, depth - 1, eliminated, head)? {
                return Ok(Some(found));
            }
        }
        Ok(None)
    }

    /// Proves every premise in turn and applies `head` to the results.
    fn prove_all(
        &mut self,
        hyps: &Hyps,
        premises: &[&Formula],
        depth: u32,
        eliminated: &BTreeSet<String>,
        head: ProofTerm,
    ) -> Result<Option<Found>, OutOfBudget> {
        let mut term = head;
        let mut used = 0;
        for p in premises {
            let Some(found) = self.prove(hyps, p, depth, eliminated)? else {
                return Ok(None);
            };
            term = ProofTerm::app(term, found.term);
            used = used.max(found.used);
        }
        Ok(Some(Found { term, used: used + 1 }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{check, Entry, ModuleId};

    fn a(n: &str) -> Formula {
        Formula::atom(n)
    }

    fn env_with(lemmas: &[(&str, Formula)]) -> Environment {
        let mut env = Environment::new();
        env.import(ModuleId::new("shared", "lib"));
        for (name, f) in lemmas {
            let uri = LibUri::lib("shared", "lib", name).unwrap();
            env.insert(uri, Entry::Axiom { statement: f.clone() }).unwrap();
        }
        env
    }

    fn prove(goal: Formula, env: &Environment, depth: u32) -> Result<AutoSuccess, AutoFailure> {
        let found = auto_search(&Goal::new(goal.clone()), env, depth, None, DEFAULT_BUDGET);
        if let Ok(s) = &found {
            check(&s.proof, &goal, env).unwrap();
        }
        found
    }

    #[test]
    fn propositional_tautologies_without_library() {
        let env = Environment::new();
        let goals = [
            Formula::imp(a("a"), a("a")),
            Formula::imp(Formula::and(a("a"), a("b")), Formula::and(a("b"), a("a"))),
            Formula::imp(Formula::or(a("a"), a("b")), Formula::or(a("b"), a("a"))),
            Formula::imp(Formula::Bot, a("z")),
            Formula::imp(a("a"), Formula::not(Formula::not(a("a")))),
        ];
        for g in goals {
            let s = prove(g.clone(), &env, 3).unwrap_or_else(|_| panic!("{g}"));
            assert!(s.trace.lemmas.is_empty());
        }
    }

    #[test]
    fn modus_ponens_costs_one_level() {
        let env = Environment::new();
        let g = Formula::imp(a("a"), Formula::imp(Formula::imp(a("a"), a("b")), a("b")));
        assert!(prove(g.clone(), &env, 0).is_err());
        assert_eq!(prove(g, &env, 1).unwrap().trace.depth, 1);
    }

    #[test]
    fn uses_library_and_records_trace() {
        let nn = |f| Formula::not(Formula::not(f));
        let env = env_with(&[
            ("dne", Formula::imp(nn(a("X")), a("X"))),
            ("idem", Formula::imp(Formula::and(a("X"), a("X")), a("X"))),
        ]);
        let goal = Formula::imp(nn(a("a")), Formula::imp(Formula::imp(a("a"), a("b")), a("b")));
        let s = prove(goal.clone(), &env, 2).unwrap();
        let dne = LibUri::lib("shared", "lib", "dne").unwrap();
        assert_eq!(s.trace, AutoTrace { lemmas: vec![dne], depth: 2 });
        let r = replay(&Goal::new(goal), &env, &s.trace, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.proof, s.proof);
        assert!(r.stats.nodes <= s.stats.nodes);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let env = env_with(&[("idem", Formula::imp(Formula::and(a("X"), a("X")), a("X")))]);
        let f = auto_search(&Goal::new(a("q")), &env, 100, None, 50).unwrap_err();
        assert!(f.exhausted);
        assert_eq!(f.stats.nodes, 50);
    }

    #[test]
    fn negated_hypothesis_closes_any_goal() {
        let env = Environment::new();
        let g = Formula::imp(a("a"), Formula::imp(Formula::not(a("a")), a("c")));
        assert_eq!(prove(g, &env, 1).unwrap().trace.depth, 1);
    }

    #[test]
    fn unprovable_fails_cleanly() {
        let env = Environment::new();
        let f = prove(Formula::or(a("a"), Formula::not(a("a"))), &env, 3).unwrap_err();
        assert!(!f.exhausted);
    }
}
