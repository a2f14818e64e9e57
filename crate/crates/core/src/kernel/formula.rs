use std::collections::{BTreeMap, BTreeSet};

use super::uri::LibUri;

/// Propositional formulas. Negation is `Imp(a, Bot)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    Ref(LibUri),
    Imp(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Bot,
    Top,
}

/// Atom name to formula; the instantiation of a schema.
pub type Subst = BTreeMap<String, Formula>;

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string())
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn not(a: Formula) -> Formula {
        Formula::imp(a, Formula::Bot)
    }

    /// Node count.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Ref(_) | Formula::Bot | Formula::Top => 1,
            Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            Formula::Ref(_) | Formula::Bot | Formula::Top => {}
        }
    }

    pub fn refs(&self) -> BTreeSet<LibUri> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Ref(u) = f {
                out.insert(u.clone());
            }
        });
        out
    }

    pub fn has_refs(&self) -> bool {
        !self.refs().is_empty()
    }

    fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        if let Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) = self {
            a.visit(f);
            b.visit(f);
        }
    }

    /// Simultaneous substitution of atoms; atoms outside `subst` are kept.
    pub fn subst(&self, subst: &Subst) -> Formula {
        match self {
            Formula::Atom(a) => subst.get(a).cloned().unwrap_or_else(|| self.clone()),
            Formula::Imp(a, b) => Formula::imp(a.subst(subst), b.subst(subst)),
            Formula::And(a, b) => Formula::and(a.subst(subst), b.subst(subst)),
            Formula::Or(a, b) => Formula::or(a.subst(subst), b.subst(subst)),
            Formula::Ref(_) | Formula::Bot | Formula::Top => self.clone(),
        }
    }

    /// Splits `P1 → … → Pn → C` into `([P1..Pn], C)`, stripping every premise.
    pub fn split_premises(&self) -> (Vec<&Formula>, &Formula) {
        let mut premises = Vec::new();
        let mut cur = self;
        while let Formula::Imp(p, c) = cur {
            premises.push(p.as_ref());
            cur = c;
        }
        (premises, cur)
    }
}

/// One-way matching: finds the unique `σ` with `schema·σ == goal`.
///
/// Atoms of `schema` are pattern variables; `goal` is treated as ground.
/// Both formulas are expected to be Ref-free.
pub fn match_conclusion(schema: &Formula, goal: &Formula) -> Option<Subst> {
    let mut subst = Subst::new();
    match_into(schema, goal, &mut subst).then_some(subst)
}

fn match_into(schema: &Formula, goal: &Formula, subst: &mut Subst) -> bool {
    match (schema, goal) {
        (Formula::Atom(v), _) => match subst.get(v) {
            Some(bound) => bound == goal,
            None => {
                subst.insert(v.clone(), goal.clone());
                true
            }
        },
        (Formula::Imp(a, b), Formula::Imp(c, d))
        | (Formula::And(a, b), Formula::And(c, d))
        | (Formula::Or(a, b), Formula::Or(c, d)) => match_into(a, c, subst) && match_into(b, d, subst),
        (Formula::Bot, Formula::Bot) | (Formula::Top, Formula::Top) => true,
        (Formula::Ref(u), Formula::Ref(w)) => u == w,
        _ => false,
    }
}

/// Extends `subst` so that it covers exactly the atoms of `schema`:
/// unbound atoms map to themselves, foreign keys are dropped.
pub fn complete_subst(schema: &Formula, subst: &Subst) -> Subst {
    schema
        .atoms()
        .into_iter()
        .map(|a| {
            let image = subst.get(&a).cloned().unwrap_or_else(|| Formula::Atom(a.clone()));
            (a, image)
        })
        .collect()
}

/// Natural-deduction proof terms.
///
/// `Hole` marks an open goal in a partial proof; the checker rejects it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofTerm {
    Hyp(String),
    Lam(String, Formula, Box<ProofTerm>),
    App(Box<ProofTerm>, Box<ProofTerm>),
    Pair(Box<ProofTerm>, Box<ProofTerm>),
    Fst(Box<ProofTerm>),
    Snd(Box<ProofTerm>),
    /// Left injection, annotated with the right disjunct.
    Inl(Box<ProofTerm>, Formula),
    /// Right injection, annotated with the left disjunct.
    Inr(Box<ProofTerm>, Formula),
    Case {
        scrut: Box<ProofTerm>,
        left: String,
        left_body: Box<ProofTerm>,
        right: String,
        right_body: Box<ProofTerm>,
    },
    ExFalso(Box<ProofTerm>, Formula),
    TT,
    Inst(LibUri, Subst),
    Hole(usize),
}

impl ProofTerm {
    pub fn hyp(name: &str) -> ProofTerm {
        ProofTerm::Hyp(name.to_string())
    }

    pub fn lam(name: &str, ann: Formula, body: ProofTerm) -> ProofTerm {
        ProofTerm::Lam(name.to_string(), ann, Box::new(body))
    }

    pub fn app(f: ProofTerm, a: ProofTerm) -> ProofTerm {
        ProofTerm::App(Box::new(f), Box::new(a))
    }

    pub fn pair(a: ProofTerm, b: ProofTerm) -> ProofTerm {
        ProofTerm::Pair(Box::new(a), Box::new(b))
    }

    pub fn fst(p: ProofTerm) -> ProofTerm {
        ProofTerm::Fst(Box::new(p))
    }

    pub fn snd(p: ProofTerm) -> ProofTerm {
        ProofTerm::Snd(Box::new(p))
    }

    /// `let x : ann = value in body`, encoded as a beta-redex.
    pub fn let_in(name: &str, ann: Formula, value: ProofTerm, body: ProofTerm) -> ProofTerm {
        ProofTerm::app(ProofTerm::lam(name, ann, body), value)
    }

    /// Replaces hole `id` with `with`. Returns whether the hole was found.
    pub fn fill(&mut self, id: usize, with: &ProofTerm) -> bool {
        match self {
            ProofTerm::Hole(h) if *h == id => {
                *self = with.clone();
                true
            }
            ProofTerm::Lam(_, _, b) | ProofTerm::Fst(b) | ProofTerm::Snd(b) => b.fill(id, with),
            ProofTerm::Inl(b, _) | ProofTerm::Inr(b, _) | ProofTerm::ExFalso(b, _) => b.fill(id, with),
            ProofTerm::App(a, b) | ProofTerm::Pair(a, b) => a.fill(id, with) || b.fill(id, with),
            ProofTerm::Case { scrut, left_body, right_body, .. } => {
                scrut.fill(id, with) || left_body.fill(id, with) || right_body.fill(id, with)
            }
            _ => false,
        }
    }

    pub fn has_holes(&self) -> bool {
        match self {
            ProofTerm::Hole(_) => true,
            ProofTerm::Lam(_, _, b) | ProofTerm::Fst(b) | ProofTerm::Snd(b) => b.has_holes(),
            ProofTerm::Inl(b, _) | ProofTerm::Inr(b, _) | ProofTerm::ExFalso(b, _) => b.has_holes(),
            ProofTerm::App(a, b) | ProofTerm::Pair(a, b) => a.has_holes() || b.has_holes(),
            ProofTerm::Case { scrut, left_body, right_body, .. } => {
                scrut.has_holes() || left_body.has_holes() || right_body.has_holes()
            }
            ProofTerm::Hyp(_) | ProofTerm::TT | ProofTerm::Inst(..) => false,
        }
    }

    /// Library constants in first-use order (left to right), without duplicates.
    pub fn constants(&self) -> Vec<LibUri> {
        let mut out = Vec::new();
        self.collect_constants(&mut out);
        out
    }

    fn collect_constants(&self, out: &mut Vec<LibUri>) {
        match self {
            ProofTerm::Inst(u, _) => {
                if !out.contains(u) {
                    out.push(u.clone());
                }
            }
            ProofTerm::Lam(_, _, b) | ProofTerm::Fst(b) | ProofTerm::Snd(b) => b.collect_constants(out),
            ProofTerm::Inl(b, _) | ProofTerm::Inr(b, _) | ProofTerm::ExFalso(b, _) => b.collect_constants(out),
            ProofTerm::App(a, b) | ProofTerm::Pair(a, b) => {
                a.collect_constants(out);
                b.collect_constants(out);
            }
            ProofTerm::Case { scrut, left_body, right_body, .. } => {
                scrut.collect_constants(out);
                left_body.collect_constants(out);
                right_body.collect_constants(out);
            }
            ProofTerm::Hyp(_) | ProofTerm::TT | ProofTerm::Hole(_) => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: &str) -> Formula {
        Formula::atom(n)
    }

    #[test]
    fn match_pairs() {
        let schema = Formula::and(a("X"), a("Y"));
        let s = match_conclusion(&schema, &Formula::and(a("q"), a("p"))).unwrap();
        assert_eq!(s.get("X"), Some(&a("q")));
        assert_eq!(s.get("Y"), Some(&a("p")));
    }

    #[test]
    fn match_inconsistent_binding() {
        let schema = Formula::and(a("X"), a("X"));
        assert_eq!(match_conclusion(&schema, &Formula::and(a("q"), a("p"))), None);
    }

    #[test]
    fn bare_variable_matches_anything() {
        let goal = Formula::imp(Formula::and(a("q"), a("p")), a("r"));
        let s = match_conclusion(&a("X"), &goal).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s["X"], goal);
    }

    #[test]
    fn match_is_one_way() {
        // the goal's atoms are constants
        assert_eq!(match_conclusion(&Formula::Bot, &a("X")), None);
        assert_eq!(match_conclusion(&Formula::and(a("p"), a("p")), &Formula::and(a("q"), a("q"))), Some(
            [("p".to_string(), a("q"))].into_iter().collect()
        ));
    }

    #[test]
    fn premises_split() {
        let f = Formula::imp(a("p"), Formula::imp(a("q"), Formula::and(a("r"), a("s"))));
        let (ps, c) = f.split_premises();
        assert_eq!(ps, vec![&a("p"), &a("q")]);
        assert_eq!(c, &Formula::and(a("r"), a("s")));
    }

    #[test]
    fn complete_subst_covers_exactly() {
        let schema = Formula::imp(a("X"), a("Y"));
        let partial: Subst = [("Y".to_string(), Formula::Top), ("Z".to_string(), Formula::Bot)].into_iter().collect();
        let full = complete_subst(&schema, &partial);
        assert_eq!(full.len(), 2);
        assert_eq!(full["X"], a("X"));
        assert_eq!(full["Y"], Formula::Top);
    }

    #[test]
    fn fill_holes() {
        let mut p = ProofTerm::lam("x", a("a"), ProofTerm::pair(ProofTerm::Hole(1), ProofTerm::Hole(2)));
        assert!(p.fill(2, &ProofTerm::TT));
        assert!(p.has_holes());
        assert!(p.fill(1, &ProofTerm::hyp("x")));
        assert!(!p.has_holes());
        assert!(!p.fill(1, &ProofTerm::TT));
    }
}
