use indexmap::IndexMap;

use super::env::{Entry, Environment};
use super::formula::{Formula, ProofTerm};
use super::{KernelError, Position};

/// Replaces every `Ref` by the normal form of its definition body.
pub fn unfold_normalize(f: &Formula, env: &Environment) -> Result<Formula, KernelError> {
    Ok(match f {
        Formula::Ref(uri) => match env.get(uri) {
            Some(Entry::Definition { body }) => unfold_normalize(body, env)?,
            Some(_) => return Err(KernelError::NotADefinition(uri.clone())),
            None => return Err(KernelError::DanglingRef(uri.clone())),
        },
        Formula::Imp(a, b) => Formula::imp(unfold_normalize(a, env)?, unfold_normalize(b, env)?),
        Formula::And(a, b) => Formula::and(unfold_normalize(a, env)?, unfold_normalize(b, env)?),
        Formula::Or(a, b) => Formula::or(unfold_normalize(a, env)?, unfold_normalize(b, env)?),
        Formula::Atom(_) | Formula::Bot | Formula::Top => f.clone(),
    })
}

/// Computes the normalized formula proved by `p` under `hyps`.
pub fn infer(p: &ProofTerm, hyps: &IndexMap<String, Formula>, env: &Environment) -> Result<Formula, KernelError> {
    let mut ctx = Vec::with_capacity(hyps.len());
    for (name, f) in hyps {
        ctx.push((name.clone(), unfold_normalize(f, env)?));
    }
    Checker { env, ctx, pos: Vec::new() }.infer(p)
}

/// Accepts iff `p` proves `goal` in the empty context, modulo unfolding.
pub fn check(p: &ProofTerm, goal: &Formula, env: &Environment) -> Result<(), KernelError> {
    let proved = infer(p, &IndexMap::new(), env)?;
    let goal = unfold_normalize(goal, env)?;
    if proved == goal {
        Ok(())
    } else {
        Err(KernelError::WrongConclusion { expected: goal, found: proved })
    }
}

struct Checker<'a> {
    env: &'a Environment,
    ctx: Vec<(String, Formula)>,
    pos: Vec<usize>,
}

impl Checker<'_> {
    fn here(&self) -> Position {
        Position(self.pos.clone())
    }

    fn mismatch(&self, message: String) -> KernelError {
        KernelError::RuleMismatch { at: self.here(), message }
    }

    fn child(&mut self, i: usize, p: &ProofTerm) -> Result<Formula, KernelError> {
        self.pos.push(i);
        let r = self.infer(p);
        self.pos.pop();
        r
    }

    fn bind(&mut self, i: usize, name: &str, ann: Formula, body: &ProofTerm) -> Result<Formula, KernelError> {
        self.ctx.push((name.to_string(), ann));
        let r = self.child(i, body);
        self.ctx.pop();
        r
    }

    fn norm(&self, f: &Formula) -> Result<Formula, KernelError> {
        unfold_normalize(f, self.env)
    }

    fn infer(&mut self, p: &ProofTerm) -> Result<Formula, KernelError> {
        match p {
            ProofTerm::Hyp(name) => self
                .ctx
                .iter()
                .rev()
                .find(|(n, _)| n == name)
                .map(|(_, f)| f.clone())
                .ok_or_else(|| KernelError::UnboundHyp { name: name.clone(), at: self.here() }),
            ProofTerm::Lam(x, ann, body) => {
                let ann = self.norm(ann)?;
                let concl = self.bind(0, x, ann.clone(), body)?;
                Ok(Formula::imp(ann, concl))
            }
            ProofTerm::App(f, a) => {
                let ft = self.child(0, f)?;
                let at = self.child(1, a)?;
                match ft {
                    Formula::Imp(dom, cod) if *dom == at => Ok(*cod),
                    Formula::Imp(dom, _) => Err(self.mismatch(format!("argument proves {at}, expected {dom}"))),
                    other => Err(self.mismatch(format!("applied proof of {other}, which is not an implication"))),
                }
            }
            ProofTerm::Pair(a, b) => Ok(Formula::and(self.child(0, a)?, self.child(1, b)?)),
            ProofTerm::Fst(q) | ProofTerm::Snd(q) => match self.child(0, q)? {
                Formula::And(l, r) => Ok(if matches!(p, ProofTerm::Fst(_)) { *l } else { *r }),
                other => Err(self.mismatch(format!("projection from {other}, which is not a conjunction"))),
            },
            ProofTerm::Inl(q, right) => {
                let left = self.child(0, q)?;
                Ok(Formula::or(left, self.norm(right)?))
            }
            ProofTerm::Inr(q, left) => {
                let right = self.child(0, q)?;
                Ok(Formula::or(self.norm(left)?, right))
            }
            ProofTerm::Case { scrut, left, left_body, right, right_body } => match self.child(0, scrut)? {
                Formula::Or(l, r) => {
                    let c1 = self.bind(1, left, *l, left_body)?;
                    let c2 = self.bind(2, right, *r, right_body)?;
                    if c1 == c2 {
                        Ok(c1)
                    } else {
                        Err(self.mismatch(format!("case branches prove {c1} and {c2}")))
                    }
                }
                other => Err(self.mismatch(format!("case analysis on {other}, which is not a disjunction"))),
            },
            ProofTerm::ExFalso(q, goal) => match self.child(0, q)? {
                Formula::Bot => self.norm(goal),
                other => Err(self.mismatch(format!("ex falso from {other}, expected ⊥"))),
            },
            ProofTerm::TT => Ok(Formula::Top),
            ProofTerm::Inst(uri, subst) => {
                let statement = match self.env.get(uri) {
                    Some(e) => e.statement().ok_or_else(|| KernelError::NotAConstant(uri.clone()))?,
                    None => return Err(KernelError::DanglingRef(uri.clone())),
                };
                if !subst.keys().cloned().eq(statement.atoms()) {
                    return Err(KernelError::BadSubst { uri: uri.clone(), at: self.here() });
                }
                let mut normalized = subst.clone();
                for v in normalized.values_mut() {
                    *v = self.norm(v)?;
                }
                Ok(statement.subst(&normalized))
            }
            ProofTerm::Hole(_) => Err(KernelError::Incomplete { at: self.here() }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{LibUri, ModuleId, Subst};

    fn a(n: &str) -> Formula {
        Formula::atom(n)
    }

    fn env_with_d(body: Formula) -> (Environment, LibUri) {
        let mut env = Environment::new();
        let d: LibUri = "lib://shared/l#d".parse().unwrap();
        env.insert(d.clone(), Entry::Definition { body }).unwrap();
        env.import(ModuleId::new("shared", "l"));
        (env, d)
    }

    #[test]
    fn normalize_atom_is_identity() {
        assert_eq!(unfold_normalize(&a("a"), &Environment::new()).unwrap(), a("a"));
    }

    #[test]
    fn normalize_unfolds_single_ref() {
        let (env, d) = env_with_d(Formula::and(a("a"), a("b")));
        assert_eq!(unfold_normalize(&Formula::Ref(d), &env).unwrap(), Formula::and(a("a"), a("b")));
    }

    #[test]
    fn normalize_is_idempotent() {
        let (env, d) = env_with_d(Formula::Top);
        let f = Formula::imp(Formula::Ref(d.clone()), Formula::Ref(d));
        let once = unfold_normalize(&f, &env).unwrap();
        assert_eq!(once, Formula::imp(Formula::Top, Formula::Top));
        assert_eq!(unfold_normalize(&once, &env).unwrap(), once);
    }

    #[test]
    fn normalize_dangling_is_error() {
        let f = Formula::Ref("lib://shared/l#nope".parse().unwrap());
        assert!(matches!(unfold_normalize(&f, &Environment::new()), Err(KernelError::DanglingRef(_))));
    }

    #[test]
    fn infer_identity() {
        let p = ProofTerm::lam("x", a("a"), ProofTerm::hyp("x"));
        assert_eq!(infer(&p, &IndexMap::new(), &Environment::new()).unwrap(), Formula::imp(a("a"), a("a")));
    }

    #[test]
    fn infer_swap() {
        let p = ProofTerm::lam(
            "p",
            Formula::and(a("a"), a("b")),
            ProofTerm::pair(ProofTerm::snd(ProofTerm::hyp("p")), ProofTerm::fst(ProofTerm::hyp("p"))),
        );
        let f = infer(&p, &IndexMap::new(), &Environment::new()).unwrap();
        assert_eq!(f, Formula::imp(Formula::and(a("a"), a("b")), Formula::and(a("b"), a("a"))));
    }

    #[test]
    fn infer_rejects_non_implication_application() {
        let hyps: IndexMap<_, _> = [("x".to_string(), a("a"))].into_iter().collect();
        let p = ProofTerm::app(ProofTerm::hyp("x"), ProofTerm::hyp("x"));
        let err = infer(&p, &hyps, &Environment::new()).unwrap_err();
        assert!(matches!(err, KernelError::RuleMismatch { ref at, .. } if at.0.is_empty()), "{err:?}");
    }

    #[test]
    fn infer_reports_position_and_unbound() {
        let p = ProofTerm::lam("x", a("a"), ProofTerm::pair(ProofTerm::hyp("x"), ProofTerm::hyp("y")));
        match infer(&p, &IndexMap::new(), &Environment::new()) {
            Err(KernelError::UnboundHyp { name, at }) => {
                assert_eq!(name, "y");
                assert_eq!(at.0, vec![0, 1]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn check_accepts_and_rejects() {
        let env = Environment::new();
        let id = ProofTerm::lam("x", a("a"), ProofTerm::hyp("x"));
        assert!(check(&id, &Formula::imp(a("a"), a("a")), &env).is_ok());
        assert!(check(&ProofTerm::TT, &Formula::Bot, &env).is_err());
    }

    #[test]
    fn check_modulo_unfolding() {
        let (env, d) = env_with_d(Formula::Top);
        let p = ProofTerm::lam("x", Formula::Ref(d.clone()), ProofTerm::TT);
        assert!(check(&p, &Formula::imp(Formula::Ref(d), Formula::Top), &env).is_ok());
    }

    #[test]
    fn case_and_exfalso() {
        // a ∨ ⊥ → a
        let p = ProofTerm::lam(
            "h",
            Formula::or(a("a"), Formula::Bot),
            ProofTerm::Case {
                scrut: Box::new(ProofTerm::hyp("h")),
                left: "l".into(),
                left_body: Box::new(ProofTerm::hyp("l")),
                right: "r".into(),
                right_body: Box::new(ProofTerm::ExFalso(Box::new(ProofTerm::hyp("r")), a("a"))),
            },
        );
        assert!(check(&p, &Formula::imp(Formula::or(a("a"), Formula::Bot), a("a")), &Environment::new()).is_ok());
    }

    #[test]
    fn inst_requires_exact_subst() {
        let mut env = Environment::new();
        let k: LibUri = "lib://shared/l#k".parse().unwrap();
        env.insert(k.clone(), Entry::Axiom { statement: Formula::imp(a("X"), a("X")) }).unwrap();
        let good: Subst = [("X".to_string(), a("p"))].into_iter().collect();
        assert!(check(&ProofTerm::Inst(k.clone(), good), &Formula::imp(a("p"), a("p")), &env).is_ok());
        let extra: Subst = [("X".to_string(), a("p")), ("Y".to_string(), a("q"))].into_iter().collect();
        assert!(matches!(
            check(&ProofTerm::Inst(k, extra), &Formula::imp(a("p"), a("p")), &env),
            Err(KernelError::BadSubst { .. })
        ));
    }

    #[test]
    fn holes_are_rejected() {
        assert!(matches!(
            check(&ProofTerm::Hole(0), &Formula::Top, &Environment::new()),
            Err(KernelError::Incomplete { .. })
        ));
    }
}
