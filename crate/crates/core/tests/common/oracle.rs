//! A bounded G4ip sequent prover for intuitionistic propositional logic,
//! written against its own formula type so that it shares nothing with the
//! engine under test.
//!
//! Height counts rule applications on the longest branch; initial sequents
//! (identity, ⊥ on the left, ⊤ on the right) have height 0.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Prop {
    Var(u8),
    Bot,
    Top,
    Imp(Box<Prop>, Box<Prop>),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
}

use Prop::*;

pub fn imp(a: Prop, b: Prop) -> Prop {
    Imp(Box::new(a), Box::new(b))
}

pub fn and(a: Prop, b: Prop) -> Prop {
    And(Box::new(a), Box::new(b))
}

pub fn or(a: Prop, b: Prop) -> Prop {
    Or(Box::new(a), Box::new(b))
}

impl Prop {
    pub fn size(&self) -> usize {
        match self {
            Var(_) | Bot | Top => 1,
            Imp(a, b) | And(a, b) | Or(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Variable `i` is printed as the letter `a + i`.
    pub fn var_name(i: u8) -> String {
        ((b'a' + i) as char).to_string()
    }
}

/// Fully parenthesized ASCII rendering, readable by the script parser.
impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var(i) => f.write_str(&Prop::var_name(*i)),
            Bot => f.write_str("False"),
            Top => f.write_str("True"),
            Imp(a, b) => write!(f, "({a} -> {b})"),
            And(a, b) => write!(f, "({a} /\\ {b})"),
            Or(a, b) => write!(f, "({a} \\/ {b})"),
        }
    }
}

/// Whether `⊢ goal` has a G4ip derivation of height at most `height`.
pub fn provable_within(goal: &Prop, height: u32) -> bool {
    derive(&[], goal, height)
}

/// Smallest derivation height, if any derivation of height ≤ `limit` exists.
pub fn min_height(goal: &Prop, limit: u32) -> Option<u32> {
    (0..=limit).find(|&h| provable_within(goal, h))
}

/// Unbounded decision; G4ip terminates without loop checking.
pub fn provable(goal: &Prop) -> bool {
    derive(&[], goal, u32::MAX)
}

fn without(ctx: &[Prop], i: usize, add: &[Prop]) -> Vec<Prop> {
    let mut out: Vec<Prop> = ctx.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, p)| p.clone()).collect();
    out.extend(add.iter().cloned());
    out.sort();
    out
}

fn plus(ctx: &[Prop], add: &[Prop]) -> Vec<Prop> {
    let mut out = ctx.to_vec();
    out.extend(add.iter().cloned());
    out.sort();
    out
}

fn derive(ctx: &[Prop], goal: &Prop, h: u32) -> bool {
    if ctx.contains(goal) || ctx.contains(&Bot) || *goal == Top {
        return true;
    }
    if h == 0 {
        return false;
    }
    let h1 = h - 1;
    let right = match goal {
        Imp(a, b) => derive(&plus(ctx, &[(**a).clone()]), b, h1),
        And(a, b) => derive(ctx, a, h1) && derive(ctx, b, h1),
        Or(a, b) => derive(ctx, a, h1) || derive(ctx, b, h1),
        _ => false,
    };
    if right {
        return true;
    }
    for (i, p) in ctx.iter().enumerate() {
        let ok = match p {
            And(a, b) => derive(&without(ctx, i, &[(**a).clone(), (**b).clone()]), goal, h1),
            Or(a, b) => {
                derive(&without(ctx, i, &[(**a).clone()]), goal, h1)
                    && derive(&without(ctx, i, &[(**b).clone()]), goal, h1)
            }
            Top => derive(&without(ctx, i, &[]), goal, h1),
            Imp(a, d) => match &**a {
                Var(_) if ctx.contains(a) => derive(&without(ctx, i, &[(**d).clone()]), goal, h1),
                Var(_) => false,
                Top => derive(&without(ctx, i, &[(**d).clone()]), goal, h1),
                Bot => derive(&without(ctx, i, &[]), goal, h1),
                And(x, y) => derive(&without(ctx, i, &[imp((**x).clone(), imp((**y).clone(), (**d).clone()))]), goal, h1),
                Or(x, y) => derive(
                    &without(ctx, i, &[imp((**x).clone(), (**d).clone()), imp((**y).clone(), (**d).clone())]),
                    goal,
                    h1,
                ),
                Imp(x, y) => {
                    derive(&without(ctx, i, &[imp((**y).clone(), (**d).clone())]), &imp((**x).clone(), (**y).clone()), h1)
                        && derive(&without(ctx, i, &[(**d).clone()]), goal, h1)
                }
            },
            _ => false,
        };
        if ok {
            return true;
        }
    }
    false
}
