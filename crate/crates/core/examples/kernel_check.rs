//! Builds proof terms by hand and checks them against their statements.

use webprover::kernel::{check, Entry, Environment, Formula, LibUri, ModuleId, ProofTerm};
use webprover::script::render_formula;

fn main() {
    let (a, b) = (Formula::atom("a"), Formula::atom("b"));

    // a ∧ b → b ∧ a
    let swap = Formula::imp(Formula::and(a.clone(), b.clone()), Formula::and(b.clone(), a.clone()));
    let proof = ProofTerm::lam(
        "H",
        Formula::and(a.clone(), b.clone()),
        ProofTerm::pair(ProofTerm::snd(ProofTerm::hyp("H")), ProofTerm::fst(ProofTerm::hyp("H"))),
    );
    println!("{}: {:?}", render_formula(&swap), check(&proof, &swap, &Environment::new()));

    // The same term does not prove a ∧ b → a ∧ b.
    let same = Formula::imp(Formula::and(a.clone(), b.clone()), Formula::and(a.clone(), b.clone()));
    println!("wrong statement: {:?}", check(&proof, &same, &Environment::new()));

    // Definitions unfold during checking.
    let mut env = Environment::new();
    env.import(ModuleId::new("shared", "defs"));
    let d = LibUri::lib("shared", "defs", "d").unwrap();
    env.insert(d.clone(), Entry::Definition { body: Formula::and(a.clone(), b.clone()) }).unwrap();
    let unfolded = Formula::imp(Formula::Ref(d), Formula::and(b, a.clone()));
    println!("through a definition: {:?}", check(&proof, &unfolded, &env));

    // ¬¬(a ∨ ¬a)
    let lem = Formula::or(a.clone(), Formula::not(a.clone()));
    let k = ProofTerm::lam(
        "K",
        Formula::not(lem.clone()),
        ProofTerm::app(
            ProofTerm::hyp("K"),
            ProofTerm::Inr(
                Box::new(ProofTerm::lam(
                    "x",
                    a.clone(),
                    ProofTerm::app(ProofTerm::hyp("K"), ProofTerm::Inl(Box::new(ProofTerm::hyp("x")), Formula::not(a.clone()))),
                )),
                a,
            ),
        ),
    );
    println!("double-negated excluded middle: {:?}", check(&k, &Formula::not(Formula::not(lem)), &Environment::new()));
}
