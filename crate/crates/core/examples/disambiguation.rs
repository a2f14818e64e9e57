//! Overloaded names: the executor asks, the answer becomes a hyperlink,
//! and a rerun of the enriched script asks nothing.

use webprover::daemon::compile_library;
use webprover::executor::{Mode, ProverStatus, Session};
use webprover::kernel::Environment;

const LIBRARY: [(&str, &str); 2] = [
    ("logic.ma", "axiom conj_comm : X ∧ Y → Y ∧ X.\naxiom idem : X ∧ X → X.\n"),
    ("alt.ma", "axiom conj_comm : X → X ∨ Y.\naxiom idem : X ∧ X → X.\n"),
];

fn session(env: &Environment) -> Session {
    Session::new("demo", ProverStatus::new("alice", "scratch", env.clone()))
}

/// Runs `script` to the end, always taking the first candidate offered.
fn run(env: &Environment, script: &str) -> String {
    let mut s = session(env);
    let mut text = script.to_string();
    let mut enriched = String::new();
    loop {
        let r = s.execute(&text, Mode::All);
        for st in &r.statements {
            enriched.push_str(&st.text);
        }
        if let Some(e) = r.error {
            panic!("{e}");
        }
        let rest: Vec<char> = text.chars().skip(r.consumed).collect();
        let Some(c) = r.choices else {
            enriched.extend(rest);
            return enriched;
        };
        println!("`{}` at {} is ambiguous:", c.lexeme, c.span);
        for cand in &c.candidates {
            println!("  {} ({})", cand.referent, cand.kind.name());
        }
        let (start, end) = (c.span.start - r.consumed, c.span.end - r.consumed);
        let lexeme: String = rest[start..end].iter().collect();
        let before: String = rest[..start].iter().collect();
        let after: String = rest[end..].iter().collect();
        text = format!("{before}<A href=\"{}\">{lexeme}</A>{after}", c.candidates[0].referent);
    }
}

fn main() {
    let files: Vec<(String, String)> = LIBRARY.iter().map(|(p, t)| (p.to_string(), t.to_string())).collect();
    let (env, errors) = compile_library(&files);
    assert!(errors.is_empty(), "{errors:?}");

    // Only one reading of conj_comm applies to `b ∧ a`, so no question is asked.
    let filtered = run(&env, "theorem t : a ∧ b → b ∧ a.\nintro H.\napply conj_comm.\nexact H.\nqed.\n");
    println!("resolved by the goal:\n{filtered}");

    // Both readings of idem apply, so the user is asked.
    let script = "theorem u : (a ∨ b) ∧ (a ∨ b) → a ∨ b.\nintro H.\napply idem.\nexact H.\nqed.\n";
    let enriched = run(&env, script);
    println!("\nenriched:\n{enriched}");

    let mut again = session(&env);
    let r = again.execute(&enriched, Mode::All);
    println!("rerun: error {:?}, choices {:?}", r.error, r.choices.map(|c| c.lexeme));
}
