//! Lexes and parses scripts, including user notation and markup.

use webprover::disambig::{elaborate, Resolution};
use webprover::executor::{Mode, ProverStatus, Session};
use webprover::kernel::Environment;
use webprover::script::{lex, parse_statement, render_formula, NotationTable, StatementKind};

fn main() {
    let table = NotationTable::default();
    for text in [
        "theorem t : a ∧ b → b ∧ a.",
        "theorem t : a /\\ b -> ~c \\/ d.",
        "(* <b>markup</b> *) theorem t : ¬¬(p ∨ ¬p).",
        "theorem t : <b>¬</b>¬p.",
        "theorem t : (a ∨ b.",
    ] {
        let parsed = lex(text, &table).and_then(|lexed| parse_statement(text, &lexed, &table, 0));
        match parsed {
            Ok((stmt, _)) => match stmt.kind {
                StatementKind::Theorem { formula, .. } => {
                    println!("{text:48} => {}", render_formula(&elaborate(&formula, &Resolution::new())))
                }
                other => println!("{text:48} => {other:?}"),
            },
            Err(e) => println!("{text:48} => error at {}: {}", e.span, e.message),
        }
    }

    // Notation declared in a script applies to the statements after it.
    let mut s = Session::new("demo", ProverStatus::new("alice", "scratch", Environment::new()));
    let script = "notation infixr \"&\" for and priority 35.\ntheorem t : a & b → b & a.\nauto.\nqed.";
    let r = s.execute(script, Mode::All);
    println!("\nexecuted {} of {} chars, error: {:?}", r.consumed, script.chars().count(), r.error);
    for st in &r.statements {
        println!("  {}", st.text.trim());
    }
}
