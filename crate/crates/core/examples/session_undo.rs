//! Step-by-step execution, errors located in the submitted text, and undo.

use webprover::executor::{Mode, ProverStatus, Session};
use webprover::kernel::Environment;

fn main() {
    let mut s = Session::new("demo", ProverStatus::new("alice", "scratch", Environment::new()));
    let initial = s.status().clone();
    let mut rest = String::from("theorem t : a ∨ b → b ∨ a.\nintro H.\nelim H.\nright.\nexact H1.\nleft.\nexact H1.\nqed.\n");

    loop {
        let r = s.execute(&rest, Mode::One);
        let Some(st) = r.statements.first() else { break };
        println!("ran {:?}; {} goal(s) open", st.text.trim(), r.goals.len());
        if let Some(g) = r.goals.first() {
            println!("    {}", g.to_string().replace('\n', "\n    "));
        }
        rest = rest.chars().skip(r.consumed).collect();
    }

    let (left, goals) = s.undo(Some(3));
    println!("\nundo 3: {left} steps left, {} goal(s)", goals.len());
    let r = s.execute("exact H.", Mode::All);
    if let Some(e) = r.error {
        println!("error: {e}");
    }
    let (left, _) = s.undo(None);
    println!("undo all: {left} steps left, restored: {}", *s.status() == initial);
}
