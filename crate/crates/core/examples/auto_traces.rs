//! Automation records which lemmas it used; replaying that trace is
//! cheaper than the original search.

use webprover::daemon::compile_library;
use webprover::executor::{Mode, ProverStatus, Session};
use webprover::kernel::{check, Environment};
use webprover::tactics::{auto_search, replay, DEFAULT_BUDGET};

const LIBRARY: &str = include_str!("../tests/data/bench_library.ma");
const SCRIPT: &str = include_str!("../tests/data/bench_script.ma");

fn main() {
    let (env, errors) = compile_library(&[("classical.ma".into(), LIBRARY.into())]);
    assert!(errors.is_empty(), "{errors:?}");
    let mut s = Session::new("demo", ProverStatus::new("alice", "demo", env.clone()));
    let r = s.execute("theorem t : ¬¬p → p.", Mode::All);
    assert!(r.error.is_none());
    let goal = r.goals[0].clone();
    println!("goal: {goal}");

    let found = auto_search(&goal, &env, 4, None, DEFAULT_BUDGET).expect("provable");
    let lemmas: Vec<String> = found.trace.lemmas.iter().map(|u| u.to_string()).collect();
    println!("search: {} nodes, trace depth {}, lemmas {lemmas:?}", found.stats.nodes, found.trace.depth);
    println!("kernel: {:?}", check(&found.proof, &goal.concl, &env));
    let again = replay(&goal, &env, &found.trace, DEFAULT_BUDGET).expect("replayable");
    println!("replay: {} nodes", again.stats.nodes);

    // In a script the trace is written back as markup inside the statement,
    // and a rerun of the enriched text follows it.
    let (enriched, first) = run(&env, SCRIPT);
    let (_, second) = run(&env, &enriched);
    println!();
    for (i, (a, b)) in first.iter().zip(&second).enumerate() {
        println!("b{:02}: {a:5} nodes, replayed in {b}", i + 1);
    }
    let line = enriched.lines().find(|l| l.starts_with("auto")).unwrap_or_default();
    println!("enriched step: {line}");

    // Without the library, a classical goal is out of reach.
    match auto_search(&goal, &Environment::new(), 4, None, DEFAULT_BUDGET) {
        Ok(_) => println!("\nwithout lemmas: found"),
        Err(f) => println!("\nwithout lemmas: no proof after {} nodes", f.stats.nodes),
    }
}

fn run(env: &Environment, text: &str) -> (String, Vec<u64>) {
    let mut s = Session::new("demo", ProverStatus::new("alice", "demo", env.clone()));
    let r = s.execute(text, Mode::All);
    assert!(r.error.is_none(), "{:?}", r.error);
    let nodes = s.history().iter().filter_map(|h| h.stats).map(|st| st.nodes).collect();
    (r.statements.iter().map(|st| st.text.as_str()).collect(), nodes)
}
