//! Two users edit copies of the shared library and synchronize through
//! commit and update.

use webprover::libstore::{CommitOutcome, Store};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let store = Store::open(dir.path())?;
    store.import(&[("logic.ma", "axiom conj_comm : X ∧ Y → Y ∧ X.\n")])?;
    for user in ["alice", "bob"] {
        store.register(user, "password1")?;
    }
    println!("head r{}", store.head()?);

    store.save("alice", "logic.ma", "axiom conj_comm : X ∧ Y → Y ∧ X.\naxiom idem : X ∧ X → X.\n")?;
    store.save("alice", "notes.ma", "(* scratch *)\n")?;
    match store.commit("alice", Some(&["logic.ma"]))? {
        CommitOutcome::Committed { revision, changed } => println!("alice committed {changed:?} as r{revision}"),
        other => println!("alice: {other:?}"),
    }

    // Bob edited the same file from the old base.
    store.save("bob", "logic.ma", "axiom conj_comm : X ∧ Y → Y ∧ X.\naxiom dne : ¬¬X → X.\n")?;
    println!("bob commit: {:?}", store.commit("bob", None)?);
    let up = store.update("bob")?;
    println!("bob update to r{}: updated {:?}, conflicts {:?}", up.revision, up.updated, up.conflicts);

    // His text is kept; other files still commit on their own.
    println!("bob keeps: {:?}", store.read("bob", "logic.ma")?.lines().last());
    store.save("bob", "bob.ma", "axiom dne : ¬¬X → X.\n")?;
    println!("bob commit bob.ma: {:?}", store.commit("bob", Some(&["bob.ma"]))?);

    for c in store.history()? {
        println!("r{} by {}: {:?}", c.revision, c.user, c.paths);
    }
    for e in store.ls("alice", "")? {
        println!("alice sees {e:?}");
    }
    Ok(())
}
