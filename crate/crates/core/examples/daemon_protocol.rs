//! Drives the daemon's request handler directly, as the HTTP server does,
//! and prints the XML it answers with.

use webprover::daemon::Daemon;
use webprover::libstore::Store;

fn between<'a>(body: &'a str, open: &str, close: &str) -> &'a str {
    let start = body.find(open).expect("present") + open.len();
    &body[start..start + body[start..].find(close).expect("closed")]
}

fn show(d: &Daemon, method: &str, target: &str, body: &str) -> String {
    let r = d.handle(method, target, body.as_bytes());
    let shown = target.split('?').next().unwrap_or(target);
    println!("{method} {shown} -> {}\n  {}\n", r.status, r.body);
    r.body
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let store = Store::open(dir.path())?;
    store.import(&[
        ("logic.ma", "axiom conj_comm : X ∧ Y → Y ∧ X.\naxiom idem : X ∧ X → X.\n"),
        ("alt.ma", "axiom idem : X ∧ X → X.\n"),
    ])?;
    let d = Daemon::new(store);

    show(&d, "POST", "/matita/register?user=alice&password=password1", "");
    let body = show(&d, "POST", "/matita/login", "user=alice&password=password1");
    let token = between(&body, "<token>", "</token>").to_string();
    let body = show(&d, "POST", &format!("/matita/session/new?token={token}"), "");
    let session = between(&body, "id=\"", "\"").to_string();
    let q = format!("token={token}&session={session}");

    show(&d, "POST", &format!("/matita/execute?{q}&mode=all"), "theorem t : b ∧ a → a ∧ b. intro H. apply conj_comm. exact H.");
    show(&d, "GET", &format!("/matita/goals?{q}"), "");
    show(&d, "POST", &format!("/matita/undo?{q}&steps=2"), "");

    // An ambiguous name stops execution and lists the candidates.
    show(&d, "POST", &format!("/matita/undo?{q}&steps=all"), "");
    let text = "theorem u : (a ∨ b) ∧ (a ∨ b) → a ∨ b. intro H. apply idem. exact H. qed.";
    show(&d, "POST", &format!("/matita/execute?{q}&mode=all"), text);
    let rest = "apply <A href=\"lib://shared/logic#idem\">idem</A>. exact H. qed.";
    show(&d, "POST", &format!("/matita/execute?{q}&mode=all"), rest);

    show(&d, "POST", &format!("/matita/save?token={token}&file=mine.ma"), "axiom mine : X → X.\n");
    show(&d, "GET", &format!("/matita/ls?token={token}"), "");
    show(&d, "POST", &format!("/matita/commit?token={token}"), "");
    show(&d, "GET", "/matita/ls?token=wrong", "");
    Ok(())
}
