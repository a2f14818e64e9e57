#![allow(dead_code)]

pub mod oracle;

use std::collections::HashMap;

use quick_xml::events::Event;
use quick_xml::{Reader, XmlVersion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use webprover::daemon::compile_library;
use webprover::enricher::strip;
use webprover::executor::{ExecResult, ProverStatus, Session};
use webprover::kernel::{Environment, Formula};

use oracle::Prop;

pub fn to_formula(p: &Prop) -> Formula {
    match p {
        Prop::Var(i) => Formula::atom(&Prop::var_name(*i)),
        Prop::Bot => Formula::Bot,
        Prop::Top => Formula::Top,
        Prop::Imp(a, b) => Formula::imp(to_formula(a), to_formula(b)),
        Prop::And(a, b) => Formula::and(to_formula(a), to_formula(b)),
        Prop::Or(a, b) => Formula::or(to_formula(a), to_formula(b)),
    }
}

/// A formula of exactly `size` nodes over the atoms a, b, c, biased
/// towards implication.
pub fn random_prop(rng: &mut impl Rng, size: usize) -> Prop {
    if size <= 2 {
        return match rng.random_range(0..10) {
            0 => Prop::Bot,
            1 => Prop::Top,
            _ => Prop::Var(rng.random_range(0..3)),
        };
    }
    let left = rng.random_range(1..size - 1);
    let (a, b) = (random_prop(rng, left), random_prop(rng, size - 1 - left));
    match rng.random_range(0..5) {
        0 | 1 => oracle::imp(a, b),
        2 | 3 => oracle::and(a, b),
        _ => oracle::or(a, b),
    }
}

/// Sizes 1 through `max`, with even sizes rounded down since a binary
/// tree always has odd size.
pub fn random_props(seed: u64, count: usize, max: usize) -> Vec<Prop> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let size = rng.random_range(1..=max) | 1;
            random_prop(&mut rng, size.min(max))
        })
        .collect()
}

/// Shared modules of the corpus: `conj_comm`, `idem` and `d` exist in both.
pub fn corpus_library() -> Vec<(String, String)> {
    let logic = "\
(* Core lemmas *)
axiom conj_comm : X ∧ Y → Y ∧ X.
axiom idem : X ∧ X → X.
axiom dne : ¬¬X → X.
definition d := p ∨ q.
";
    let alt = "\
axiom conj_comm : X → X ∨ Y.
axiom idem : X ∧ X → X.
definition d := p ∧ q.
";
    vec![("logic.ma".into(), logic.into()), ("alt.ma".into(), alt.into())]
}

pub fn corpus_env() -> Environment {
    let (env, errors) = compile_library(&corpus_library());
    assert!(errors.is_empty(), "{errors:?}");
    env
}

pub fn fresh_session(env: &Environment) -> Session {
    Session::new("s1", ProverStatus::new("alice", "scratch", env.clone()))
}

const OVERLOAD: &str = "notation infixr \"&\" for and priority 30.\nnotation infixr \"&\" for or priority 30.\n";

fn block(rng: &mut ChaCha8Rng, i: usize, amp: bool) -> String {
    let choices = if amp { 11 } else { 9 };
    match rng.random_range(0..choices) {
        0 => format!("theorem t{i} : b ∧ a → a ∧ b.\nintro H.\napply conj_comm.\nexact H.\nqed.\n"),
        1 => format!("theorem t{i} : (a ∨ b) ∧ (a ∨ b) → a ∨ b.\nintro H.\napply idem.\nexact H.\nqed.\n"),
        2 => format!("theorem t{i} : d → d.\n  intro H. exact H.\nqed.\n"),
        3 => format!("theorem t{i} : a ∨ b → b ∨ a.\nintro H.\nelim H.\nright.\nexact H1.\nleft.\nexact H1.\nqed.\n"),
        4 => format!("theorem t{i} : (a ∨ b) ∧ (a ∨ b) → a ∨ b.\nauto using idem depth 2.\nqed.\n"),
        5 => format!("theorem t{i} : (a → b ∧ c) → a → b ∧ c.\nintro conj_comm.\nintro H.\napply conj_comm.\nexact H.\nqed.\n"),
        6 => format!("definition e{i} := a ∧ b.\ntheorem t{i} : e{i} → b ∧ a.\nauto depth 1.\nqed.\n"),
        7 => format!("(* <b>note</b> {i} *)\ntheorem t{i} : ¬¬(a ∨ ¬a).\nauto depth 2.\nqed.\n"),
        8 => format!("axiom x{i} : c ∧ (c → e ∧ c).\ntheorem t{i} : e ∧ c.\nelim x{i}.\napply H2. exact H1.\nqed.\n"),
        9 => format!("theorem t{i} : a & b → b & a.\nauto depth 1.\nqed.\n"),
        _ => format!("theorem t{i} : (a & b) & c -> a & (b & c).\nauto depth 1.\nqed.\n"),
    }
}

/// Scripts that overload identifiers through the two shared modules and,
/// in about half of them, the symbol `&`.
pub fn corpus(seed: u64, count: usize) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let amp = rng.random_bool(0.5);
            let mut s = if amp { OVERLOAD.to_string() } else { String::new() };
            for i in 0..rng.random_range(3..=7) {
                s.push_str(&block(&mut rng, i, amp));
            }
            s
        })
        .collect()
}

/// Drops trace regions with their content, then all remaining tags.
pub fn erase(text: &str) -> Result<String, String> {
    let mut rest = text;
    let mut out = String::new();
    while let Some(i) = rest.find("<T>") {
        out.push_str(&rest[..i]);
        let end = rest[i..].find("</T>").ok_or("unclosed trace")?;
        rest = &rest[i + end + 4..];
    }
    out.push_str(rest);
    strip(&out).map_err(|e| e.to_string())
}

/// Checks that the returned statements tile the consumed prefix of `text`.
pub fn check_tiling(text: &str, r: &ExecResult) -> Result<(), String> {
    let chars: Vec<char> = text.chars().collect();
    let mut at = 0;
    let mut joined = String::new();
    for s in &r.statements {
        if s.original.start != at {
            return Err(format!("statement starts at {} instead of {at}", s.original.start));
        }
        let slice: String = chars[s.original.start..s.original.end].iter().collect();
        if erase(&s.text)? != erase(&slice)? {
            return Err(format!("enriched {:?} does not strip to {slice:?}", s.text));
        }
        joined.push_str(&slice);
        at = s.original.end;
    }
    if at != r.consumed {
        return Err(format!("statements end at {at}, consumed is {}", r.consumed));
    }
    let prefix: String = chars[..r.consumed].iter().collect();
    if joined != prefix {
        return Err("spans do not reproduce the consumed prefix".into());
    }
    Ok(())
}

/// Picks one candidate per lexeme and sticks to it, so that repeated
/// occurrences in one script are read the same way.
pub struct Chooser {
    rng: ChaCha8Rng,
    memo: HashMap<String, String>,
}

impl Chooser {
    pub fn new(seed: u64) -> Chooser {
        Chooser { rng: ChaCha8Rng::seed_from_u64(seed), memo: HashMap::new() }
    }

    pub fn forget(&mut self) {
        self.memo.clear();
    }

    pub fn pick(&mut self, lexeme: &str, uris: &[String]) -> String {
        if let Some(u) = self.memo.get(lexeme).filter(|u| uris.contains(u)) {
            return u.clone();
        }
        let u = uris[self.rng.random_range(0..uris.len())].clone();
        self.memo.insert(lexeme.to_string(), u.clone());
        u
    }
}

/// Wraps the scalars `start..end` of `text` in a hyperlink.
pub fn insert_link(text: &str, start: usize, end: usize, uri: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out: String = chars[..start].iter().collect();
    out.push_str(&format!("<A href=\"{uri}\">"));
    out.extend(&chars[start..end]);
    out.push_str("</A>");
    out.extend(&chars[end..]);
    out
}

pub fn skip_chars(text: &str, n: usize) -> String {
    text.chars().skip(n).collect()
}

/// The outcome of running a script to completion while answering every
/// choice request.
pub struct Resolved {
    pub enriched: String,
    pub choices: usize,
    pub calls: usize,
}

pub fn run_resolving(session: &mut Session, script: &str, chooser: &mut Chooser) -> Result<Resolved, String> {
    let mut text = script.to_string();
    let mut out = Resolved { enriched: String::new(), choices: 0, calls: 0 };
    loop {
        let r = session.execute(&text, webprover::executor::Mode::All);
        out.calls += 1;
        check_tiling(&text, &r)?;
        for s in &r.statements {
            out.enriched.push_str(&s.text);
        }
        if let Some(e) = r.error {
            return Err(format!("{e} in {text:?}"));
        }
        let rest = skip_chars(&text, r.consumed);
        match r.choices {
            Some(c) => {
                out.choices += 1;
                let uris: Vec<String> = c.candidates.iter().map(|c| c.referent.to_string()).collect();
                let uri = chooser.pick(&c.lexeme, &uris);
                let (start, end) = (c.span.start - r.consumed, c.span.end - r.consumed);
                text = insert_link(&rest, start, end, &uri);
            }
            None => {
                out.enriched.push_str(&rest);
                return Ok(out);
            }
        }
    }
}

/// The parts of a `<response>` the tests look at.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct XmlResponse {
    pub executed_chars: Option<usize>,
    /// `(chars, text)` per `<statement>`.
    pub statements: Vec<(usize, String)>,
    pub goals: Option<usize>,
    /// `(code, offset)`.
    pub error: Option<(String, Option<usize>)>,
    /// `(lexeme, offset, length, uris)`.
    pub choices: Option<(String, usize, usize, Vec<String>)>,
    pub texts: HashMap<String, String>,
    pub attrs: HashMap<String, HashMap<String, String>>,
}

pub fn parse_response(body: &str) -> XmlResponse {
    let mut reader = Reader::from_str(body);
    let mut out = XmlResponse::default();
    let mut current: Vec<String> = Vec::new();
    let mut text = String::new();
    loop {
        let ev = reader.read_event().expect("well-formed response");
        match &ev {
            Event::Start(e) | Event::Empty(e) => {
                let name = e.name().as_ref().to_string();
                let attrs: HashMap<String, String> = e
                    .attributes()
                    .map(|a| {
                        let a = a.unwrap();
                        (
                            a.key.as_ref().to_string(),
                            a.normalized_value(XmlVersion::Explicit1_0).unwrap().into_owned(),
                        )
                    })
                    .collect();
                let num = |k: &str| attrs.get(k).map(|v| v.parse::<usize>().unwrap());
                match name.as_str() {
                    "executed" => out.executed_chars = num("chars"),
                    "goals" => out.goals = num("count"),
                    "error" => out.error = Some((attrs["code"].clone(), num("offset"))),
                    "choices" => {
                        out.choices =
                            Some((attrs["lexeme"].clone(), num("offset").unwrap(), num("length").unwrap(), Vec::new()))
                    }
                    "candidate" => out.choices.as_mut().unwrap().3.push(attrs["uri"].clone()),
                    "statement" => out.statements.push((num("chars").unwrap(), String::new())),
                    _ => {}
                }
                out.attrs.insert(name.clone(), attrs);
                if matches!(ev, Event::Start(_)) {
                    current.push(name);
                    text.clear();
                }
            }
            Event::Text(t) => text.push_str(&t.borrow().into_inner()),
            Event::GeneralRef(r) => {
                let name = r.borrow().into_inner();
                text.push_str(match name.as_ref() {
                    "lt" => "<",
                    "gt" => ">",
                    "amp" => "&",
                    "quot" => "\"",
                    "apos" => "'",
                    other => panic!("unexpected entity {other}"),
                });
            }
            Event::CData(c) => text.push_str(&c.borrow().into_inner()),
            Event::End(_) => {
                let name = current.pop().unwrap();
                if name == "statement" {
                    out.statements.last_mut().unwrap().1 = text.clone();
                }
                out.texts.insert(name, text.clone());
            }
            Event::Eof => break,
            _ => {}
        }
    }
    out
}

pub fn login(d: &webprover::daemon::Daemon, user: &str) -> String {
    let r = d.handle("POST", "/matita/register", format!("user={user}&password=password1").as_bytes());
    assert_eq!(r.status, 200, "{}", r.body);
    let r = d.handle("POST", "/matita/login", format!("user={user}&password=password1").as_bytes());
    assert_eq!(r.status, 200, "{}", r.body);
    parse_response(&r.body).texts["token"].clone()
}

pub fn new_session(d: &webprover::daemon::Daemon, token: &str) -> String {
    let r = d.handle("POST", &format!("/matita/session/new?token={token}"), b"");
    assert_eq!(r.status, 200, "{}", r.body);
    parse_response(&r.body).attrs["session"]["id"].clone()
}
