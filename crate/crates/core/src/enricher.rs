//! Mechanical markup: hyperlinks for resolved leaves and trace wrappers for
//! automation steps.

use crate::disambig::Resolution;
use crate::script::{LinkTable, Span, SyntaxError, Token};
use crate::tactics::AutoTrace;

/// A statement as returned to the client.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnrichedStatement {
    pub text: String,
    /// The statement's extent in the submitted text.
    pub original: Span,
}

impl EnrichedStatement {
    /// Length of `text` in Unicode scalars.
    pub fn enriched_len(&self) -> usize {
        self.text.chars().count()
    }
}

/// Token spans are relative to the start of `raw`. `auto` is the index of
/// the `auto` keyword when a fresh trace is to be inserted after it.
pub fn enrich(
    raw: &str,
    tokens: &[Token],
    links: &LinkTable,
    res: &Resolution,
    trace: Option<(usize, &AutoTrace)>,
) -> String {
    let mut inserts: Vec<(usize, String)> = Vec::new();
    for (&index, uri) in res {
        if links.get(&index) == Some(uri) {
            continue;
        }
        let span = tokens[index].span;
        inserts.push((span.start, format!("<A href=\"{uri}\">")));
        inserts.push((span.end, "</A>".to_string()));
    }
    if let Some((index, trace)) = trace {
        let mut t = String::from("<T>");
        if !trace.lemmas.is_empty() {
            let links: Vec<String> =
                trace.lemmas.iter().map(|u| format!("<A href=\"{u}\">{}</A>", u.short_name())).collect();
            t.push_str(" using ");
            t.push_str(&links.join(", "));
        }
        t.push_str(&format!(" depth {}</T>", trace.depth));
        inserts.push((tokens[index].span.end, t));
    }
    // Stable sort keeps a closing tag ahead of an opening tag at the same offset.
    inserts.sort_by_key(|(at, _)| *at);
    let mut chars: Vec<char> = raw.chars().collect();
    for (at, text) in inserts.into_iter().rev() {
        chars.splice(at..at, text.chars());
    }
    chars.into_iter().collect()
}

/// Removes hyperlink and trace tags, keeping their content. Comments and
/// string literals are left alone.
pub fn strip(text: &str) -> Result<String, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut open: Vec<(char, usize)> = Vec::new();
    let mut i = 0;
    let starts = |i: usize, s: &str| s.chars().enumerate().all(|(k, c)| chars.get(i + k) == Some(&c));
    while i < chars.len() {
        if starts(i, "(*") {
            let mut depth = 0;
            let from = i;
            loop {
                if i >= chars.len() {
                    return Err(SyntaxError::new("unterminated comment", Span::new(from, i)));
                }
                if starts(i, "(*") {
                    depth += 1;
                    i += 2;
                } else if starts(i, "*)") {
                    depth -= 1;
                    i += 2;
                    if depth == 0 {
                        break;
                    }
                } else {
                    i += 1;
                }
            }
            out.extend(&chars[from..i]);
        } else if chars[i] == '"' {
            let from = i;
            i += 1;
            while i < chars.len() && chars[i] != '"' {
                i += 1;
            }
            i = (i + 1).min(chars.len());
            out.extend(&chars[from..i]);
        } else if starts(i, "<A ") || starts(i, "<T>") {
            let end = (i..chars.len())
                .find(|&k| chars[k] == '>')
                .ok_or_else(|| SyntaxError::new("unterminated tag", Span::new(i, chars.len())))?;
            open.push((chars[i + 1], i));
            i = end + 1;
        } else if starts(i, "</A>") || starts(i, "</T>") {
            match open.pop() {
                Some((tag, _)) if tag == chars[i + 2] => i += 4,
                _ => return Err(SyntaxError::new("unbalanced closing tag", Span::new(i, i + 4))),
            }
        } else {
            out.push(chars[i]);
            i += 1;
        }
    }
    match open.pop() {
        Some((_, at)) => Err(SyntaxError::new("unclosed tag", Span::new(at, at + 1))),
        None => Ok(out),
    }
}
