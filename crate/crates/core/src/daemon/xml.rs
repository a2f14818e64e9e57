use quick_xml::events::{BytesCData, BytesDecl, BytesEnd, BytesStart, BytesText, Event};
use quick_xml::Writer;

use crate::disambig::ChoiceRequest;
use crate::executor::{ExecError, ExecResult};
use crate::tactics::Goal;

/// Builder for one `<response>` document.
pub(crate) struct Xml {
    w: Writer<Vec<u8>>,
}

// Writing into a Vec cannot fail.
const INFALLIBLE: &str = "in-memory write";

impl Xml {
    pub(crate) fn new() -> Xml {
        let mut w = Writer::new(Vec::new());
        w.write_event(Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None))).expect(INFALLIBLE);
        w.write_event(Event::Start(BytesStart::new("response"))).expect(INFALLIBLE);
        Xml { w }
    }

    fn tag<'a>(name: &'a str, attrs: &[(&'a str, &'a str)]) -> BytesStart<'a> {
        BytesStart::new(name).with_attributes(attrs.iter().copied())
    }

    pub(crate) fn empty(&mut self, name: &str, attrs: &[(&str, &str)]) -> &mut Xml {
        self.w.write_event(Event::Empty(Self::tag(name, attrs))).expect(INFALLIBLE);
        self
    }

    pub(crate) fn start(&mut self, name: &str, attrs: &[(&str, &str)]) -> &mut Xml {
        self.w.write_event(Event::Start(Self::tag(name, attrs))).expect(INFALLIBLE);
        self
    }

    pub(crate) fn end(&mut self, name: &str) -> &mut Xml {
        self.w.write_event(Event::End(BytesEnd::new(name))).expect(INFALLIBLE);
        self
    }

    pub(crate) fn text(&mut self, name: &str, attrs: &[(&str, &str)], text: &str) -> &mut Xml {
        self.start(name, attrs);
        self.w.write_event(Event::Text(BytesText::new(text))).expect(INFALLIBLE);
        self.end(name)
    }

    /// `text` inside CDATA sections, split wherever it contains `]]>`.
    pub(crate) fn cdata(&mut self, name: &str, attrs: &[(&str, &str)], text: &str) -> &mut Xml {
        self.start(name, attrs);
        let mut rest = text;
        while let Some(i) = rest.find("]]>") {
            self.w.write_event(Event::CData(BytesCData::new(&rest[..i + 2]))).expect(INFALLIBLE);
            rest = &rest[i + 2..];
        }
        self.w.write_event(Event::CData(BytesCData::new(rest))).expect(INFALLIBLE);
        self.end(name)
    }

    pub(crate) fn goals(&mut self, goals: &[Goal]) -> &mut Xml {
        let count = goals.len().to_string();
        if goals.is_empty() {
            return self.empty("goals", &[("count", &count)]);
        }
        self.start("goals", &[("count", &count)]);
        for (i, g) in goals.iter().enumerate() {
            self.start("goal", &[("index", &i.to_string())]);
            for (name, h) in &g.hyps {
                self.text("hyp", &[("name", name)], &h.to_string());
            }
            self.text("concl", &[], &g.concl.to_string());
            self.end("goal");
        }
        self.end("goals")
    }

    pub(crate) fn exec_error(&mut self, e: &ExecError) -> &mut Xml {
        let (offset, length) = (e.span.start.to_string(), e.span.len().to_string());
        self.text("error", &[("code", e.code.name()), ("offset", &offset), ("length", &length)], &e.message)
    }

    pub(crate) fn choices(&mut self, c: &ChoiceRequest) -> &mut Xml {
        let (offset, length) = (c.span.start.to_string(), c.span.len().to_string());
        self.start("choices", &[("lexeme", &c.lexeme), ("offset", &offset), ("length", &length)]);
        for cand in &c.candidates {
            self.start("candidate", &[("uri", &cand.referent.to_string()), ("kind", cand.kind.name())]);
            self.text("display", &[], &cand.display);
            self.end("candidate");
        }
        self.end("choices")
    }

    pub(crate) fn exec_result(&mut self, r: &ExecResult) -> &mut Xml {
        let (chars, n) = (r.consumed.to_string(), r.statements.len().to_string());
        self.empty("executed", &[("chars", &chars), ("statements", &n)]);
        for (i, s) in r.statements.iter().enumerate() {
            let (index, len) = ((r.first_index + i).to_string(), s.original.len().to_string());
            self.cdata("statement", &[("index", &index), ("chars", &len)], &s.text);
        }
        self.goals(&r.goals);
        if let Some(e) = &r.error {
            self.exec_error(e);
        }
        if let Some(c) = &r.choices {
            self.choices(c);
        }
        self
    }

    pub(crate) fn finish(mut self) -> String {
        self.end("response");
        String::from_utf8(self.w.into_inner()).expect("utf-8 in, utf-8 out")
    }
}
