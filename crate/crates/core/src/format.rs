//! S-expression exchange format for derivations.
//!
//! ```text
//! ;; comment
//! (RArr (system ls) (ctx) (term "\x. x x") (type "(A & (A -> B)) -> B") (var "x")
//!   (LCap (ctx "x:A & (A -> B)") (term "x x") (type "B") (n 1) (var "x")
//!     ...))
//! ```
//!
//! The `system` key is only meaningful at the root; when absent the caller
//! must supply the system.

use std::fmt::Write as _;

use thiserror::Error;

use crate::derivation::{Derivation, Detail, Rule, Sequent, System};
use crate::term::parse_term_with;
use crate::types::{parse_type, SeqContext};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("unknown system `{0}`")]
    UnknownSystem(String),
    #[error("no system given in the file or by the caller")]
    MissingSystem,
    #[error("node {rule}: {message}")]
    BadField { rule: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Sexp {
    Atom(String),
    Str(String),
    List(Vec<Sexp>),
}

fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn print_derivation(d: &Derivation) -> String {
    let mut out = String::new();
    print_node(d, 0, true, &mut out);
    out.push('\n');
    out
}

fn print_node(d: &Derivation, indent: usize, root: bool, out: &mut String) {
    let pad = "  ".repeat(indent);
    let c = &d.conclusion;
    let _ = write!(out, "{pad}({}", d.rule);
    if root {
        let _ = write!(out, " (system {})", d.system);
    }
    out.push_str(" (ctx");
    for (x, t) in c.context.bindings() {
        let _ = write!(out, " {}", quote(&format!("{x}:{t}")));
    }
    out.push(')');
    let _ = write!(out, " (term {}) (type {})", quote(&c.subject.to_string()), quote(&c.ty.to_string()));
    if let Some(n) = d.detail.n {
        let _ = write!(out, " (n {n})");
    }
    if let Some(v) = &d.detail.var {
        let _ = write!(out, " (var {})", quote(v));
    }
    if let Some(y) = &d.detail.fresh {
        let _ = write!(out, " (fresh {})", quote(y));
    }
    for p in &d.premisses {
        out.push('\n');
        print_node(p, indent + 1, false, out);
    }
    out.push(')');
}

struct Reader<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn err(&self, message: impl Into<String>) -> FormatError {
        FormatError::Syntax { offset: self.pos, message: message.into() }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else if c == ';' {
                while let Some(c) = self.peek() {
                    self.pos += c.len_utf8();
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Sexp, FormatError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        Some(')') => {
                            self.pos += 1;
                            return Ok(Sexp::List(items));
                        }
                        None => return Err(self.err("unclosed list")),
                        _ => items.push(self.read()?),
                    }
                }
            }
            Some(')') => Err(self.err("unexpected `)`")),
            Some('"') => {
                self.pos += 1;
                let mut s = String::new();
                loop {
                    let Some(c) = self.peek() else { return Err(self.err("unterminated string")) };
                    self.pos += c.len_utf8();
                    match c {
                        '"' => return Ok(Sexp::Str(s)),
                        '\\' => {
                            let Some(e) = self.peek() else { return Err(self.err("unterminated string")) };
                            self.pos += e.len_utf8();
                            s.push(e);
                        }
                        c => s.push(c),
                    }
                }
            }
            Some(_) => {
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == '"' || c == ';' {
                        break;
                    }
                    self.pos += c.len_utf8();
                }
                Ok(Sexp::Atom(self.src[start..self.pos].to_string()))
            }
        }
    }
}

const KEYS: [&str; 7] = ["system", "ctx", "term", "type", "n", "var", "fresh"];

/// Parses a derivation. `system` is used when the file has no `system` key
/// and must agree with it otherwise.
pub fn parse_derivation(text: &str, system: Option<System>) -> Result<Derivation, FormatError> {
    let mut r = Reader { src: text, pos: 0 };
    let sexp = r.read()?;
    r.skip_ws();
    if r.pos != text.len() {
        return Err(r.err("trailing input after the derivation"));
    }
    let Sexp::List(items) = &sexp else {
        return Err(FormatError::Syntax { offset: 0, message: "expected a list".into() });
    };
    let mut file_system = None;
    for item in items {
        if let Sexp::List(kv) = item {
            if let [Sexp::Atom(k), Sexp::Atom(v)] = kv.as_slice() {
                if k == "system" {
                    file_system = Some(System::from_name(v).ok_or_else(|| FormatError::UnknownSystem(v.clone()))?);
                }
            }
        }
    }
    let sys = match (file_system, system) {
        (Some(a), Some(b)) if a != b => {
            return Err(FormatError::BadField {
                rule: "root".into(),
                message: format!("file declares {a} but {b} was requested"),
            })
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(FormatError::MissingSystem),
    };
    build(&sexp, sys)
}

fn build(sexp: &Sexp, system: System) -> Result<Derivation, FormatError> {
    let Sexp::List(items) = sexp else {
        return Err(FormatError::Syntax { offset: 0, message: "expected a rule node".into() });
    };
    let Some(Sexp::Atom(head)) = items.first() else {
        return Err(FormatError::Syntax { offset: 0, message: "node without a rule name".into() });
    };
    let rule = Rule::from_name(head).ok_or_else(|| FormatError::UnknownRule(head.clone()))?;
    let bad = |message: String| FormatError::BadField { rule: head.clone(), message };

    let mut context = None;
    let mut subject = None;
    let mut ty = None;
    let mut detail = Detail::default();
    let mut premisses = Vec::new();
    for item in &items[1..] {
        let Sexp::List(kv) = item else { return Err(bad("stray atom".into())) };
        let key = match kv.first() {
            Some(Sexp::Atom(k)) if KEYS.contains(&k.as_str()) => k.as_str(),
            _ => {
                premisses.push(build(item, system)?);
                continue;
            }
        };
        let strings = || -> Result<Vec<&str>, FormatError> {
            kv[1..]
                .iter()
                .map(|s| match s {
                    Sexp::Str(s) => Ok(s.as_str()),
                    Sexp::Atom(a) => Ok(a.as_str()),
                    Sexp::List(_) => Err(bad(format!("nested list under `{key}`"))),
                })
                .collect()
        };
        let single = || -> Result<&str, FormatError> {
            match strings()?.as_slice() {
                [s] => Ok(*s),
                _ => Err(bad(format!("`{key}` takes one value"))),
            }
        };
        match key {
            "system" => {}
            "ctx" => {
                let mut g = SeqContext::new();
                for b in strings()? {
                    let (x, t) = b.split_once(':').ok_or_else(|| bad(format!("binding `{b}` lacks `:`")))?;
                    let t = parse_type(t).map_err(|e| bad(format!("type in `{b}`: {e}")))?;
                    g.insert(x.trim(), t);
                }
                context = Some(g);
            }
            "term" => {
                let s = single()?;
                subject = Some(parse_term_with(s, true).map_err(|e| bad(format!("term `{s}`: {e}")))?);
            }
            "type" => {
                let s = single()?;
                ty = Some(parse_type(s).map_err(|e| bad(format!("type `{s}`: {e}")))?);
            }
            "n" => {
                let s = single()?;
                detail.n = Some(s.parse().map_err(|_| bad(format!("`n` must be a count, got `{s}`")))?);
            }
            "var" => detail.var = Some(single()?.to_string()),
            "fresh" => detail.fresh = Some(single()?.to_string()),
            _ => unreachable!(),
        }
    }
    let conclusion = Sequent {
        context: context.unwrap_or_default(),
        subject: subject.ok_or_else(|| bad("missing `term`".into()))?,
        ty: ty.ok_or_else(|| bad("missing `type`".into()))?,
    };
    Ok(Derivation { system, rule, conclusion, detail, premisses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::check_derivation;
    use crate::types::{parse_context, parse_type};

    #[test]
    fn round_trip() {
        let sys = System::Seq;
        let t = |s: &str| parse_type(s).unwrap();
        let c = |s: &str| parse_context(s).unwrap();
        let left = Derivation::ax(sys, c("x:A"), "x", t("A"));
        let right = Derivation::ax(sys, c("x:A, y:B"), "y", t("B"));
        let larr = Derivation::l_arr("x", "y", left, right);
        let lcap = Derivation::l_cap(c("x:A & (A -> B)"), "x", larr);
        let d = Derivation::arrow_intro(SeqContext::new(), "x", t("A & (A -> B)"), lcap);
        let text = print_derivation(&d);
        let back = parse_derivation(&format!(";; self application\n{text}"), None).unwrap();
        assert_eq!(back, d);
        assert!(check_derivation(&back).is_valid());
    }

    #[test]
    fn errors() {
        assert_eq!(parse_derivation("(Foo (term \"x\") (type \"A\"))", Some(System::Seq)), Err(FormatError::UnknownRule("Foo".into())));
        assert_eq!(parse_derivation("(Ax (term \"x\") (type \"A\"))", None), Err(FormatError::MissingSystem));
        assert!(parse_derivation("(Ax (system ls) (term \"x\") (type \"A\")", None).is_err());
        assert!(parse_derivation("(Ax (system ls) (term \"x\") (type \"A\"))", Some(System::Nd)).is_err());
    }
}
