//! λ-terms and λ⊥-terms: syntax, parsing, printing, free variables,
//! capture-avoiding substitution and α-equivalence.
//!
//! Terms keep their binder names so they can be printed the way they were
//! written. Every equality test goes through the nameless form
//! ([`Term::canonical`]) or the equivalent direct walk in [`alpha_eq`].

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    App(Box<Term>, Box<Term>),
    Lam(String, Box<Term>),
    /// The constant ⊥ of λ⊥-terms.
    Bottom,
}

/// Nameless representation: bound variables become de Bruijn indices,
/// free variables keep their names.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Canon {
    Bound(usize),
    Free(String),
    App(Box<Canon>, Box<Canon>),
    Lam(Box<Canon>),
    Bottom,
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn lam(x: impl Into<String>, body: Term) -> Term {
        Term::Lam(x.into(), Box::new(body))
    }

    /// `head a1 ... an`, left-associated.
    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    /// Splits `h N1 ... Nn` into its head and argument list.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Term::App(f, a) = cur {
            args.push(a.as_ref());
            cur = f;
        }
        args.reverse();
        (cur, args)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Bottom => 1,
            Term::App(f, a) => 1 + f.size() + a.size(),
            Term::Lam(_, b) => 1 + b.size(),
        }
    }

    pub fn contains_bottom(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Bottom => true,
            Term::App(f, a) => f.contains_bottom() || a.contains_bottom(),
            Term::Lam(_, b) => b.contains_bottom(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    pub fn has_free(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => y == x,
            Term::Bottom => false,
            Term::App(f, a) => f.has_free(x) || a.has_free(x),
            Term::Lam(y, b) => y != x && b.has_free(x),
        }
    }

    /// Every name occurring in the term, free or binding.
    pub fn names(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Bottom => {}
            Term::App(f, a) => {
                f.names(out);
                a.names(out);
            }
            Term::Lam(x, b) => {
                out.insert(x.clone());
                b.names(out);
            }
        }
    }

    pub fn canonical(&self) -> Canon {
        fn go(t: &Term, env: &mut Vec<String>) -> Canon {
            match t {
                Term::Var(x) => match env.iter().rev().position(|y| y == x) {
                    Some(i) => Canon::Bound(i),
                    None => Canon::Free(x.clone()),
                },
                Term::Bottom => Canon::Bottom,
                Term::App(f, a) => Canon::App(Box::new(go(f, env)), Box::new(go(a, env))),
                Term::Lam(x, b) => {
                    env.push(x.clone());
                    let body = go(b, env);
                    env.pop();
                    Canon::Lam(Box::new(body))
                }
            }
        }
        go(self, &mut Vec::new())
    }

    pub fn subterm(&self, pos: &Position) -> Option<&Term> {
        let mut cur = self;
        for d in &pos.0 {
            cur = match (d, cur) {
                (Dir::Fun, Term::App(f, _)) => f,
                (Dir::Arg, Term::App(_, a)) => a,
                (Dir::Body, Term::Lam(_, b)) => b,
                _ => return None,
            };
        }
        Some(cur)
    }

    /// Replaces the subterm at `pos`. Binders above the position are kept,
    /// so free variables of `new` may be captured on purpose (this is how
    /// contractions are plugged back into their context).
    pub fn replace_at(&self, pos: &[Dir], new: Term) -> Option<Term> {
        let Some((d, rest)) = pos.split_first() else {
            return Some(new);
        };
        match (d, self) {
            (Dir::Fun, Term::App(f, a)) => Some(Term::App(Box::new(f.replace_at(rest, new)?), a.clone())),
            (Dir::Arg, Term::App(f, a)) => Some(Term::App(f.clone(), Box::new(a.replace_at(rest, new)?))),
            (Dir::Body, Term::Lam(x, b)) => Some(Term::Lam(x.clone(), Box::new(b.replace_at(rest, new)?))),
            _ => None,
        }
    }
}

fn collect_free(t: &Term, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match t {
        Term::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Term::Bottom => {}
        Term::App(f, a) => {
            collect_free(f, bound, out);
            collect_free(a, bound, out);
        }
        Term::Lam(x, b) => {
            bound.push(x.clone());
            collect_free(b, bound, out);
            bound.pop();
        }
    }
}

pub fn free_vars(t: &Term) -> BTreeSet<String> {
    t.free_vars()
}

/// Smallest numbered variant of `base` that is not in `avoid`.
/// Generated names (`#g..`) get an `_k` suffix so they never collide with
/// later generated names.
pub fn fresh_variant(base: &str, avoid: &BTreeSet<String>) -> String {
    let sep = if base.starts_with('#') { "_" } else { "" };
    (1..)
        .map(|k| format!("{base}{sep}{k}"))
        .find(|c| !avoid.contains(c))
        .expect("unbounded supply of names")
}

/// Capture-avoiding substitution `t[x := n]`.
pub fn substitute(t: &Term, x: &str, n: &Term) -> Term {
    let fv_n = n.free_vars();
    subst_with(t, x, n, &fv_n)
}

fn subst_with(t: &Term, x: &str, n: &Term, fv_n: &BTreeSet<String>) -> Term {
    match t {
        Term::Var(y) if y == x => n.clone(),
        Term::Var(_) | Term::Bottom => t.clone(),
        Term::App(f, a) => Term::app(subst_with(f, x, n, fv_n), subst_with(a, x, n, fv_n)),
        Term::Lam(y, b) => {
            if y == x || !b.has_free(x) {
                t.clone()
            } else if fv_n.contains(y) {
                let mut avoid = fv_n.clone();
                avoid.extend(b.free_vars());
                avoid.insert(x.to_string());
                let z = fresh_variant(y, &avoid);
                let renamed = subst_with(b, y, &Term::Var(z.clone()), &BTreeSet::from([z.clone()]));
                Term::lam(z, subst_with(&renamed, x, n, fv_n))
            } else {
                Term::lam(y.clone(), subst_with(b, x, n, fv_n))
            }
        }
    }
}

/// α-equivalence, decided on the nameless form without materialising it.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    fn go<'a>(a: &'a Term, b: &'a Term, ea: &mut Vec<&'a str>, eb: &mut Vec<&'a str>) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => {
                let ix = ea.iter().rev().position(|v| *v == x);
                let iy = eb.iter().rev().position(|v| *v == y);
                match (ix, iy) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => x == y,
                    _ => false,
                }
            }
            (Term::Bottom, Term::Bottom) => true,
            (Term::App(f1, a1), Term::App(f2, a2)) => go(f1, f2, ea, eb) && go(a1, a2, ea, eb),
            (Term::Lam(x, b1), Term::Lam(y, b2)) => {
                ea.push(x);
                eb.push(y);
                let r = go(b1, b2, ea, eb);
                ea.pop();
                eb.pop();
                r
            }
            _ => false,
        }
    }
    go(a, b, &mut Vec::new(), &mut Vec::new())
}

/// Opens an abstraction with a chosen binder: `λy.M` becomes `M[y:=x]`.
/// Returns `None` when `t` is not an abstraction or `x` would be captured
/// (i.e. `x` is free in `t`).
pub fn open_lam(t: &Term, x: &str) -> Option<Term> {
    match t {
        Term::Lam(y, b) if y == x => Some((**b).clone()),
        Term::Lam(y, b) if !t.has_free(x) => Some(substitute(b, y, &Term::var(x))),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Positions

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    Fun,
    Arg,
    Body,
}

/// Path from the root of a term to one of its subterms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(pub Vec<Dir>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, d: Dir) -> Position {
        let mut v = self.0.clone();
        v.push(d);
        Position(v)
    }

    pub fn prefixed(prefix: &[Dir], rest: &Position) -> Position {
        Position(prefix.iter().copied().chain(rest.0.iter().copied()).collect())
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        let parts: Vec<&str> = self
            .0
            .iter()
            .map(|d| match d {
                Dir::Fun => "fun",
                Dir::Arg => "arg",
                Dir::Body => "body",
            })
            .collect();
        f.write_str(&parts.join("."))
    }
}

impl std::str::FromStr for Position {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "root" || s.is_empty() {
            return Ok(Position::root());
        }
        s.split('.')
            .map(|p| match p {
                "fun" => Ok(Dir::Fun),
                "arg" => Ok(Dir::Arg),
                "body" => Ok(Dir::Body),
                other => Err(format!("unknown position component `{other}`")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Position)
    }
}

// ---------------------------------------------------------------------------
// Printing

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => f.write_str(x),
            Term::Bottom => f.write_str("_|_"),
            Term::Lam(x, b) => write!(f, "\\{x}. {b}"),
            Term::App(fun, arg) => {
                match **fun {
                    Term::Lam(..) => write!(f, "({fun})")?,
                    _ => write!(f, "{fun}")?,
                }
                match **arg {
                    Term::App(..) | Term::Lam(..) => write!(f, " ({arg})"),
                    _ => write!(f, " {arg}"),
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(offset: usize, message: impl Into<String>) -> Self {
        ParseError { offset, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Lambda,
    Dot,
    LParen,
    RParen,
    Bottom,
    Ident(String),
}

pub(crate) fn is_ident_start(c: char) -> bool {
    (c.is_alphabetic() && c != 'λ' && c != 'ω') || c == '#'
}

pub(crate) fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() && c != 'λ' && c != 'ω' || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        match c {
            c if c.is_whitespace() => {
                it.next();
            }
            '\\' | 'λ' => {
                it.next();
                out.push((i, Tok::Lambda));
            }
            '.' => {
                it.next();
                out.push((i, Tok::Dot));
            }
            '(' => {
                it.next();
                out.push((i, Tok::LParen));
            }
            ')' => {
                it.next();
                out.push((i, Tok::RParen));
            }
            '⊥' => {
                it.next();
                out.push((i, Tok::Bottom));
            }
            '_' => {
                if text[i..].starts_with("_|_") {
                    for _ in 0..3 {
                        it.next();
                    }
                    out.push((i, Tok::Bottom));
                } else {
                    return Err(ParseError::new(i, "unexpected `_`"));
                }
            }
            c if is_ident_start(c) => {
                let mut end = i;
                while let Some(&(j, d)) = it.peek() {
                    if j == i || is_ident_continue(d) {
                        end = j + d.len_utf8();
                        it.next();
                    } else {
                        break;
                    }
                }
                out.push((i, Tok::Ident(text[i..end].to_string())));
            }
            other => return Err(ParseError::new(i, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    allow_bottom: bool,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        if self.peek() == Some(&Tok::Lambda) {
            return self.lam();
        }
        let mut acc: Option<Term> = None;
        loop {
            let next = match self.peek() {
                Some(Tok::Lambda) => {
                    let l = self.lam()?;
                    acc = Some(match acc {
                        Some(f) => Term::app(f, l),
                        None => l,
                    });
                    break;
                }
                Some(Tok::Ident(_)) | Some(Tok::LParen) | Some(Tok::Bottom) => self.atom()?,
                _ => break,
            };
            acc = Some(match acc {
                Some(f) => Term::app(f, next),
                None => next,
            });
        }
        acc.ok_or_else(|| ParseError::new(self.offset(), "expected a term"))
    }

    fn lam(&mut self) -> Result<Term, ParseError> {
        self.pos += 1;
        let mut binders = Vec::new();
        while let Some(Tok::Ident(x)) = self.peek() {
            binders.push(x.clone());
            self.pos += 1;
        }
        if binders.is_empty() {
            return Err(ParseError::new(self.offset(), "expected a binder after λ"));
        }
        if self.peek() != Some(&Tok::Dot) {
            return Err(ParseError::new(self.offset(), "expected `.`"));
        }
        self.pos += 1;
        let body = self.term()?;
        Ok(binders.into_iter().rev().fold(body, |b, x| Term::lam(x, b)))
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        let off = self.offset();
        match self.peek().cloned() {
            Some(Tok::Ident(x)) => {
                self.pos += 1;
                Ok(Term::Var(x))
            }
            Some(Tok::Bottom) => {
                if !self.allow_bottom {
                    return Err(ParseError::new(off, "`_|_` is only allowed in λ⊥-terms"));
                }
                self.pos += 1;
                Ok(Term::Bottom)
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(ParseError::new(self.offset(), "expected `)`"));
                }
                self.pos += 1;
                Ok(t)
            }
            _ => Err(ParseError::new(off, "expected a term")),
        }
    }
}

/// Parses a plain λ-term.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    parse_term_with(text, false)
}

/// Parses a λ⊥-term (`_|_` allowed).
pub fn parse_bottom_term(text: &str) -> Result<Term, ParseError> {
    parse_term_with(text, true)
}

pub fn parse_term_with(text: &str, allow_bottom: bool) -> Result<Term, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len(), allow_bottom };
    let t = p.term()?;
    if p.pos != p.toks.len() {
        return Err(ParseError::new(p.offset(), "unexpected trailing input"));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn parses_self_application() {
        assert_eq!(
            t("\\x. x x"),
            Term::lam("x", Term::app(Term::var("x"), Term::var("x")))
        );
        assert_eq!(t("λx. x x"), t("\\x. x x"));
    }

    #[test]
    fn parses_atoms_and_left_assoc() {
        assert_eq!(t("x"), Term::var("x"));
        assert_eq!(
            t("(\\x. x) y z"),
            Term::app(
                Term::app(Term::lam("x", Term::var("x")), Term::var("y")),
                Term::var("z")
            )
        );
        assert_eq!(t("\\x y. x"), Term::lam("x", Term::lam("y", Term::var("x"))));
    }

    #[test]
    fn parse_errors_carry_offsets() {
        let e = parse_term("(x y").unwrap_err();
        assert_eq!(e.offset, 4);
        let e = parse_term("x _|_").unwrap_err();
        assert_eq!(e.offset, 2);
        assert!(parse_bottom_term("x _|_").is_ok());
        assert!(parse_term("\\. x").is_err());
        assert!(parse_term("").is_err());
    }

    #[test]
    fn free_variables() {
        assert!(t("\\x. x x").free_vars().is_empty());
        assert_eq!(t("x (\\y. x y)").free_vars(), BTreeSet::from(["x".to_string()]));
        assert!(Term::Bottom.free_vars().is_empty());
    }

    #[test]
    fn substitution_avoids_capture() {
        let r = substitute(&t("\\y. x y"), "x", &t("y"));
        assert!(alpha_eq(&r, &t("\\y'. y y'")));
        assert_eq!(r.to_string(), "\\y1. y y1");
        assert_eq!(substitute(&t("x"), "x", &t("\\z. z")), t("\\z. z"));
        assert_eq!(substitute(&t("\\x. x"), "x", &t("y")), t("\\x. x"));
    }

    #[test]
    fn alpha_equivalence() {
        assert!(alpha_eq(&t("\\x. x"), &t("\\y. y")));
        assert!(alpha_eq(&t("\\x. x y"), &t("\\z. z y")));
        assert!(!alpha_eq(&t("\\x. x y"), &t("\\x. x z")));
        assert!(!alpha_eq(&t("\\x. \\y. x"), &t("\\x. \\y. y")));
        assert_eq!(t("\\x. \\y. x").canonical(), t("\\a. \\b. a").canonical());
    }

    #[test]
    fn positions_print_and_parse() {
        let p = Position(vec![Dir::Fun, Dir::Arg, Dir::Body]);
        assert_eq!(p.to_string(), "fun.arg.body");
        assert_eq!("fun.arg.body".parse::<Position>().unwrap(), p);
        assert_eq!("root".parse::<Position>().unwrap(), Position::root());
        let m = t("(\\x. x) (\\y. y z)");
        assert_eq!(m.subterm(&"arg.body".parse().unwrap()), Some(&t("y z")));
    }

    #[test]
    fn generated_names_round_trip() {
        let m = t("\\#g0. #g0 x");
        assert_eq!(m.to_string(), "\\#g0. #g0 x");
        assert_eq!(fresh_variant("#g0", &BTreeSet::new()), "#g0_1");
    }
}
