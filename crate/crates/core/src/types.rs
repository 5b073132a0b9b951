//! Intersection types with ω, the preorders ≤ and ≤ω, and typing contexts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::term::{is_ident_continue, is_ident_start, ParseError};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Var(String),
    Arrow(Box<Type>, Box<Type>),
    /// Binary intersection; associativity, commutativity and idempotence
    /// only hold up to the preorder, never syntactically.
    Inter(Box<Type>, Box<Type>),
    Omega,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("ω is not allowed here")]
pub struct OmegaNotAllowed;

impl Type {
    pub fn var(name: impl Into<String>) -> Type {
        Type::Var(name.into())
    }

    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Box::new(a), Box::new(b))
    }

    pub fn inter(a: Type, b: Type) -> Type {
        Type::Inter(Box::new(a), Box::new(b))
    }

    pub fn is_omega_free(&self) -> bool {
        match self {
            Type::Var(_) => true,
            Type::Omega => false,
            Type::Arrow(a, b) | Type::Inter(a, b) => a.is_omega_free() && b.is_omega_free(),
        }
    }

    /// Number of `→` and `∩` occurring in the type.
    pub fn connectives(&self) -> usize {
        match self {
            Type::Var(_) | Type::Omega => 0,
            Type::Arrow(a, b) | Type::Inter(a, b) => 1 + a.connectives() + b.connectives(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Type::Var(_) | Type::Omega => 1,
            Type::Arrow(a, b) | Type::Inter(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Top-level conjuncts: the type split at every top-level `∩`.
    pub fn conjuncts(&self) -> Vec<&Type> {
        let mut out = Vec::new();
        fn go<'a>(t: &'a Type, out: &mut Vec<&'a Type>) {
            match t {
                Type::Inter(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                other => out.push(other),
            }
        }
        go(self, &mut out);
        out
    }

    /// `ω ≤ω self`: every top-level conjunct is ω.
    pub fn is_omega_dominated(&self) -> bool {
        self.conjuncts().iter().all(|c| **c == Type::Omega)
    }
}

/// Folds a non-empty list of types into an intersection in canonical order:
/// distinct types sorted by printed form, combined left-associatively.
pub fn fold_canonical<I: IntoIterator<Item = Type>>(types: I) -> Option<Type> {
    let mut ts: Vec<(String, Type)> = types.into_iter().map(|t| (t.to_string(), t)).collect();
    ts.sort();
    ts.dedup();
    ts.into_iter().map(|(_, t)| t).reduce(Type::inter)
}

/// Decides `a ≤ b` for ω-free types.
pub fn leq(a: &Type, b: &Type) -> Result<bool, OmegaNotAllowed> {
    if !a.is_omega_free() || !b.is_omega_free() {
        return Err(OmegaNotAllowed);
    }
    Ok(conjunct_inclusion(a, b, false))
}

/// Decides `a ≤ω b`.
pub fn leq_omega(a: &Type, b: &Type) -> bool {
    conjunct_inclusion(a, b, true)
}

fn conjunct_inclusion(a: &Type, b: &Type, omega_top: bool) -> bool {
    let have: BTreeSet<&Type> = a.conjuncts().into_iter().collect();
    b.conjuncts()
        .into_iter()
        .all(|c| (omega_top && *c == Type::Omega) || have.contains(c))
}

/// `a` and `b` are equivalent under ≤ (or ≤ω).
pub fn equivalent(a: &Type, b: &Type, omega: bool) -> bool {
    conjunct_inclusion(a, b, omega) && conjunct_inclusion(b, a, omega)
}

// ---------------------------------------------------------------------------
// Contexts

/// A typing context in which one variable may carry several types.
/// Natural deduction contexts are the special case where every variable
/// is bound once (see [`SeqContext::is_functional`]).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeqContext(BTreeSet<(String, Type)>);

/// A context with each variable bound at most once.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NdContext(BTreeMap<String, Type>);

impl SeqContext {
    pub fn new() -> Self {
        SeqContext(BTreeSet::new())
    }

    pub fn from_pairs<I: IntoIterator<Item = (String, Type)>>(it: I) -> Self {
        SeqContext(it.into_iter().collect())
    }

    pub fn singleton(x: impl Into<String>, a: Type) -> Self {
        Self::from_pairs([(x.into(), a)])
    }

    pub fn bindings(&self) -> impl Iterator<Item = &(String, Type)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: &str, a: &Type) -> bool {
        self.0.contains(&(x.to_string(), a.clone()))
    }

    /// `x ∈ Γ`: some binding mentions `x`.
    pub fn binds(&self, x: &str) -> bool {
        self.0.iter().any(|(y, _)| y == x)
    }

    pub fn types_of<'a>(&'a self, x: &'a str) -> impl Iterator<Item = &'a Type> + 'a {
        self.0.iter().filter(move |(y, _)| y == x).map(|(_, t)| t)
    }

    pub fn vars(&self) -> BTreeSet<String> {
        self.0.iter().map(|(x, _)| x.clone()).collect()
    }

    /// `Γ, x:A`.
    pub fn with(&self, x: impl Into<String>, a: Type) -> Self {
        let mut s = self.clone();
        s.0.insert((x.into(), a));
        s
    }

    pub fn insert(&mut self, x: impl Into<String>, a: Type) {
        self.0.insert((x.into(), a));
    }

    pub fn remove(&mut self, x: &str, a: &Type) -> bool {
        self.0.remove(&(x.to_string(), a.clone()))
    }

    pub fn union(&self, other: &SeqContext) -> Self {
        SeqContext(self.0.union(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &SeqContext) -> Self {
        SeqContext(self.0.difference(&other.0).cloned().collect())
    }

    pub fn is_subset(&self, other: &SeqContext) -> bool {
        self.0.is_subset(&other.0)
    }

    /// Every binding of `x` removed.
    pub fn without_var(&self, x: &str) -> Self {
        SeqContext(self.0.iter().filter(|(y, _)| y != x).cloned().collect())
    }

    pub fn is_functional(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.0.iter().all(|(x, _)| seen.insert(x))
    }

    pub fn is_omega_free(&self) -> bool {
        self.0.iter().all(|(_, t)| t.is_omega_free())
    }

    pub fn map_types(&self, f: impl Fn(&str, &Type) -> Type) -> Self {
        SeqContext(self.0.iter().map(|(x, t)| (x.clone(), f(x, t))).collect())
    }

    pub fn rename(&self, from: &str, to: &str) -> Self {
        SeqContext(
            self.0
                .iter()
                .map(|(x, t)| (if x == from { to.to_string() } else { x.clone() }, t.clone()))
                .collect(),
        )
    }

    /// Finds Γ with `self = Γ ∪ extra_here` and `other = Γ ∪ extra_there`.
    pub fn common_base(&self, extra_here: &SeqContext, other: &SeqContext, extra_there: &SeqContext) -> Option<SeqContext> {
        if !extra_here.is_subset(self) || !extra_there.is_subset(other) {
            return None;
        }
        let base = self.difference(extra_here).union(&other.difference(extra_there));
        (base.is_subset(self) && base.is_subset(other)).then_some(base)
    }
}

impl NdContext {
    pub fn new() -> Self {
        NdContext(BTreeMap::new())
    }

    pub fn get(&self, x: &str) -> Option<&Type> {
        self.0.get(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Type)> {
        self.0.iter()
    }

    pub fn insert(&mut self, x: impl Into<String>, a: Type) {
        self.0.insert(x.into(), a);
    }

    pub fn to_seq(&self) -> SeqContext {
        SeqContext::from_pairs(self.0.iter().map(|(x, t)| (x.clone(), t.clone())))
    }

    /// Views a functional sequent-style context as a map.
    pub fn from_seq(g: &SeqContext) -> Option<NdContext> {
        let mut m = BTreeMap::new();
        for (x, t) in g.bindings() {
            if m.insert(x.clone(), t.clone()).is_some() {
                return None;
            }
        }
        Some(NdContext(m))
    }
}

/// Γ∩: each variable gets the canonical intersection of all its types.
pub fn collapse(g: &SeqContext) -> NdContext {
    let mut grouped: BTreeMap<String, Vec<Type>> = BTreeMap::new();
    for (x, t) in g.bindings() {
        grouped.entry(x.clone()).or_default().push(t.clone());
    }
    NdContext(
        grouped
            .into_iter()
            .map(|(x, ts)| (x, fold_canonical(ts).expect("non-empty group")))
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// Printing and parsing

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Var(x) => f.write_str(x),
            Type::Omega => f.write_str("w"),
            Type::Arrow(a, b) => {
                match **a {
                    Type::Arrow(..) | Type::Inter(..) => write!(f, "({a})")?,
                    _ => write!(f, "{a}")?,
                }
                write!(f, " -> {b}")
            }
            Type::Inter(a, b) => {
                match **a {
                    Type::Arrow(..) => write!(f, "({a})")?,
                    _ => write!(f, "{a}")?,
                }
                match **b {
                    Type::Arrow(..) | Type::Inter(..) => write!(f, " & ({b})"),
                    _ => write!(f, " & {b}"),
                }
            }
        }
    }
}

impl fmt::Display for SeqContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(x, t)| format!("{x}:{t}")).collect();
        f.write_str(&parts.join(", "))
    }
}

impl fmt::Display for NdContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_seq().fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Arrow,
    Amp,
    LParen,
    RParen,
    Omega,
    Ident(String),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        match c {
            c if c.is_whitespace() => {
                it.next();
            }
            '-' | '→' => {
                it.next();
                if c == '-' {
                    match it.next() {
                        Some((_, '>')) => {}
                        _ => return Err(ParseError::new(i, "expected `->`")),
                    }
                }
                out.push((i, Tok::Arrow));
            }
            '&' | '∩' => {
                it.next();
                out.push((i, Tok::Amp));
            }
            '(' => {
                it.next();
                out.push((i, Tok::LParen));
            }
            ')' => {
                it.next();
                out.push((i, Tok::RParen));
            }
            'ω' => {
                it.next();
                out.push((i, Tok::Omega));
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
                let word = &text[i..end];
                out.push((i, if word == "w" { Tok::Omega } else { Tok::Ident(word.to_string()) }));
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
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        let lhs = self.inter()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.ty()?;
            return Ok(Type::arrow(lhs, rhs));
        }
        Ok(lhs)
    }

    fn inter(&mut self) -> Result<Type, ParseError> {
        let mut acc = self.atom()?;
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            let next = self.atom()?;
            acc = Type::inter(acc, next);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Type, ParseError> {
        let off = self.offset();
        match self.peek().cloned() {
            Some(Tok::Ident(x)) => {
                self.pos += 1;
                Ok(Type::Var(x))
            }
            Some(Tok::Omega) => {
                self.pos += 1;
                Ok(Type::Omega)
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.ty()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(ParseError::new(self.offset(), "expected `)`"));
                }
                self.pos += 1;
                Ok(t)
            }
            _ => Err(ParseError::new(off, "expected a type")),
        }
    }
}

pub fn parse_type(text: &str) -> Result<Type, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len() };
    let t = p.ty()?;
    if p.pos != p.toks.len() {
        return Err(ParseError::new(p.offset(), "unexpected trailing input"));
    }
    Ok(t)
}

/// Parses `x:A, y:B, ...`. Repeated variables are kept as separate bindings;
/// natural-deduction callers check [`SeqContext::is_functional`].
pub fn parse_context(text: &str) -> Result<SeqContext, ParseError> {
    let mut ctx = SeqContext::new();
    if text.trim().is_empty() {
        return Ok(ctx);
    }
    let mut offset = 0;
    for part in split_top_level(text) {
        let Some(colon) = part.find(':') else {
            return Err(ParseError::new(offset, "expected `x:type`"));
        };
        let name = part[..colon].trim();
        if name.is_empty() || !name.chars().next().is_some_and(is_ident_start) || !name.chars().skip(1).all(is_ident_continue) {
            return Err(ParseError::new(offset, format!("bad variable name `{name}`")));
        }
        let ty = parse_type(&part[colon + 1..]).map_err(|e| ParseError::new(offset + colon + 1 + e.offset, e.message))?;
        ctx.insert(name, ty);
        offset += part.len() + 1;
    }
    Ok(ctx)
}

fn split_top_level(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ty(s: &str) -> Type {
        parse_type(s).unwrap()
    }

    #[test]
    fn parse_and_print() {
        let t = ty("(A & (A -> B)) -> B");
        assert_eq!(t, Type::arrow(Type::inter(ty("A"), ty("A -> B")), ty("B")));
        assert_eq!(t.to_string(), "(A & (A -> B)) -> B");
        assert_eq!(ty("A -> B -> C"), Type::arrow(ty("A"), ty("B -> C")));
        assert_eq!(ty("A & B & C"), Type::inter(ty("A & B"), ty("C")));
        assert_eq!(ty("A & B -> C"), Type::arrow(ty("A & B"), ty("C")));
        assert_eq!(ty("w"), Type::Omega);
        assert_eq!(ty("A ∩ (A → B)"), ty("A & (A -> B)"));
        assert_eq!(ty("A & (B & C)").to_string(), "A & (B & C)");
        assert!(parse_type("A ->").is_err());
    }

    #[test]
    fn leq_examples() {
        assert_eq!(leq(&ty("A & B"), &ty("A")), Ok(true));
        assert_eq!(leq(&ty("A"), &ty("A & A")), Ok(true));
        assert_eq!(leq(&ty("(A & B) -> C"), &ty("(B & A) -> C")), Ok(false));
        assert_eq!(leq(&ty("A"), &ty("w")), Err(OmegaNotAllowed));
    }

    #[test]
    fn leq_omega_examples() {
        assert!(leq_omega(&ty("A"), &ty("w")));
        assert!(leq_omega(&Type::Omega, &ty("w & w")));
        assert!(!leq_omega(&Type::Omega, &ty("A & w")));
    }

    #[test]
    fn omega_freedom() {
        assert!(!Type::Omega.is_omega_free());
        assert!(ty("(A -> B) & C").is_omega_free());
        assert!(!ty("A -> w").is_omega_free());
    }

    #[test]
    fn collapse_examples() {
        let g = parse_context("x:A").unwrap();
        assert_eq!(collapse(&g).to_seq(), g);
        let g = parse_context("x:A, x:A -> B").unwrap();
        assert_eq!(collapse(&g).get("x"), Some(&ty("A & (A -> B)")));
        let g = parse_context("x:A, y:B").unwrap();
        assert_eq!(collapse(&g).to_seq(), g);
    }

    #[test]
    fn context_parsing() {
        let g = parse_context("x:A -> B, y:(A & B)").unwrap();
        assert_eq!(g.len(), 2);
        assert!(parse_context("x A").is_err());
        assert!(parse_context("").unwrap().is_empty());
    }

    #[test]
    fn common_base_recovers_gamma() {
        let c = parse_context("x:A & B, z:C").unwrap();
        let p = parse_context("x:A, x:B, z:C").unwrap();
        let base = c
            .common_base(&parse_context("x:A & B").unwrap(), &p, &parse_context("x:A, x:B").unwrap())
            .unwrap();
        assert_eq!(base, parse_context("z:C").unwrap());
    }
}
