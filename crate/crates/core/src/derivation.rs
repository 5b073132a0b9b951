//! Derivation trees for the six type systems and the rule-by-rule checker.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::term::{alpha_eq, substitute, Term};
use crate::types::{SeqContext, Type};

/// The six systems: natural deduction with and without ω, and the three
/// sequent-style systems ((Beta)ˢ, (Beta)ℓ) with and without ω.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum System {
    Nd,
    NdOmega,
    Seq,
    SeqOmega,
    SeqL,
    SeqLOmega,
}

impl System {
    pub const ALL: [System; 6] = [
        System::Nd,
        System::NdOmega,
        System::Seq,
        System::SeqOmega,
        System::SeqL,
        System::SeqLOmega,
    ];

    pub fn has_omega(self) -> bool {
        matches!(self, System::NdOmega | System::SeqOmega | System::SeqLOmega)
    }

    pub fn is_nd(self) -> bool {
        matches!(self, System::Nd | System::NdOmega)
    }

    pub fn is_sequent(self) -> bool {
        !self.is_nd()
    }

    /// Command-line name.
    pub fn name(self) -> &'static str {
        match self {
            System::Nd => "nd",
            System::NdOmega => "ndw",
            System::Seq => "ls",
            System::SeqOmega => "lsw",
            System::SeqL => "ll",
            System::SeqLOmega => "llw",
        }
    }

    pub fn from_name(s: &str) -> Option<System> {
        System::ALL.into_iter().find(|sys| sys.name() == s)
    }

    pub fn with_omega(self) -> System {
        match self {
            System::Nd => System::NdOmega,
            System::Seq => System::SeqOmega,
            System::SeqL => System::SeqLOmega,
            other => other,
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Ax,
    ArrI,
    ArrE,
    CapI,
    CapEL,
    CapER,
    BetaS,
    BetaL,
    LArr,
    RArr,
    LCap,
    RCap,
    Omega,
}

impl Rule {
    pub const ALL: [Rule; 13] = [
        Rule::Ax,
        Rule::ArrI,
        Rule::ArrE,
        Rule::CapI,
        Rule::CapEL,
        Rule::CapER,
        Rule::BetaS,
        Rule::BetaL,
        Rule::LArr,
        Rule::RArr,
        Rule::LCap,
        Rule::RCap,
        Rule::Omega,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Ax => "Ax",
            Rule::ArrI => "ArrI",
            Rule::ArrE => "ArrE",
            Rule::CapI => "CapI",
            Rule::CapEL => "CapEL",
            Rule::CapER => "CapER",
            Rule::BetaS => "BetaS",
            Rule::BetaL => "BetaL",
            Rule::LArr => "LArr",
            Rule::RArr => "RArr",
            Rule::LCap => "LCap",
            Rule::RCap => "RCap",
            Rule::Omega => "Omega",
        }
    }

    pub fn from_name(s: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.name() == s)
    }

    pub fn admissible_in(self, sys: System) -> bool {
        use Rule::*;
        match self {
            Ax => true,
            Omega => sys.has_omega(),
            ArrI | ArrE | CapI | CapEL | CapER => sys.is_nd(),
            LArr | RArr | LCap | RCap => sys.is_sequent(),
            BetaS => matches!(sys, System::Seq | System::SeqOmega),
            BetaL => matches!(sys, System::SeqL | System::SeqLOmega),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `Γ ⊢ M : A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sequent {
    pub context: SeqContext,
    pub subject: Term,
    pub ty: Type,
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.context.is_empty() {
            write!(f, "|- {} : {}", self.subject, self.ty)
        } else {
            write!(f, "{} |- {} : {}", self.context, self.subject, self.ty)
        }
    }
}

/// Rule-specific data recorded at a node.
///
/// * `n`: spine length after the principal argument, for the (Beta) rules,
///   (L→) and (L∩).
/// * `var`: binder of (→I)/(R→), principal variable of (L→)/(L∩)/(Ax).
/// * `fresh`: the variable `y` introduced by (L→).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Detail {
    pub n: Option<usize>,
    pub var: Option<String>,
    pub fresh: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub system: System,
    pub rule: Rule,
    pub conclusion: Sequent,
    pub detail: Detail,
    pub premisses: Vec<Derivation>,
}

// ---------------------------------------------------------------------------
// Builders. They compute the conclusion from the premisses; validity is the
// checker's business.

impl Derivation {
    fn node(system: System, rule: Rule, conclusion: Sequent, detail: Detail, premisses: Vec<Derivation>) -> Self {
        Derivation { system, rule, conclusion, detail, premisses }
    }

    pub fn ax(system: System, context: SeqContext, x: &str, ty: Type) -> Self {
        Self::node(
            system,
            Rule::Ax,
            Sequent { context, subject: Term::var(x), ty },
            Detail { var: Some(x.to_string()), ..Detail::default() },
            vec![],
        )
    }

    pub fn omega(system: System, context: SeqContext, subject: Term) -> Self {
        Self::node(system, Rule::Omega, Sequent { context, subject, ty: Type::Omega }, Detail::default(), vec![])
    }

    /// Types `subject` with an ω-dominated type using (ω) and ∩-introduction.
    pub fn omega_tree(system: System, context: &SeqContext, subject: &Term, ty: &Type) -> Option<Self> {
        match ty {
            Type::Omega => Some(Self::omega(system, context.clone(), subject.clone())),
            Type::Inter(a, b) => {
                let l = Self::omega_tree(system, context, subject, a)?;
                let r = Self::omega_tree(system, context, subject, b)?;
                Some(Self::cap_intro(l, r))
            }
            _ => None,
        }
    }

    /// (→I) or (R→) with binder `x : dom`, concluding in `context`.
    pub fn arrow_intro(context: SeqContext, x: &str, dom: Type, premiss: Derivation) -> Self {
        let system = premiss.system;
        let rule = if system.is_nd() { Rule::ArrI } else { Rule::RArr };
        let subject = Term::lam(x, premiss.conclusion.subject.clone());
        let ty = Type::arrow(dom, premiss.conclusion.ty.clone());
        Self::node(
            system,
            rule,
            Sequent { context, subject, ty },
            Detail { var: Some(x.to_string()), ..Detail::default() },
            vec![premiss],
        )
    }

    /// (→E). Panics if the function premiss does not have an arrow type.
    pub fn arrow_elim(fun: Derivation, arg: Derivation) -> Self {
        let Type::Arrow(_, cod) = &fun.conclusion.ty else {
            panic!("arrow_elim on a non-arrow type {}", fun.conclusion.ty)
        };
        let conclusion = Sequent {
            context: fun.conclusion.context.clone(),
            subject: Term::app(fun.conclusion.subject.clone(), arg.conclusion.subject.clone()),
            ty: (**cod).clone(),
        };
        Self::node(fun.system, Rule::ArrE, conclusion, Detail::default(), vec![fun, arg])
    }

    /// (∩I) or (R∩).
    pub fn cap_intro(left: Derivation, right: Derivation) -> Self {
        let system = left.system;
        let rule = if system.is_nd() { Rule::CapI } else { Rule::RCap };
        let conclusion = Sequent {
            context: left.conclusion.context.clone(),
            subject: left.conclusion.subject.clone(),
            ty: Type::inter(left.conclusion.ty.clone(), right.conclusion.ty.clone()),
        };
        Self::node(system, rule, conclusion, Detail::default(), vec![left, right])
    }

    /// (∩E), keeping the left or the right component.
    pub fn cap_elim(premiss: Derivation, left: bool) -> Self {
        let Type::Inter(a, b) = &premiss.conclusion.ty else {
            panic!("cap_elim on a non-intersection type {}", premiss.conclusion.ty)
        };
        let ty = if left { (**a).clone() } else { (**b).clone() };
        let conclusion = Sequent { ty, ..premiss.conclusion.clone() };
        let rule = if left { Rule::CapEL } else { Rule::CapER };
        Self::node(premiss.system, rule, conclusion, Detail::default(), vec![premiss])
    }

    /// (Beta)ˢ when `arg` is given, (Beta)ℓ otherwise. `subject` is the
    /// redex spine `(λx.M) N N1 … Nn`.
    pub fn beta(subject: Term, n: usize, contractum: Derivation, arg: Option<Derivation>) -> Self {
        let system = contractum.system;
        let rule = if arg.is_some() { Rule::BetaS } else { Rule::BetaL };
        let conclusion = Sequent { subject, ..contractum.conclusion.clone() };
        let mut premisses = vec![contractum];
        premisses.extend(arg);
        Self::node(system, rule, conclusion, Detail { n: Some(n), ..Detail::default() }, premisses)
    }

    /// (L→) with principal variable `x` and fresh `y`; `left` types `N`
    /// and `right` types `y N1 … Nn`.
    pub fn l_arr(x: &str, y: &str, left: Derivation, right: Derivation) -> Self {
        let a2 = right
            .conclusion
            .context
            .types_of(y)
            .next()
            .cloned()
            .unwrap_or_else(|| panic!("l_arr: {y} not bound in the right premiss"));
        let a1 = left.conclusion.ty.clone();
        let context = left.conclusion.context.with(x, Type::arrow(a1, a2));
        let (_, rest) = right.conclusion.subject.spine();
        let n = rest.len();
        let subject = Term::apps(
            Term::var(x),
            std::iter::once(left.conclusion.subject.clone()).chain(rest.into_iter().cloned()),
        );
        let conclusion = Sequent { context, subject, ty: right.conclusion.ty.clone() };
        Self::node(
            left.system,
            Rule::LArr,
            conclusion,
            Detail { n: Some(n), var: Some(x.to_string()), fresh: Some(y.to_string()) },
            vec![left, right],
        )
    }

    /// (L∩) on `x`, concluding in `context`.
    pub fn l_cap(context: SeqContext, x: &str, premiss: Derivation) -> Self {
        let n = premiss.conclusion.subject.spine().1.len();
        let conclusion = Sequent { context, ..premiss.conclusion.clone() };
        Self::node(
            premiss.system,
            Rule::LCap,
            conclusion,
            Detail { n: Some(n), var: Some(x.to_string()), ..Detail::default() },
            vec![premiss],
        )
    }

    // -----------------------------------------------------------------------
    // Queries

    pub fn conclusion(&self) -> &Sequent {
        &self.conclusion
    }

    pub fn context(&self) -> &SeqContext {
        &self.conclusion.context
    }

    pub fn subject(&self) -> &Term {
        &self.conclusion.subject
    }

    pub fn ty(&self) -> &Type {
        &self.conclusion.ty
    }

    pub fn height(&self) -> usize {
        1 + self.premisses.iter().map(Derivation::height).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.premisses.iter().map(Derivation::size).sum::<usize>()
    }

    /// Pre-order iterator over all nodes.
    pub fn nodes(&self) -> Vec<&Derivation> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(d) = stack.pop() {
            out.push(d);
            stack.extend(d.premisses.iter().rev());
        }
        out
    }

    /// Every variable name mentioned anywhere in the tree.
    pub fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for d in self.nodes() {
            d.conclusion.subject.names(&mut out);
            out.extend(d.conclusion.context.vars());
            out.extend(d.detail.var.iter().cloned());
            out.extend(d.detail.fresh.iter().cloned());
        }
        out
    }

    /// Same tree, tagged with another system. The result is only valid if
    /// every rule and type is admissible there.
    pub fn rebrand(&self, system: System) -> Derivation {
        Derivation {
            system,
            rule: self.rule,
            conclusion: self.conclusion.clone(),
            detail: self.detail.clone(),
            premisses: self.premisses.iter().map(|p| p.rebrand(system)).collect(),
        }
    }

    /// Replaces the root subject by an α-equivalent term.
    pub fn with_subject(mut self, subject: Term) -> Derivation {
        debug_assert!(alpha_eq(&self.conclusion.subject, &subject), "{} vs {}", self.conclusion.subject, subject);
        self.conclusion.subject = subject;
        self
    }

    pub fn with_context(mut self, context: SeqContext) -> Derivation {
        self.conclusion.context = context;
        self
    }
}

pub fn conclusion_of(d: &Derivation) -> &Sequent {
    &d.conclusion
}

/// Number of nodes per rule.
pub fn rule_census(d: &Derivation) -> BTreeMap<Rule, usize> {
    let mut out = BTreeMap::new();
    for n in d.nodes() {
        *out.entry(n.rule).or_insert(0) += 1;
    }
    out
}

// ---------------------------------------------------------------------------
// Checking

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    /// Conclusion and premisses are not related as the rule requires.
    RuleMismatch,
    /// A freshness or context side condition fails.
    SideCondition,
    /// The rule, a type or a term is not admitted by the system.
    SystemViolation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    /// Premiss indices from the root to the offending node.
    pub path: Vec<usize>,
    pub rule: Rule,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = if self.path.is_empty() {
            "root".to_string()
        } else {
            self.path.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
        };
        write!(f, "{path} ({}): {:?}: {}", self.rule, self.kind, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub diagnostics: Vec<Diagnostic>,
}

impl CheckReport {
    pub fn is_valid(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return f.write_str("valid");
        }
        for d in &self.diagnostics {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}

pub fn check_derivation(d: &Derivation) -> CheckReport {
    let mut report = CheckReport::default();
    let mut stack: Vec<(&Derivation, Vec<usize>)> = vec![(d, vec![])];
    while let Some((node, path)) = stack.pop() {
        for (kind, message) in check_node(node, d.system) {
            report.diagnostics.push(Diagnostic { path: path.clone(), rule: node.rule, kind, message });
        }
        for (i, p) in node.premisses.iter().enumerate() {
            let mut pp = path.clone();
            pp.push(i);
            stack.push((p, pp));
        }
    }
    report.diagnostics.sort_by(|a, b| a.path.cmp(&b.path));
    report
}

type Problems = Vec<(DiagnosticKind, String)>;

fn check_node(d: &Derivation, root_system: System) -> Problems {
    use DiagnosticKind::*;
    let mut out: Problems = Vec::new();
    let sys = d.system;
    let c = &d.conclusion;

    if sys != root_system {
        out.push((SystemViolation, format!("node tagged {sys} inside a {root_system} derivation")));
    }
    if !d.rule.admissible_in(sys) {
        out.push((SystemViolation, format!("rule {} is not part of {sys}", d.rule)));
    }
    if !sys.has_omega() {
        if !c.ty.is_omega_free() || !c.context.is_omega_free() {
            out.push((SystemViolation, "ω occurs in an ω-free system".into()));
        }
        if c.subject.contains_bottom() {
            out.push((SystemViolation, "⊥ occurs in an ω-free system".into()));
        }
    }
    if sys.is_nd() && !c.context.is_functional() {
        out.push((SystemViolation, "natural-deduction context binds a variable twice".into()));
    }

    let arity = match d.rule {
        Rule::Ax | Rule::Omega => 0,
        Rule::ArrI | Rule::RArr | Rule::CapEL | Rule::CapER | Rule::BetaL | Rule::LCap => 1,
        Rule::ArrE | Rule::CapI | Rule::RCap | Rule::BetaS | Rule::LArr => 2,
    };
    if d.premisses.len() != arity {
        out.push((RuleMismatch, format!("expected {arity} premisses, found {}", d.premisses.len())));
        return out;
    }
    let p = &d.premisses;
    let mismatch = |out: &mut Problems, m: String| out.push((RuleMismatch, m));
    let side = |out: &mut Problems, m: String| out.push((SideCondition, m));

    match d.rule {
        Rule::Ax => match &c.subject {
            Term::Var(x) => {
                if d.detail.var.as_deref().is_some_and(|v| v != x) {
                    mismatch(&mut out, "axiom variable does not match the subject".into());
                }
                if !c.context.contains(x, &c.ty) {
                    mismatch(&mut out, format!("{x}:{} is not in the context", c.ty));
                }
            }
            other => mismatch(&mut out, format!("axiom subject {other} is not a variable")),
        },
        Rule::Omega => {
            if c.ty != Type::Omega {
                mismatch(&mut out, "(ω) must conclude type ω".into());
            }
        }
        Rule::ArrI | Rule::RArr => {
            let Some(x) = d.detail.var.as_deref() else {
                mismatch(&mut out, "missing binder".into());
                return out;
            };
            let pc = &p[0].conclusion;
            let Type::Arrow(a, b) = &c.ty else {
                mismatch(&mut out, "conclusion type is not an arrow".into());
                return out;
            };
            if pc.ty != **b {
                mismatch(&mut out, "premiss type is not the codomain".into());
            }
            if c.context.binds(x) {
                side(&mut out, format!("binder {x} occurs in Γ"));
            }
            if pc.context != c.context.with(x, (**a).clone()) {
                mismatch(&mut out, format!("premiss context is not Γ,{x}:{a}"));
            }
            if !alpha_eq(&Term::lam(x, pc.subject.clone()), &c.subject) {
                mismatch(&mut out, "subject is not the abstraction of the premiss subject".into());
            }
        }
        Rule::ArrE => {
            let (f, a) = (&p[0].conclusion, &p[1].conclusion);
            match &f.ty {
                Type::Arrow(dom, cod) if **dom == a.ty && **cod == c.ty => {}
                _ => mismatch(&mut out, "premiss types do not fit A→B, A ⊢ B".into()),
            }
            if f.context != c.context || a.context != c.context {
                mismatch(&mut out, "premiss contexts differ from the conclusion".into());
            }
            if !alpha_eq(&Term::app(f.subject.clone(), a.subject.clone()), &c.subject) {
                mismatch(&mut out, "subject is not the application of the premiss subjects".into());
            }
        }
        Rule::CapI | Rule::RCap => {
            let (l, r) = (&p[0].conclusion, &p[1].conclusion);
            if c.ty != Type::inter(l.ty.clone(), r.ty.clone()) {
                mismatch(&mut out, "conclusion type is not the intersection of the premiss types".into());
            }
            if l.context != c.context || r.context != c.context {
                mismatch(&mut out, "premiss contexts differ from the conclusion".into());
            }
            if !alpha_eq(&l.subject, &c.subject) || !alpha_eq(&r.subject, &c.subject) {
                mismatch(&mut out, "premiss subjects differ from the conclusion".into());
            }
        }
        Rule::CapEL | Rule::CapER => {
            let pc = &p[0].conclusion;
            match &pc.ty {
                Type::Inter(a, b) => {
                    let want = if d.rule == Rule::CapEL { a } else { b };
                    if **want != c.ty {
                        mismatch(&mut out, "conclusion type is not the selected component".into());
                    }
                }
                _ => mismatch(&mut out, "premiss type is not an intersection".into()),
            }
            if pc.context != c.context || !alpha_eq(&pc.subject, &c.subject) {
                mismatch(&mut out, "premiss context or subject differs from the conclusion".into());
            }
        }
        Rule::BetaS | Rule::BetaL => {
            let (head, args) = c.subject.spine();
            let Term::Lam(x, body) = head else {
                mismatch(&mut out, "subject is not headed by a β-redex".into());
                return out;
            };
            if args.is_empty() {
                mismatch(&mut out, "subject is not headed by a β-redex".into());
                return out;
            }
            let n = args.len() - 1;
            if d.detail.n.is_some_and(|k| k != n) {
                mismatch(&mut out, format!("recorded spine length {:?} but the subject has {n}", d.detail.n));
            }
            let contractum = Term::apps(substitute(body, x, args[0]), args[1..].iter().map(|t| (*t).clone()));
            let pc = &p[0].conclusion;
            if !alpha_eq(&pc.subject, &contractum) {
                mismatch(&mut out, format!("left premiss subject is not the contractum {contractum}"));
            }
            if pc.context != c.context || pc.ty != c.ty {
                mismatch(&mut out, "left premiss context or type differs from the conclusion".into());
            }
            if d.rule == Rule::BetaS {
                let ac = &p[1].conclusion;
                if !alpha_eq(&ac.subject, args[0]) {
                    mismatch(&mut out, "right premiss does not type the argument".into());
                }
                if ac.context != c.context {
                    mismatch(&mut out, "right premiss context differs from the conclusion".into());
                }
            }
        }
        Rule::LArr => {
            let (head, args) = c.subject.spine();
            let Term::Var(x) = head else {
                mismatch(&mut out, "subject is not headed by a variable".into());
                return out;
            };
            if args.is_empty() {
                mismatch(&mut out, "subject has no argument".into());
                return out;
            }
            let n = args.len() - 1;
            if d.detail.n.is_some_and(|k| k != n) || d.detail.var.as_deref().is_some_and(|v| v != x) {
                mismatch(&mut out, "recorded spine does not match the subject".into());
            }
            let Some(y) = d.detail.fresh.as_deref() else {
                mismatch(&mut out, "missing fresh variable".into());
                return out;
            };
            let (l, r) = (&p[0].conclusion, &p[1].conclusion);
            let gamma = &l.context;
            let y_types: Vec<&Type> = r.context.types_of(y).collect();
            if y_types.len() != 1 {
                mismatch(&mut out, format!("right premiss must bind {y} exactly once"));
                return out;
            }
            let a2 = y_types[0].clone();
            if gamma.binds(y) {
                side(&mut out, format!("{y} occurs in Γ"));
            }
            if args[1..].iter().any(|t| t.has_free(y)) {
                side(&mut out, format!("{y} occurs free in the remaining arguments"));
            }
            if r.context.without_var(y) != *gamma {
                mismatch(&mut out, format!("right premiss context is not Γ,{y}:{a2}"));
            }
            if c.context != gamma.with(x.clone(), Type::arrow(l.ty.clone(), a2)) {
                mismatch(&mut out, "conclusion context is not Γ,x:A1→A2".into());
            }
            if !alpha_eq(&l.subject, args[0]) {
                mismatch(&mut out, "left premiss does not type the first argument".into());
            }
            let rest = Term::apps(Term::var(y), args[1..].iter().map(|t| (*t).clone()));
            if !alpha_eq(&r.subject, &rest) {
                mismatch(&mut out, "right premiss subject is not y N1 … Nn".into());
            }
            if r.ty != c.ty {
                mismatch(&mut out, "right premiss type differs from the conclusion".into());
            }
        }
        Rule::LCap => {
            let (head, args) = c.subject.spine();
            let Term::Var(x) = head else {
                mismatch(&mut out, "subject is not headed by a variable".into());
                return out;
            };
            if d.detail.n.is_some_and(|k| k != args.len()) || d.detail.var.as_deref().is_some_and(|v| v != x) {
                mismatch(&mut out, "recorded spine does not match the subject".into());
            }
            let pc = &p[0].conclusion;
            if !alpha_eq(&pc.subject, &c.subject) || pc.ty != c.ty {
                mismatch(&mut out, "premiss subject or type differs from the conclusion".into());
            }
            let fits = c.context.types_of(x).any(|t| match t {
                Type::Inter(a1, a2) => {
                    let here = SeqContext::singleton(x.clone(), t.clone());
                    let there = SeqContext::from_pairs([(x.clone(), (**a1).clone()), (x.clone(), (**a2).clone())]);
                    c.context.common_base(&here, &pc.context, &there).is_some()
                }
                _ => false,
            });
            if !fits {
                mismatch(&mut out, format!("no binding {x}:A1∩A2 splits into the premiss context"));
            }
        }
    }
    out
}

/// Supplies variable names from the reserved `#g0, #g1, …` namespace, which
/// the parser accepts but ordinary input rarely uses.
#[derive(Clone, Debug, Default)]
pub struct NameSupply {
    next: usize,
    taken: BTreeSet<String>,
}

impl NameSupply {
    /// A supply that avoids every name in `taken`.
    pub fn avoiding(taken: impl IntoIterator<Item = String>) -> Self {
        let taken: BTreeSet<String> = taken.into_iter().collect();
        let next = taken
            .iter()
            .filter_map(|n| n.strip_prefix("#g")?.parse::<usize>().ok())
            .max()
            .map_or(0, |k| k + 1);
        NameSupply { next, taken }
    }

    pub fn for_derivation(d: &Derivation) -> Self {
        Self::avoiding(d.names())
    }

    pub fn for_term(t: &Term) -> Self {
        let mut names = BTreeSet::new();
        t.names(&mut names);
        Self::avoiding(names)
    }

    /// Marks more names as used.
    pub fn reserve(&mut self, names: impl IntoIterator<Item = String>) {
        for n in names {
            if let Some(k) = n.strip_prefix("#g").and_then(|k| k.parse::<usize>().ok()) {
                self.next = self.next.max(k + 1);
            }
            self.taken.insert(n);
        }
    }

    pub fn fresh(&mut self) -> String {
        loop {
            let name = format!("#g{}", self.next);
            self.next += 1;
            if self.taken.insert(name.clone()) {
                return name;
            }
        }
    }
}
