//! Derivation-to-derivation transformations: weakening, substitution,
//! generation, subject expansion and the translations between systems.
//!
//! Every function takes whole trees and returns new ones. Variables
//! introduced along the way come from the `#g` namespace (see
//! [`NameSupply`]), chosen fresh for all inputs of the call.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::derivation::{Derivation, NameSupply, Rule, System};
use crate::term::{Position, Term};
use crate::types::{SeqContext, Type};

mod nd;
mod seq;

pub use nd::{
    gen_abs, gen_app, inv_subst, le_closure, nd_adapt, nd_rebind, nd_strengthen, nd_subst, seq_to_nd, subject_expand,
    InvSubst,
};
pub use seq::{app_closure, app_var, inters_inv, merge_binding, nd_to_seq, split_binding, subst_closure};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("expected an arrow type, found {0}")]
    NotArrowType(Type),
    #[error("expected an intersection type, found {0}")]
    NotIntersectionType(Type),
    #[error("variable {0} is not fresh")]
    VariableNotFresh(String),
    #[error("name {0} already occurs in the derivation")]
    NotFresh(String),
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("type mismatch: expected {expected}, found {found}")]
    TypeMismatch { expected: Type, found: Type },
    #[error("binding {0} not found in the root context")]
    BindingNotFound(String),
    #[error("{from} is not below {to}")]
    NotLeq { from: Type, to: Type },
    #[error("subject {0} is not an application")]
    SubjectNotApplication(Term),
    #[error("subject {0} is not an abstraction")]
    SubjectNotAbstraction(Term),
    #[error("type {0} is ω-dominated")]
    OmegaDominatedType(Type),
    #[error("decomposition mismatch: {expected} is not the subject {found}")]
    DecompositionMismatch { expected: Term, found: Term },
    #[error("no redex at {0}")]
    NotARedex(Position),
    #[error("subject mismatch: expected {expected}, found {found}")]
    SubjectMismatch { expected: Term, found: Term },
    #[error("ω occurs at node {0:?}")]
    OmegaFound(Vec<usize>),
    #[error("operation needs a {expected} derivation, got {found}")]
    WrongSystem { expected: &'static str, found: System },
}

pub type Result<T> = std::result::Result<T, TransformError>;

const RED_ZONE: usize = 64 * 1024;
const STACK_CHUNK: usize = 4 * 1024 * 1024;

pub(crate) fn grow<R>(f: impl FnOnce() -> R) -> R {
    stacker::maybe_grow(RED_ZONE, STACK_CHUNK, f)
}

pub(crate) fn supply_for<'a>(ds: impl IntoIterator<Item = &'a Derivation>, terms: &[&Term], extra: &[&str]) -> NameSupply {
    let mut names = BTreeSet::new();
    for d in ds {
        names.extend(d.names());
    }
    for t in terms {
        t.names(&mut names);
    }
    names.extend(extra.iter().map(|s| s.to_string()));
    NameSupply::avoiding(names)
}

fn require(d: &Derivation, ok: bool, expected: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(TransformError::WrongSystem { expected, found: d.system })
    }
}

// ---------------------------------------------------------------------------
// Renaming

/// Renames every occurrence of `y`, free or bound, to `z`.
fn rename_all(t: &Term, y: &str, z: &str) -> Term {
    match t {
        Term::Var(v) if v == y => Term::var(z),
        Term::Var(_) | Term::Bottom => t.clone(),
        Term::App(f, a) => Term::app(rename_all(f, y, z), rename_all(a, y, z)),
        Term::Lam(v, b) => Term::lam(if v == y { z } else { v }, rename_all(b, y, z)),
    }
}

pub(crate) fn rename_unchecked(d: &Derivation, y: &str, z: &str) -> Derivation {
    grow(|| {
        let swap = |v: &Option<String>| v.as_ref().map(|v| if v == y { z.to_string() } else { v.clone() });
        let mut out = d.clone();
        out.conclusion.subject = rename_all(&d.conclusion.subject, y, z);
        out.conclusion.context = d.conclusion.context.rename(y, z);
        out.detail.var = swap(&d.detail.var);
        out.detail.fresh = swap(&d.detail.fresh);
        out.premisses = d.premisses.iter().map(|p| rename_unchecked(p, y, z)).collect();
        out
    })
}

/// Renames `y` to `z` throughout `d`: subjects (bound and free
/// occurrences), contexts and recorded binders. `z` must not occur in `d`.
pub fn rename_var(d: &Derivation, y: &str, z: &str) -> Result<Derivation> {
    if y != z && d.names().contains(z) {
        return Err(TransformError::NotFresh(z.to_string()));
    }
    Ok(rename_unchecked(d, y, z))
}

/// Pushes the root subject's variable names down the tree: every premiss
/// whose subject is determined by its parent's gets the parent's spelling,
/// and (→I)/(R→) binders are renamed to match where the name is unused
/// in the premiss. The result is α-equal to `d` node by node.
pub(crate) fn align_binders(d: &Derivation) -> Derivation {
    align(d, d.subject())
}

fn align(d: &Derivation, expected: &Term) -> Derivation {
    grow(|| {
        let mut out = d.clone();
        if crate::term::alpha_eq(expected, d.subject()) {
            out.conclusion.subject = expected.clone();
        }
        let subject = out.conclusion.subject.clone();
        let keep = |p: &Derivation| p.subject().clone();
        let wanted: Vec<Term> = match (d.rule, &subject) {
            (Rule::ArrI | Rule::RArr, Term::Lam(x, body)) => {
                let g = d.detail.var.clone().expect("binder");
                if *x == g {
                    vec![(**body).clone()]
                } else if !d.premisses[0].names().contains(x.as_str()) {
                    out.premisses[0] = rename_unchecked(&d.premisses[0], &g, x);
                    out.detail.var = Some(x.clone());
                    vec![(**body).clone()]
                } else {
                    vec![keep(&d.premisses[0])]
                }
            }
            (Rule::ArrE, Term::App(f, a)) => vec![(**f).clone(), (**a).clone()],
            (Rule::CapI | Rule::CapEL | Rule::CapER | Rule::RCap | Rule::LCap, _) => {
                out.premisses.iter().map(|_| subject.clone()).collect()
            }
            (Rule::LArr, _) => {
                let (_, args) = subject.spine();
                let y = d.detail.fresh.clone().expect("fresh variable");
                let rest = Term::apps(Term::var(y), args[1..].iter().map(|t| (*t).clone()));
                vec![args[0].clone(), rest]
            }
            (Rule::BetaS, _) => {
                let (_, args) = subject.spine();
                vec![keep(&d.premisses[0]), args[0].clone()]
            }
            _ => out.premisses.iter().map(keep).collect(),
        };
        out.premisses = out.premisses.iter().zip(&wanted).map(|(p, w)| align(p, w)).collect();
        out
    })
}

// ---------------------------------------------------------------------------
// Weakening

/// Adds `x:a` to every context, renaming inner binders named `x`.
pub(crate) fn weaken_with(d: &Derivation, x: &str, a: &Type, sup: &mut NameSupply) -> Derivation {
    grow(|| {
        let mut d = d.clone();
        match d.rule {
            Rule::ArrI | Rule::RArr if d.detail.var.as_deref() == Some(x) => {
                let g = sup.fresh();
                let premiss = rename_unchecked(&d.premisses[0], x, &g);
                let dom = premiss.context().types_of(&g).next().cloned().expect("binder bound in premiss");
                d = Derivation::arrow_intro(d.conclusion.context.clone(), &g, dom, premiss);
            }
            Rule::LArr if d.detail.fresh.as_deref() == Some(x) => {
                let g = sup.fresh();
                d.premisses[1] = rename_unchecked(&d.premisses[1], x, &g);
                d.detail.fresh = Some(g);
            }
            _ => {}
        }
        d.conclusion.context.insert(x, a.clone());
        d.premisses = d.premisses.iter().map(|p| weaken_with(p, x, a, sup)).collect();
        d
    })
}

/// Weakening for the sequent-style systems: `Γ ⊢ M : B` becomes
/// `Γ, x:a ⊢ M : B`.
pub fn weaken_seq(d: &Derivation, x: &str, a: &Type) -> Result<Derivation> {
    require(d, d.system.is_sequent(), "sequent-style")?;
    let mut sup = supply_for([d], &[], &[x]);
    Ok(weaken_with(d, x, a, &mut sup))
}

/// Weakening for natural deduction; `z` must not be bound at the root.
pub fn weaken_nd(d: &Derivation, z: &str, a: &Type) -> Result<Derivation> {
    require(d, d.system.is_nd(), "natural-deduction")?;
    if d.context().binds(z) {
        return Err(TransformError::VariableNotFresh(z.to_string()));
    }
    let mut sup = supply_for([d], &[], &[z]);
    Ok(weaken_with(d, z, a, &mut sup))
}

// ---------------------------------------------------------------------------
// Folding intersections of derivations

/// Combines derivations of one subject in one context into a derivation
/// of the canonical intersection of their types (see
/// [`crate::types::fold_canonical`]). Duplicated types are used once.
pub(crate) fn fold_canonical_derivs(ds: Vec<Derivation>) -> Derivation {
    let mut keyed: Vec<(String, Derivation)> = ds.into_iter().map(|d| (d.ty().to_string(), d)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.dedup_by(|a, b| a.0 == b.0);
    keyed.into_iter().map(|(_, d)| d).reduce(Derivation::cap_intro).expect("non-empty fold")
}

/// Left fold with ∩-introduction in the given order.
pub(crate) fn fold_in_order(ds: Vec<Derivation>) -> Derivation {
    ds.into_iter().reduce(Derivation::cap_intro).expect("non-empty fold")
}

// ---------------------------------------------------------------------------
// (Beta)ˢ / (Beta)ℓ and ω

/// Drops the argument premiss of every (Beta)ˢ node: SEQω to SEQℓω (or
/// SEQ to SEQℓ).
pub fn betas_to_betal(d: &Derivation) -> Result<Derivation> {
    let target = match d.system {
        System::SeqOmega => System::SeqLOmega,
        System::Seq => System::SeqL,
        _ => return Err(TransformError::WrongSystem { expected: "ls or lsw", found: d.system }),
    };
    fn go(d: &Derivation, sys: System) -> Derivation {
        grow(|| {
            let mut out = Derivation {
                system: sys,
                rule: d.rule,
                conclusion: d.conclusion.clone(),
                detail: d.detail.clone(),
                premisses: d.premisses.iter().map(|p| go(p, sys)).collect(),
            };
            if d.rule == Rule::BetaS {
                out.rule = Rule::BetaL;
                out.premisses.truncate(1);
            }
            out
        })
    }
    Ok(go(d, target))
}

/// Gives every (Beta)ℓ node an (ω) argument premiss: SEQℓω or SEQℓ to SEQω.
pub fn betal_to_betas(d: &Derivation) -> Result<Derivation> {
    if !matches!(d.system, System::SeqL | System::SeqLOmega) {
        return Err(TransformError::WrongSystem { expected: "ll or llw", found: d.system });
    }
    fn go(d: &Derivation) -> Derivation {
        grow(|| {
            let mut out = Derivation {
                system: System::SeqOmega,
                rule: d.rule,
                conclusion: d.conclusion.clone(),
                detail: d.detail.clone(),
                premisses: d.premisses.iter().map(go).collect(),
            };
            if d.rule == Rule::BetaL {
                out.rule = Rule::BetaS;
                let (_, args) = d.subject().spine();
                out.premisses
                    .push(Derivation::omega(System::SeqOmega, d.context().clone(), args[0].clone()));
            }
            out
        })
    }
    Ok(go(d))
}

/// Rebrands an ω-free SEQℓω derivation as SEQℓ, failing at the first node
/// that mentions ω.
pub fn omega_erase(d: &Derivation) -> Result<Derivation> {
    require(d, matches!(d.system, System::SeqLOmega | System::SeqL), "ll or llw")?;
    let mut stack: Vec<(&Derivation, Vec<usize>)> = vec![(d, vec![])];
    while let Some((n, path)) = stack.pop() {
        let c = &n.conclusion;
        if n.rule == Rule::Omega || !c.ty.is_omega_free() || !c.context.is_omega_free() || c.subject.contains_bottom() {
            return Err(TransformError::OmegaFound(path));
        }
        for (i, p) in n.premisses.iter().enumerate().rev() {
            let mut pp = path.clone();
            pp.push(i);
            stack.push((p, pp));
        }
    }
    Ok(d.rebrand(System::SeqL))
}

/// The x-bindings of a context as a set of types.
pub(crate) fn types_of_var(g: &SeqContext, x: &str) -> Vec<Type> {
    g.types_of(x).cloned().collect()
}

