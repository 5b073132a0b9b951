//! Lemmas about the sequent-style systems.

use crate::derivation::{Derivation, NameSupply, Rule, System};
use crate::term::{alpha_eq, substitute, Term};
use crate::types::{SeqContext, Type};

use super::{align_binders, grow, rename_unchecked, require, supply_for, types_of_var, weaken_with, Result, TransformError};

// ---------------------------------------------------------------------------
// Γ ⊢ M : A→B  gives  Γ, x:A ⊢ M x : B

/// From `Γ ⊢ M : A→B` builds `Γ, x:A ⊢ M x : B`.
pub fn app_var(d: &Derivation, x: &str) -> Result<Derivation> {
    require(d, d.system.is_sequent(), "sequent-style")?;
    let mut sup = supply_for([d], &[], &[x]);
    app_var_with(d, x, &mut sup)
}

pub(crate) fn app_var_with(d: &Derivation, x: &str, sup: &mut NameSupply) -> Result<Derivation> {
    if !matches!(d.ty(), Type::Arrow(..)) {
        return Err(TransformError::NotArrowType(d.ty().clone()));
    }
    if d.context().binds(x) || d.subject().has_free(x) {
        return Err(TransformError::VariableNotFresh(x.to_string()));
    }
    let subject = Term::app(d.subject().clone(), Term::var(x));
    // x may still occur bound inside the tree; move those out of the way.
    let d = if d.names().contains(x) { rename_unchecked(d, x, &sup.fresh()) } else { d.clone() };
    Ok(app_var_go(&d, x, sup).with_subject(subject))
}

fn app_var_go(d: &Derivation, x: &str, sup: &mut NameSupply) -> Derivation {
    grow(|| {
        let Type::Arrow(a, b) = d.ty() else { unreachable!("checked by the caller and preserved by recursion") };
        let (a, b) = ((**a).clone(), (**b).clone());
        let sys = d.system;
        let gx = d.context().with(x, a.clone());
        let subject = Term::app(d.subject().clone(), Term::var(x));
        match d.rule {
            Rule::Ax => {
                let y = d.detail.var.clone().expect("axiom variable");
                let r = sup.fresh();
                let left = Derivation::ax(sys, gx.clone(), x, a);
                let right = Derivation::ax(sys, gx.with(r.clone(), b.clone()), &r, b);
                Derivation::l_arr(&y, &r, left, right)
            }
            Rule::BetaS | Rule::BetaL => {
                let left = app_var_go(&d.premisses[0], x, sup);
                let arg = d.premisses.get(1).map(|p| weaken_with(p, x, &a, sup));
                Derivation::beta(subject, d.detail.n.unwrap_or(0) + 1, left, arg)
            }
            Rule::RArr => {
                let y = d.detail.var.clone().expect("binder");
                let body = rename_unchecked(&d.premisses[0], &y, x);
                let arg = (sys == System::Seq || sys == System::SeqOmega).then(|| Derivation::ax(sys, gx.clone(), x, a));
                Derivation::beta(subject, 0, body, arg)
            }
            Rule::LArr => {
                let z = d.detail.var.clone().expect("principal variable");
                let y = d.detail.fresh.clone().expect("fresh variable");
                let left = weaken_with(&d.premisses[0], x, &a, sup);
                let right = app_var_go(&d.premisses[1], x, sup);
                Derivation::l_arr(&z, &y, left, right)
            }
            Rule::LCap => {
                let z = d.detail.var.clone().expect("principal variable");
                Derivation::l_cap(gx, &z, app_var_go(&d.premisses[0], x, sup))
            }
            other => unreachable!("{other} cannot conclude an arrow type in a sequent system"),
        }
    })
}

// ---------------------------------------------------------------------------
// Inversion for ∩

/// From `Γ ⊢ M : A∩B` builds `Γ ⊢ M : A` and `Γ ⊢ M : B`.
pub fn inters_inv(d: &Derivation) -> Result<(Derivation, Derivation)> {
    require(d, d.system.is_sequent(), "sequent-style")?;
    if !matches!(d.ty(), Type::Inter(..)) {
        return Err(TransformError::NotIntersectionType(d.ty().clone()));
    }
    Ok(inters_inv_go(d))
}

fn inters_inv_go(d: &Derivation) -> (Derivation, Derivation) {
    grow(|| {
        let Type::Inter(a, b) = d.ty() else { unreachable!() };
        let sys = d.system;
        match d.rule {
            Rule::RCap => (d.premisses[0].clone(), d.premisses[1].clone()),
            Rule::Ax => {
                let x = d.detail.var.clone().expect("axiom variable");
                let g = d.context().with(x.clone(), (**a).clone()).with(x.clone(), (**b).clone());
                let one = |t: &Type| Derivation::l_cap(d.context().clone(), &x, Derivation::ax(sys, g.clone(), &x, t.clone()));
                (one(a), one(b))
            }
            Rule::BetaS | Rule::BetaL => {
                let (l, r) = inters_inv_go(&d.premisses[0]);
                let n = d.detail.n.unwrap_or(0);
                let arg = d.premisses.get(1).cloned();
                (
                    Derivation::beta(d.subject().clone(), n, l, arg.clone()),
                    Derivation::beta(d.subject().clone(), n, r, arg),
                )
            }
            Rule::LArr => {
                let (l, r) = inters_inv_go(&d.premisses[1]);
                let z = d.detail.var.clone().expect("principal variable");
                let y = d.detail.fresh.clone().expect("fresh variable");
                (
                    Derivation::l_arr(&z, &y, d.premisses[0].clone(), l),
                    Derivation::l_arr(&z, &y, d.premisses[0].clone(), r),
                )
            }
            Rule::LCap => {
                let (l, r) = inters_inv_go(&d.premisses[0]);
                let z = d.detail.var.clone().expect("principal variable");
                (Derivation::l_cap(d.context().clone(), &z, l), Derivation::l_cap(d.context().clone(), &z, r))
            }
            other => unreachable!("{other} cannot conclude an intersection in a sequent system"),
        }
    })
}

// ---------------------------------------------------------------------------
// Γ, x:A1, x:A2  versus  Γ, x:A1∩A2

fn merged_context(g: &SeqContext, x: &str, a1: &Type, a2: &Type) -> SeqContext {
    let mut g = g.clone();
    g.remove(x, a1);
    g.remove(x, a2);
    g.with(x, Type::inter(a1.clone(), a2.clone()))
}

fn split_context(g: &SeqContext, x: &str, a1: &Type, a2: &Type) -> SeqContext {
    let mut g = g.clone();
    g.remove(x, &Type::inter(a1.clone(), a2.clone()));
    g.with(x, a1.clone()).with(x, a2.clone())
}

/// From `Γ, x:A1, x:A2 ⊢ M : B` builds `Γ, x:A1∩A2 ⊢ M : B`, where Γ
/// keeps no binding `x:A1` or `x:A2`.
pub fn merge_binding(d: &Derivation, x: &str, a1: &Type, a2: &Type) -> Result<Derivation> {
    require(d, d.system.is_sequent(), "sequent-style")?;
    for a in [a1, a2] {
        if !d.context().contains(x, a) {
            return Err(TransformError::BindingNotFound(format!("{x}:{a}")));
        }
    }
    Ok(merge_go(d, x, a1, a2))
}

fn merge_go(d: &Derivation, x: &str, a1: &Type, a2: &Type) -> Derivation {
    grow(|| {
        let ctx = merged_context(d.context(), x, a1, a2);
        if matches!(d.subject().spine().0, Term::Var(h) if h == x) {
            return Derivation::l_cap(ctx, x, d.clone());
        }
        let mut out = d.clone();
        out.conclusion.context = ctx;
        out.premisses = d.premisses.iter().map(|p| merge_go(p, x, a1, a2)).collect();
        out
    })
}

/// From `Γ, x:A1∩A2 ⊢ M : B` builds `Γ, x:A1, x:A2 ⊢ M : B`.
pub fn split_binding(d: &Derivation, x: &str, a1: &Type, a2: &Type) -> Result<Derivation> {
    require(d, d.system.is_sequent(), "sequent-style")?;
    let a = Type::inter(a1.clone(), a2.clone());
    if !d.context().contains(x, &a) {
        return Err(TransformError::BindingNotFound(format!("{x}:{a}")));
    }
    Ok(split_go(d, x, a1, a2))
}

/// Whether an (L∩) node can be read as splitting `x:A1∩A2`.
fn lcap_splits(d: &Derivation, x: &str, a1: &Type, a2: &Type) -> bool {
    let a = Type::inter(a1.clone(), a2.clone());
    d.rule == Rule::LCap
        && d.detail.var.as_deref() == Some(x)
        && d.context()
            .common_base(
                &SeqContext::singleton(x, a),
                d.premisses[0].context(),
                &SeqContext::from_pairs([(x.to_string(), a1.clone()), (x.to_string(), a2.clone())]),
            )
            .is_some()
}

fn split_go(d: &Derivation, x: &str, a1: &Type, a2: &Type) -> Derivation {
    grow(|| {
        let a = Type::inter(a1.clone(), a2.clone());
        if lcap_splits(d, x, a1, a2) {
            let p = &d.premisses[0];
            return if p.context().contains(x, &a) { split_go(p, x, a1, a2) } else { p.clone() };
        }
        let ctx = split_context(d.context(), x, a1, a2);
        if d.rule == Rule::Ax && d.detail.var.as_deref() == Some(x) && *d.ty() == a {
            return Derivation::cap_intro(
                Derivation::ax(d.system, ctx.clone(), x, a1.clone()),
                Derivation::ax(d.system, ctx, x, a2.clone()),
            );
        }
        let mut out = d.clone();
        out.conclusion.context = ctx;
        out.premisses = d.premisses.iter().map(|p| split_go(p, x, a1, a2)).collect();
        out
    })
}

// ---------------------------------------------------------------------------
// Substitution

/// From `Γ, x:A1, …, x:Am ⊢ P : B` and derivations of `Γ ⊢ N : Ai` builds
/// `Γ ⊢ P[x:=N] : B`.
///
/// The recursion follows a lexicographic measure: the number of
/// connectives in the types given to the substituted variable, then the
/// height of the derivation. Debug builds assert that it decreases.
pub fn subst_closure(d: &Derivation, x: &str, n: &Term, n_derivs: &[Derivation]) -> Result<Derivation> {
    require(d, d.system.is_sequent(), "sequent-style")?;
    let mut sup = supply_for(std::iter::once(d).chain(n_derivs), &[n], &[x]);
    let gamma = match n_derivs.first() {
        Some(dn) => dn.context().clone(),
        None => d.context().without_var(x),
    };
    check_subst_pre(d, x, n, &gamma, n_derivs)?;
    let result = subst_go(d, x, n, &gamma, n_derivs, &mut sup, None)?;
    Ok(result.with_subject(substitute(d.subject(), x, n)))
}

fn check_subst_pre(d: &Derivation, x: &str, n: &Term, gamma: &SeqContext, ns: &[Derivation]) -> Result<()> {
    let bad = |m: String| Err(TransformError::PreconditionViolation(m));
    if gamma.binds(x) {
        return bad(format!("{x} is bound in the context of the argument derivations"));
    }
    if d.context().without_var(x) != *gamma {
        return bad("argument derivations do not share the context of the main derivation".into());
    }
    for dn in ns {
        if dn.context() != gamma {
            return bad("argument derivations differ in context".into());
        }
        if !alpha_eq(dn.subject(), n) {
            return bad(format!("argument derivation types {} rather than {n}", dn.subject()));
        }
        if dn.system != d.system {
            return bad("argument derivations belong to another system".into());
        }
    }
    for t in d.context().types_of(x) {
        if !ns.iter().any(|dn| dn.ty() == t) {
            return bad(format!("no argument derivation of type {t}"));
        }
    }
    Ok(())
}

fn measure(d: &Derivation, x: &str) -> (usize, usize) {
    (d.context().types_of(x).map(Type::connectives).sum(), d.height())
}

fn weaken_all(ns: &[Derivation], y: &str, a: &Type, sup: &mut NameSupply) -> Vec<Derivation> {
    ns.iter().map(|dn| weaken_with(dn, y, a, sup)).collect()
}

/// Brings `p` (a premiss whose context lacks some of `gamma`'s x-free
/// bindings) up to `gamma` plus its own x-bindings.
fn lift_to(p: &Derivation, x: &str, gamma: &SeqContext, sup: &mut NameSupply) -> Derivation {
    let mut p = p.clone();
    for (z, t) in gamma.bindings() {
        if z != x && !p.context().contains(z, t) {
            p = weaken_with(&p, z, t, sup);
        }
    }
    p
}

fn subst_go(
    d: &Derivation,
    x: &str,
    n: &Term,
    gamma: &SeqContext,
    ns: &[Derivation],
    sup: &mut NameSupply,
    bound: Option<(usize, usize)>,
) -> Result<Derivation> {
    grow(|| {
        let here = measure(d, x);
        if let Some(b) = bound {
            debug_assert!(here < b, "substitution measure did not decrease: {here:?} vs {b:?}");
        }
        debug_assert_eq!(d.context().without_var(x), *gamma);
        let sys = d.system;
        let xs = types_of_var(d.context(), x);
        if xs.is_empty() && !d.subject().has_free(x) {
            return Ok(d.clone());
        }
        let lookup = |t: &Type| ns.iter().find(|dn| dn.ty() == t).cloned();
        let rec = |p: &Derivation, g: &SeqContext, ns: &[Derivation], sup: &mut NameSupply| {
            subst_go(p, x, n, g, ns, sup, Some(here))
        };
        let subject = substitute(d.subject(), x, n);
        let fv_n = n.free_vars();

        match d.rule {
            Rule::Ax => {
                let z = d.detail.var.clone().expect("axiom variable");
                if z == x {
                    Ok(lookup(d.ty()).expect("precondition: every x-type has an argument derivation"))
                } else {
                    Ok(Derivation::ax(sys, gamma.clone(), &z, d.ty().clone()))
                }
            }
            Rule::Omega => Ok(Derivation::omega(sys, gamma.clone(), subject)),
            Rule::RCap => {
                let l = rec(&d.premisses[0], gamma, ns, sup)?;
                let r = rec(&d.premisses[1], gamma, ns, sup)?;
                Ok(Derivation::cap_intro(l, r))
            }
            Rule::BetaS | Rule::BetaL => {
                let l = rec(&d.premisses[0], gamma, ns, sup)?;
                let arg = match d.premisses.get(1) {
                    Some(p) => Some(rec(p, gamma, ns, sup)?),
                    None => None,
                };
                Ok(Derivation::beta(subject, d.detail.n.unwrap_or(0), l, arg))
            }
            Rule::RArr => {
                let y = d.detail.var.clone().expect("binder");
                let mut p = d.premisses[0].clone();
                let mut y2 = y.clone();
                if y == x || fv_n.contains(&y) {
                    y2 = sup.fresh();
                    p = rename_unchecked(&p, &y, &y2);
                }
                let Type::Arrow(dom, _) = d.ty() else { unreachable!("(R→) concludes an arrow") };
                let ns2 = weaken_all(ns, &y2, dom, sup);
                let g2 = gamma.with(y2.clone(), (**dom).clone());
                let body = rec(&p, &g2, &ns2, sup)?;
                Ok(Derivation::arrow_intro(gamma.clone(), &y2, (**dom).clone(), body))
            }
            Rule::LArr => {
                let z = d.detail.var.clone().expect("principal variable");
                let y = d.detail.fresh.clone().expect("fresh variable");
                let (p1, p2) = (&d.premisses[0], &d.premisses[1]);
                if z == x {
                    return subst_larr_on_x(d, x, n, gamma, ns, sup, here);
                }
                // Γ's binding for z may have been introduced right here.
                let p1 = lift_to(p1, x, gamma, sup);
                let mut p2 = p2.clone();
                let mut y2 = y.clone();
                if y == x || fv_n.contains(&y) || gamma.binds(&y) || y == z {
                    y2 = sup.fresh();
                    p2 = rename_unchecked(&p2, &y, &y2);
                }
                let a2 = p2.context().types_of(&y2).next().cloned().expect("fresh variable bound");
                let p2 = lift_to(&p2, x, &gamma.with(y2.clone(), a2.clone()), sup);
                let l = rec(&p1, gamma, ns, sup)?;
                let ns2 = weaken_all(ns, &y2, &a2, sup);
                let r = rec(&p2, &gamma.with(y2.clone(), a2), &ns2, sup)?;
                Ok(Derivation::l_arr(&z, &y2, l, r))
            }
            Rule::LCap => {
                let z = d.detail.var.clone().expect("principal variable");
                let p = &d.premisses[0];
                let splitting = d
                    .context()
                    .types_of(&z)
                    .filter_map(|t| match t {
                        Type::Inter(a1, a2) => Some(((**a1).clone(), (**a2).clone())),
                        _ => None,
                    })
                    .find(|(a1, a2)| lcap_splits(d, &z, a1, a2));
                let (a1, a2) = splitting.expect("valid (L∩) node");
                if z == x {
                    // Split the binding for x and invert the argument derivation.
                    let a = Type::inter(a1.clone(), a2.clone());
                    let split = split_go(d, x, &a1, &a2);
                    let dn = lookup(&a).expect("precondition: every x-type has an argument derivation");
                    let (d1, d2) = inters_inv_go(&dn);
                    let mut ns2: Vec<Derivation> = ns.iter().filter(|dn| *dn.ty() != a).cloned().collect();
                    ns2.push(d1);
                    ns2.push(d2);
                    return rec(&split, gamma, &ns2, sup);
                }
                let zc = SeqContext::from_pairs([(z.clone(), a1.clone()), (z.clone(), a2.clone())]);
                let p = lift_to(p, x, &gamma.union(&zc), sup);
                let ns2: Vec<Derivation> = {
                    let once = weaken_all(ns, &z, &a1, sup);
                    weaken_all(&once, &z, &a2, sup)
                };
                let inner = rec(&p, &gamma.union(&zc), &ns2, sup)?;
                Ok(Derivation::l_cap(gamma.clone(), &z, inner))
            }
            other => unreachable!("{other} in a sequent derivation"),
        }
    })
}

/// The (L→) case on the substituted variable itself:
/// `x N0 N1 … Nn` with `x : A1→A2`.
fn subst_larr_on_x(
    d: &Derivation,
    x: &str,
    n: &Term,
    gamma: &SeqContext,
    ns: &[Derivation],
    sup: &mut NameSupply,
    here: (usize, usize),
) -> Result<Derivation> {
    let y = d.detail.fresh.clone().expect("fresh variable");
    let (p1, p2) = (&d.premisses[0], &d.premisses[1]);
    let a1 = p1.ty().clone();
    let mut p2 = p2.clone();
    let mut y2 = y.clone();
    if y == x || n.has_free(&y) || gamma.binds(&y) {
        y2 = sup.fresh();
        p2 = rename_unchecked(&p2, &y, &y2);
    }
    let a2 = p2.context().types_of(&y2).next().cloned().expect("fresh variable bound");
    let arrow = Type::arrow(a1.clone(), a2.clone());
    let dn = ns
        .iter()
        .find(|dn| *dn.ty() == arrow)
        .cloned()
        .expect("precondition: every x-type has an argument derivation");

    // Γ ⊢ N0[x:=N] : A1
    let p1 = lift_to(p1, x, gamma, sup);
    let left = subst_go(&p1, x, n, gamma, ns, sup, Some(here))?;
    let n0 = left.subject().clone();

    // Γ ⊢ N N0' : A2, through Γ, z:A1 ⊢ N z : A2.
    let z = sup.fresh();
    let nz = app_var_go(&dn, &z, sup);
    let head = subst_go(&nz, &z, &n0, gamma, std::slice::from_ref(&left), sup, Some(here))?;

    // Γ, y:A2 ⊢ y N1' … Nn' : B
    let gy = gamma.with(y2.clone(), a2.clone());
    let p2 = lift_to(&p2, x, &gy, sup);
    let ns2 = weaken_all(ns, &y2, &a2, sup);
    let rest = subst_go(&p2, x, n, &gy, &ns2, sup, Some(here))?;

    // Γ ⊢ N N0' N1' … Nn' : B
    let nn0 = head.subject().clone();
    subst_go(&rest, &y2, &nn0, gamma, std::slice::from_ref(&head), sup, Some(here))
}

/// From `Γ ⊢ M : A→B` and `Γ ⊢ N : A` builds `Γ ⊢ M N : B`.
pub fn app_closure(dm: &Derivation, dn: &Derivation) -> Result<Derivation> {
    require(dm, dm.system.is_sequent(), "sequent-style")?;
    let mut sup = supply_for([dm, dn], &[], &[]);
    app_closure_with(dm, dn, &mut sup)
}

pub(crate) fn app_closure_with(dm: &Derivation, dn: &Derivation, sup: &mut NameSupply) -> Result<Derivation> {
    let Type::Arrow(a, _) = dm.ty() else {
        return Err(TransformError::NotArrowType(dm.ty().clone()));
    };
    if **a != *dn.ty() {
        return Err(TransformError::TypeMismatch { expected: (**a).clone(), found: dn.ty().clone() });
    }
    if dm.context() != dn.context() {
        return Err(TransformError::PreconditionViolation("the two derivations have different contexts".into()));
    }
    let x = sup.fresh();
    let mx = app_var_with(dm, &x, sup)?;
    let subject = Term::app(dm.subject().clone(), dn.subject().clone());
    let out = subst_go(&mx, &x, dn.subject(), dn.context(), std::slice::from_ref(dn), sup, None)?;
    Ok(out.with_subject(subject))
}

// ---------------------------------------------------------------------------
// Natural deduction to sequents

/// Translates an ND (NDω) derivation into SEQ (SEQω) with the same root
/// sequent.
pub fn nd_to_seq(d: &Derivation) -> Result<Derivation> {
    require(d, d.system.is_nd(), "natural-deduction")?;
    let target = if d.system.has_omega() { System::SeqOmega } else { System::Seq };
    let mut sup = supply_for([d], &[], &[]);
    Ok(align_binders(&nd_to_seq_go(d, target, &mut sup)?))
}

fn nd_to_seq_go(d: &Derivation, sys: System, sup: &mut NameSupply) -> Result<Derivation> {
    grow(|| {
        let ps = d
            .premisses
            .iter()
            .map(|p| nd_to_seq_go(p, sys, sup))
            .collect::<Result<Vec<_>>>()?;
        let mut ps = ps.into_iter();
        Ok(match d.rule {
            Rule::Ax => Derivation::ax(sys, d.context().clone(), d.detail.var.as_deref().expect("axiom variable"), d.ty().clone()),
            Rule::Omega => Derivation::omega(sys, d.context().clone(), d.subject().clone()),
            Rule::ArrI => {
                let Type::Arrow(dom, _) = d.ty() else { unreachable!() };
                let x = d.detail.var.clone().expect("binder");
                Derivation::arrow_intro(d.context().clone(), &x, (**dom).clone(), ps.next().unwrap())
            }
            Rule::ArrE => {
                let (f, a) = (ps.next().unwrap(), ps.next().unwrap());
                app_closure_with(&f, &a, sup)?.with_subject(d.subject().clone())
            }
            Rule::CapI => Derivation::cap_intro(ps.next().unwrap(), ps.next().unwrap()),
            Rule::CapEL | Rule::CapER => {
                let (l, r) = inters_inv_go(&ps.next().unwrap());
                if d.rule == Rule::CapEL {
                    l
                } else {
                    r
                }
            }
            other => unreachable!("{other} in a natural-deduction derivation"),
        })
    })
}
