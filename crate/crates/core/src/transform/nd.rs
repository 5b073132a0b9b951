//! Lemmas about natural deduction, and the translation from sequents.

use crate::derivation::{Derivation, NameSupply, Rule, System};
use crate::reduce::step;
use crate::term::{alpha_eq, substitute, Dir, Position, Term};
use crate::types::{collapse, fold_canonical, leq, leq_omega, NdContext, SeqContext, Type};

use super::{
    align_binders, fold_canonical_derivs, fold_in_order, grow, rename_unchecked, require, supply_for, weaken_with, Result,
    TransformError,
};

fn below(a: &Type, b: &Type, omega: bool) -> bool {
    if omega {
        leq_omega(a, b)
    } else {
        leq(a, b).unwrap_or(false)
    }
}

// ---------------------------------------------------------------------------
// ≤ on the right

/// From `Γ ⊢ M : A` with `A ≤ b` builds `Γ ⊢ M : b`.
pub fn le_closure(d: &Derivation, b: &Type) -> Result<Derivation> {
    require(d, d.system.is_nd(), "natural-deduction")?;
    if !below(d.ty(), b, d.system.has_omega()) {
        return Err(TransformError::NotLeq { from: d.ty().clone(), to: b.clone() });
    }
    Ok(le_go(d, b))
}

fn le_go(d: &Derivation, b: &Type) -> Derivation {
    if d.ty() == b {
        return d.clone();
    }
    match b {
        Type::Inter(l, r) => Derivation::cap_intro(le_go(d, l), le_go(d, r)),
        Type::Omega => Derivation::omega(d.system, d.context().clone(), d.subject().clone()),
        _ => project(reuse(d, b).clone(), b),
    }
}

/// Looks through ∩-eliminations and ∩-introductions already in `d` for the
/// smallest subtree whose type still has the conjunct `b`. Without this,
/// repeated weakening nests projections of ∩I trees inside each other.
fn reuse<'a>(d: &'a Derivation, b: &Type) -> &'a Derivation {
    if d.ty() == b {
        return d;
    }
    match d.rule {
        Rule::CapEL | Rule::CapER => reuse(&d.premisses[0], b),
        Rule::CapI => {
            let left = &d.premisses[0];
            if left.ty().conjuncts().contains(&b) {
                reuse(left, b)
            } else {
                reuse(&d.premisses[1], b)
            }
        }
        _ => d,
    }
}

/// Follows ∩-eliminations down to the conjunct `b`.
fn project(d: Derivation, b: &Type) -> Derivation {
    if d.ty() == b {
        return d;
    }
    let Type::Inter(l, _) = d.ty() else { unreachable!("{b} is a conjunct of {}", d.ty()) };
    let left = l.conjuncts().contains(&b);
    project(Derivation::cap_elim(d, left), b)
}

// ---------------------------------------------------------------------------
// Context adjustments

/// Replaces the binding `x:T` of the root context by `x:t2` with `t2 ≤ T`.
pub fn nd_rebind(d: &Derivation, x: &str, t2: &Type) -> Result<Derivation> {
    require(d, d.system.is_nd(), "natural-deduction")?;
    let Some(t) = d.context().types_of(x).next().cloned() else {
        return Err(TransformError::BindingNotFound(x.to_string()));
    };
    if !below(t2, &t, d.system.has_omega()) {
        return Err(TransformError::NotLeq { from: t2.clone(), to: t });
    }
    Ok(rebind_go(d, x, &t, t2))
}

/// `d` uses only ∩-rules above axioms on `x`.
fn is_var_tree(d: &Derivation, x: &str) -> bool {
    match d.rule {
        Rule::Ax => d.detail.var.as_deref() == Some(x),
        Rule::CapEL | Rule::CapER | Rule::CapI => d.premisses.iter().all(|p| is_var_tree(p, x)),
        _ => false,
    }
}

fn rebind_go(d: &Derivation, x: &str, t: &Type, t2: &Type) -> Derivation {
    grow(|| {
        let mut ctx = d.context().clone();
        if ctx.remove(x, t) {
            ctx.insert(x, t2.clone());
        }
        if is_var_tree(d, x) {
            return le_go(&Derivation::ax(d.system, ctx, x, t2.clone()), d.ty());
        }
        let mut out = d.clone();
        out.conclusion.context = ctx;
        out.premisses = d.premisses.iter().map(|p| rebind_go(p, x, t, t2)).collect();
        out
    })
}

/// Moves `d` to the context `g`: variables bound in both get `g`'s
/// (smaller) type, variables only in `g` are weakened in.
pub fn nd_adapt(d: &Derivation, g: &NdContext) -> Result<Derivation> {
    let mut sup = supply_for([d], &[], &[]);
    sup.reserve(g.iter().map(|(x, _)| x.clone()));
    adapt_with(d, g, &mut sup)
}

fn adapt_with(d: &Derivation, g: &NdContext, sup: &mut NameSupply) -> Result<Derivation> {
    let mut out = d.clone();
    for (x, _) in NdContext::from_seq(d.context()).expect("functional context").iter() {
        if g.get(x).is_none() {
            return Err(TransformError::PreconditionViolation(format!("{x} is missing from the target context")));
        }
    }
    for (x, t2) in g.iter() {
        let current = out.context().types_of(x).next().cloned();
        out = match current {
            Some(t) if t == *t2 => out,
            Some(_) => nd_rebind(&out, x, t2)?,
            None => weaken_with(&out, x, t2, sup),
        };
    }
    Ok(out)
}

/// Drops `g` from every context. `g` must not be free in the subject.
pub fn nd_strengthen(d: &Derivation, g: &str) -> Result<Derivation> {
    if d.subject().has_free(g) {
        return Err(TransformError::PreconditionViolation(format!("{g} is free in {}", d.subject())));
    }
    fn go(d: &Derivation, g: &str) -> Derivation {
        grow(|| {
            let mut out = d.clone();
            out.conclusion.context = d.context().without_var(g);
            out.premisses = d.premisses.iter().map(|p| go(p, g)).collect();
            out
        })
    }
    Ok(go(d, g))
}

// ---------------------------------------------------------------------------
// Substitution

/// From `Γ, x:A ⊢ P : B` and `Γ ⊢ N : A` builds `Γ ⊢ P[x:=N] : B`.
pub fn nd_subst(d: &Derivation, x: &str, dn: &Derivation) -> Result<Derivation> {
    require(d, d.system.is_nd(), "natural-deduction")?;
    let mut sup = supply_for([d, dn], &[], &[x]);
    nd_subst_with(d, x, dn, &mut sup)
}

fn nd_subst_with(d: &Derivation, x: &str, dn: &Derivation, sup: &mut NameSupply) -> Result<Derivation> {
    if let Some(a) = d.context().types_of(x).next() {
        if a != dn.ty() {
            return Err(TransformError::TypeMismatch { expected: a.clone(), found: dn.ty().clone() });
        }
    }
    if d.context().without_var(x) != *dn.context() {
        return Err(TransformError::PreconditionViolation("contexts do not agree outside x".into()));
    }
    let subject = substitute(d.subject(), x, dn.subject());
    Ok(nd_subst_go(d, x, dn, sup).with_subject(subject))
}

fn nd_subst_go(d: &Derivation, x: &str, dn: &Derivation, sup: &mut NameSupply) -> Derivation {
    grow(|| {
        if !d.subject().has_free(x) && !d.context().binds(x) {
            return d.clone();
        }
        let ctx = d.context().without_var(x);
        let n = dn.subject();
        match d.rule {
            Rule::Ax if d.detail.var.as_deref() == Some(x) => dn.clone(),
            Rule::Ax => Derivation::ax(d.system, ctx, d.detail.var.as_deref().expect("axiom variable"), d.ty().clone()),
            Rule::Omega => Derivation::omega(d.system, ctx, substitute(d.subject(), x, n)),
            Rule::ArrI => {
                let y = d.detail.var.clone().expect("binder");
                let Type::Arrow(dom, _) = d.ty() else { unreachable!() };
                let (mut p, mut y2) = (d.premisses[0].clone(), y.clone());
                if y == x || n.has_free(&y) {
                    y2 = sup.fresh();
                    p = rename_unchecked(&p, &y, &y2);
                }
                let dn2 = weaken_with(dn, &y2, dom, sup);
                let body = nd_subst_go(&p, x, &dn2, sup);
                Derivation::arrow_intro(ctx, &y2, (**dom).clone(), body)
            }
            Rule::ArrE => Derivation::arrow_elim(
                nd_subst_go(&d.premisses[0], x, dn, sup),
                nd_subst_go(&d.premisses[1], x, dn, sup),
            ),
            Rule::CapI => Derivation::cap_intro(
                nd_subst_go(&d.premisses[0], x, dn, sup),
                nd_subst_go(&d.premisses[1], x, dn, sup),
            ),
            Rule::CapEL | Rule::CapER => {
                Derivation::cap_elim(nd_subst_go(&d.premisses[0], x, dn, sup), d.rule == Rule::CapEL)
            }
            other => unreachable!("{other} in a natural-deduction derivation"),
        }
    })
}

// ---------------------------------------------------------------------------
// Generation

fn check_not_dominated(d: &Derivation) -> Result<()> {
    if d.system.has_omega() && d.ty().is_omega_dominated() {
        return Err(TransformError::OmegaDominatedType(d.ty().clone()));
    }
    Ok(())
}

/// For `Γ ⊢ M N : A` returns derivations `Γ ⊢ M : Bi→Ai` and `Γ ⊢ N : Bi`
/// with `A1∩…∩An ≤ A`.
pub fn gen_app(d: &Derivation) -> Result<Vec<(Derivation, Derivation)>> {
    require(d, d.system.is_nd(), "natural-deduction")?;
    if !matches!(d.subject(), Term::App(..)) {
        return Err(TransformError::SubjectNotApplication(d.subject().clone()));
    }
    check_not_dominated(d)?;
    let mut out = Vec::new();
    gen_app_go(d, &mut out);
    let codomains = out.iter().map(|(f, _)| match f.ty() {
        Type::Arrow(_, c) => (**c).clone(),
        _ => unreachable!(),
    });
    let meet = fold_canonical(codomains).expect("at least one application");
    debug_assert!(below(&meet, d.ty(), d.system.has_omega()), "{meet} ≤ {}", d.ty());
    Ok(out)
}

fn gen_app_go(d: &Derivation, out: &mut Vec<(Derivation, Derivation)>) {
    grow(|| match d.rule {
        Rule::ArrE => out.push((d.premisses[0].clone(), d.premisses[1].clone())),
        Rule::CapI => {
            for p in &d.premisses {
                if !(d.system.has_omega() && p.ty().is_omega_dominated()) {
                    gen_app_go(p, out);
                }
            }
        }
        Rule::CapEL | Rule::CapER => gen_app_go(&d.premisses[0], out),
        other => unreachable!("{other} cannot type an application with a non-trivial type"),
    })
}

/// For `Γ ⊢ λx.M : A` returns pairs `(y, Γ, y:Bi ⊢ M' : Ci)` where each
/// `λy.M'` is α-equal to the subject and `(B1→C1)∩…∩(Bn→Cn) ≤ A`.
pub fn gen_abs(d: &Derivation) -> Result<Vec<(String, Derivation)>> {
    require(d, d.system.is_nd(), "natural-deduction")?;
    if !matches!(d.subject(), Term::Lam(..)) {
        return Err(TransformError::SubjectNotAbstraction(d.subject().clone()));
    }
    check_not_dominated(d)?;
    let mut out = Vec::new();
    gen_abs_go(d, &mut out);
    let arrows = out.iter().map(|(y, p)| {
        let dom = p.context().types_of(y).next().cloned().expect("binder bound");
        Type::arrow(dom, p.ty().clone())
    });
    let meet = fold_canonical(arrows).expect("at least one abstraction");
    debug_assert!(below(&meet, d.ty(), d.system.has_omega()), "{meet} ≤ {}", d.ty());
    Ok(out)
}

fn gen_abs_go(d: &Derivation, out: &mut Vec<(String, Derivation)>) {
    grow(|| match d.rule {
        Rule::ArrI => out.push((d.detail.var.clone().expect("binder"), d.premisses[0].clone())),
        Rule::CapI => {
            for p in &d.premisses {
                if !(d.system.has_omega() && p.ty().is_omega_dominated()) {
                    gen_abs_go(p, out);
                }
            }
        }
        Rule::CapEL | Rule::CapER => gen_abs_go(&d.premisses[0], out),
        other => unreachable!("{other} cannot type an abstraction with a non-trivial type"),
    })
}

// ---------------------------------------------------------------------------
// Inverse substitution

/// Result of [`inv_subst`]: a type `c` with `Γ, x:c ⊢ M : A` (`dm`) and
/// `Γ ⊢ N : c` (`dn`).
#[derive(Clone, Debug)]
pub struct InvSubst {
    pub c: Type,
    pub dm: Derivation,
    pub dn: Derivation,
}

/// From `Γ ⊢ M[x:=N] : A` (with `x` not in Γ) finds `C` with
/// `Γ, x:C ⊢ M : A` and `Γ ⊢ N : C`.
///
/// Without ω, an argument derivation `Γ ⊢ N : B` is needed for the case
/// where `M` does not mention `x`; it is then used as is.
pub fn inv_subst(dsub: &Derivation, m: &Term, x: &str, n: &Term, dn_opt: Option<&Derivation>) -> Result<InvSubst> {
    require(dsub, dsub.system.is_nd(), "natural-deduction")?;
    let mut sup = supply_for(std::iter::once(dsub).chain(dn_opt), &[m, n], &[x]);
    inv_subst_with(dsub, m, x, n, dn_opt, &mut sup)
}

fn inv_subst_with(
    dsub: &Derivation,
    m: &Term,
    x: &str,
    n: &Term,
    dn_opt: Option<&Derivation>,
    sup: &mut NameSupply,
) -> Result<InvSubst> {
    let expected = substitute(m, x, n);
    if !alpha_eq(&expected, dsub.subject()) {
        return Err(TransformError::DecompositionMismatch { expected, found: dsub.subject().clone() });
    }
    if dsub.context().binds(x) {
        return Err(TransformError::VariableNotFresh(x.to_string()));
    }
    if let Some(dn) = dn_opt {
        if dn.context() != dsub.context() || !alpha_eq(dn.subject(), n) {
            return Err(TransformError::PreconditionViolation("argument derivation does not type N in Γ".into()));
        }
    }
    inv_go(dsub, m, x, n, dn_opt, sup)
}

fn inv_go(
    dsub: &Derivation,
    m: &Term,
    x: &str,
    n: &Term,
    dn_opt: Option<&Derivation>,
    sup: &mut NameSupply,
) -> Result<InvSubst> {
    grow(|| {
        let sys = dsub.system;
        let gamma = dsub.context();
        let a = dsub.ty();
        let omega = sys.has_omega();
        let gx = |c: &Type| gamma.with(x, c.clone());

        if omega && a.is_omega_dominated() {
            return Ok(InvSubst {
                c: Type::Omega,
                dm: Derivation::omega_tree(sys, &gx(&Type::Omega), m, a).expect("ω-dominated"),
                dn: Derivation::omega(sys, gamma.clone(), n.clone()),
            });
        }
        match m {
            Term::Var(v) if v == x => Ok(InvSubst {
                c: a.clone(),
                dm: Derivation::ax(sys, gx(a), x, a.clone()),
                dn: dsub.clone().with_subject(n.clone()),
            }),
            Term::Var(_) => {
                let (c, dn) = if omega {
                    (Type::Omega, Derivation::omega(sys, gamma.clone(), n.clone()))
                } else {
                    let dn = dn_opt.ok_or_else(|| {
                        TransformError::PreconditionViolation("an argument derivation is needed without ω".into())
                    })?;
                    (dn.ty().clone(), dn.clone())
                };
                Ok(InvSubst { dm: weaken_with(dsub, x, &c, sup).with_subject(m.clone()), c, dn })
            }
            Term::App(m1, m2) => {
                let pairs = gen_app(dsub)?;
                // A side without x is weakened rather than inverted, so no
                // argument derivation is needed for it.
                let (in1, in2) = (m1.has_free(x), m2.has_free(x));
                let (go1, go2) = (in1 || !in2, in2 || !in1);
                let mut parts = Vec::new();
                for (df, da) in &pairs {
                    let r1 = if go1 { Some(inv_go(df, m1, x, n, dn_opt, sup)?) } else { None };
                    let r2 = if go2 { Some(inv_go(da, m2, x, n, dn_opt, sup)?) } else { None };
                    parts.push((r1, r2));
                }
                let done = || parts.iter().flat_map(|(r1, r2)| r1.iter().chain(r2.iter()));
                let c = fold_canonical(done().map(|r| r.c.clone())).unwrap();
                let dn = fold_canonical_derivs(done().map(|r| r.dn.clone()).collect());
                debug_assert_eq!(*dn.ty(), c);
                let mut apps = Vec::new();
                for ((r1, r2), (df, da)) in parts.into_iter().zip(&pairs) {
                    let f = match r1 {
                        Some(r) => rebind_go(&r.dm, x, &r.c, &c),
                        None => weaken_with(df, x, &c, sup).with_subject((**m1).clone()),
                    };
                    let g = match r2 {
                        Some(r) => rebind_go(&r.dm, x, &r.c, &c),
                        None => weaken_with(da, x, &c, sup).with_subject((**m2).clone()),
                    };
                    apps.push(Derivation::arrow_elim(f, g));
                }
                let dm = le_go(&fold_in_order(apps), a).with_subject(m.clone());
                Ok(InvSubst { c, dm, dn })
            }
            Term::Lam(y, body) => {
                let g = sup.fresh();
                let body_g = substitute(body, y, &Term::var(&g));
                let pieces = gen_abs(dsub)?;
                let mut parts = Vec::new();
                for (binder, p) in &pieces {
                    let p = rename_unchecked(p, binder, &g);
                    let dom = p.context().types_of(&g).next().cloned().expect("binder bound");
                    let dn2 = dn_opt.map(|dn| weaken_with(dn, &g, &dom, sup));
                    let r = inv_go(&p, &body_g, x, n, dn2.as_ref(), sup)?;
                    let dn = nd_strengthen(&r.dn, &g)?;
                    parts.push((dom, r, dn));
                }
                let c = fold_canonical(parts.iter().map(|(_, r, _)| r.c.clone())).unwrap();
                let dn = fold_canonical_derivs(parts.iter().map(|(_, _, dn)| dn.clone()).collect());
                debug_assert_eq!(*dn.ty(), c);
                let mut abs = Vec::new();
                for (dom, r, _) in parts {
                    let body = rebind_go(&r.dm, x, &r.c, &c);
                    abs.push(Derivation::arrow_intro(gx(&c), &g, dom, body));
                }
                let dm = le_go(&fold_in_order(abs), a).with_subject(m.clone());
                Ok(InvSubst { c, dm, dn })
            }
            Term::Bottom => Err(TransformError::PreconditionViolation("⊥ has only ω-dominated types".into())),
        }
    })
}

// ---------------------------------------------------------------------------
// Subject expansion

/// From `Γ ⊢ M' : A` where `m` reduces to `M'` at `p`, builds `Γ ⊢ m : A`.
pub fn subject_expand(d: &Derivation, m: &Term, p: &Position) -> Result<Derivation> {
    require(d, d.system == System::NdOmega, "ndw")?;
    let mut sup = supply_for([d], &[m], &[]);
    Ok(align_binders(&expand_with(d, m, p, None, &mut sup)?))
}

fn expand_with(d: &Derivation, m: &Term, p: &Position, dn: Option<&Derivation>, sup: &mut NameSupply) -> Result<Derivation> {
    let reduct = step(m, p).map_err(|_| TransformError::NotARedex(p.clone()))?;
    if !alpha_eq(&reduct, d.subject()) {
        return Err(TransformError::SubjectMismatch { expected: reduct, found: d.subject().clone() });
    }
    Ok(expand_go(d, m, &p.0, dn, sup)?.with_subject(m.clone()))
}

fn expand_go(d: &Derivation, m: &Term, p: &[Dir], dn: Option<&Derivation>, sup: &mut NameSupply) -> Result<Derivation> {
    grow(|| {
        let sys = d.system;
        let a = d.ty();
        if sys.has_omega() && a.is_omega_dominated() {
            return Ok(Derivation::omega_tree(sys, d.context(), m, a).expect("ω-dominated"));
        }
        let Some((dir, rest)) = p.split_first() else {
            let Term::App(f, arg) = m else { unreachable!("checked redex") };
            let Term::Lam(x, body) = &**f else { unreachable!("checked redex") };
            let g = sup.fresh();
            let body_g = substitute(body, x, &Term::var(&g));
            let r = inv_go(d, &body_g, &g, arg, dn, sup)?;
            let lam = Derivation::arrow_intro(d.context().clone(), &g, r.c, r.dm);
            return Ok(Derivation::arrow_elim(lam, r.dn));
        };
        let out = match (dir, m) {
            (Dir::Fun, Term::App(f, _)) => {
                let mut apps = Vec::new();
                for (df, da) in gen_app(d)? {
                    apps.push(Derivation::arrow_elim(expand_go(&df, f, rest, dn, sup)?, da));
                }
                apps
            }
            (Dir::Arg, Term::App(_, arg)) => {
                let mut apps = Vec::new();
                for (df, da) in gen_app(d)? {
                    apps.push(Derivation::arrow_elim(df, expand_go(&da, arg, rest, dn, sup)?));
                }
                apps
            }
            (Dir::Body, Term::Lam(y, body)) => {
                let g = sup.fresh();
                let body_g = substitute(body, y, &Term::var(&g));
                let mut abs = Vec::new();
                for (binder, piece) in gen_abs(d)? {
                    let piece = rename_unchecked(&piece, &binder, &g);
                    let dom = piece.context().types_of(&g).next().cloned().expect("binder bound");
                    let dn2 = dn.map(|dn| weaken_with(dn, &g, &dom, sup));
                    let inner = expand_go(&piece, &body_g, rest, dn2.as_ref(), sup)?;
                    abs.push(Derivation::arrow_intro(d.context().clone(), &g, dom, inner));
                }
                abs
            }
            _ => unreachable!("checked redex position"),
        };
        Ok(le_go(&fold_in_order(out), a))
    })
}

// ---------------------------------------------------------------------------
// Sequents to natural deduction

/// Translates a sequent-style derivation of `Γ ⊢ M : A` into natural
/// deduction with context Γ∩ (SEQ to ND, the others to NDω).
///
/// The (Beta) cases rebuild the redex by subject expansion at the head of
/// the spine, which in turn rests on inverse substitution.
pub fn seq_to_nd(d: &Derivation) -> Result<Derivation> {
    require(d, d.system.is_sequent(), "sequent-style")?;
    let target = if d.system == System::Seq { System::Nd } else { System::NdOmega };
    let mut sup = supply_for([d], &[], &[]);
    Ok(align_binders(&seq_to_nd_go(d, target, &mut sup)?))
}

fn collapsed(g: &SeqContext) -> (NdContext, SeqContext) {
    let k = collapse(g);
    let s = k.to_seq();
    (k, s)
}

fn seq_to_nd_go(d: &Derivation, sys: System, sup: &mut NameSupply) -> Result<Derivation> {
    grow(|| {
        let (k, ks) = collapsed(d.context());
        let out = match d.rule {
            Rule::Ax => {
                let x = d.detail.var.as_deref().expect("axiom variable");
                let t = k.get(x).expect("axiom variable bound").clone();
                le_go(&Derivation::ax(sys, ks, x, t), d.ty())
            }
            Rule::Omega => Derivation::omega(sys, ks, d.subject().clone()),
            Rule::RArr => {
                let y = d.detail.var.clone().expect("binder");
                let Type::Arrow(dom, _) = d.ty() else { unreachable!() };
                let body = seq_to_nd_go(&d.premisses[0], sys, sup)?;
                Derivation::arrow_intro(ks, &y, (**dom).clone(), body)
            }
            Rule::RCap => Derivation::cap_intro(
                seq_to_nd_go(&d.premisses[0], sys, sup)?,
                seq_to_nd_go(&d.premisses[1], sys, sup)?,
            ),
            Rule::LCap => adapt_with(&seq_to_nd_go(&d.premisses[0], sys, sup)?, &k, sup)?,
            Rule::LArr => {
                let x = d.detail.var.clone().expect("principal variable");
                let (p1, mut p2) = (&d.premisses[0], d.premisses[1].clone());
                let mut y = d.detail.fresh.clone().expect("fresh variable");
                if k.get(&y).is_some() {
                    let g = sup.fresh();
                    p2 = rename_unchecked(&p2, &y, &g);
                    y = g;
                }
                let a2 = p2.context().types_of(&y).next().cloned().expect("fresh variable bound");
                let arrow = Type::arrow(p1.ty().clone(), a2.clone());

                let d1 = adapt_with(&seq_to_nd_go(p1, sys, sup)?, &k, sup)?;
                let kx = k.get(&x).expect("principal variable bound").clone();
                let head = le_go(&Derivation::ax(sys, ks.clone(), &x, kx), &arrow);
                let xn = Derivation::arrow_elim(head, d1);

                let mut ky = k.clone();
                ky.insert(y.clone(), a2);
                let d2 = adapt_with(&seq_to_nd_go(&p2, sys, sup)?, &ky, sup)?;
                nd_subst_with(&d2, &y, &xn, sup)?
            }
            Rule::BetaS | Rule::BetaL => {
                let contractum = seq_to_nd_go(&d.premisses[0], sys, sup)?;
                let arg = match d.premisses.get(1) {
                    Some(p) if !sys.has_omega() => Some(seq_to_nd_go(p, sys, sup)?),
                    _ => None,
                };
                let n = d.detail.n.unwrap_or(0);
                let pos = Position(vec![Dir::Fun; n]);
                expand_with(&contractum, d.subject(), &pos, arg.as_ref(), sup)?
            }
            other => unreachable!("{other} in a sequent derivation"),
        };
        Ok(out.with_subject(d.subject().clone()))
    })
}
