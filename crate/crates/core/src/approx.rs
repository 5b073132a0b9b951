//! The approximation mapping α into λ⊥ and the approximation theorem:
//! a SEQℓω typing of `M` yields a reduct `M'` with a typing of `α(M')`,
//! and a typing of an approximant lifts back to the term it approximates.

use thiserror::Error;

use crate::derivation::{Derivation, NameSupply, Rule, System};
use crate::reduce::{common_reduct, ReduceError, ReductionTrace};
use crate::term::{alpha_eq, substitute, Dir, Position, Term};
use crate::transform::{grow, rename_var, supply_for};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApproxError {
    #[error("⊥ is not allowed in this input")]
    BottomInput,
    #[error("subject mismatch: expected {expected}, found {found}")]
    SubjectMismatch { expected: Term, found: Term },
    #[error("{0}")]
    WitnessMismatch(String),
    #[error("no common reduct found within the fuel")]
    FuelExhausted,
    #[error("operation needs a {expected} derivation, got {found}")]
    WrongSystem { expected: &'static str, found: System },
    #[error(transparent)]
    Reduce(#[from] ReduceError),
}

pub type Result<T> = std::result::Result<T, ApproxError>;

/// The approximation mapping:
/// `λx̄.x N1…Nm ↦ λx̄.x α(N1)…α(Nm)` and `λx̄.(λx.M) N N1…Nm ↦ λx̄.⊥`.
pub fn alpha_map(m: &Term) -> Result<Term> {
    if m.contains_bottom() {
        return Err(ApproxError::BottomInput);
    }
    Ok(alpha_go(m))
}

fn alpha_go(m: &Term) -> Term {
    grow(|| match m {
        Term::Lam(x, b) => Term::lam(x.clone(), alpha_go(b)),
        _ => {
            let (head, args) = m.spine();
            match head {
                Term::Var(_) => Term::apps(head.clone(), args.into_iter().map(alpha_go)),
                _ => Term::Bottom,
            }
        }
    })
}

/// `P ⊑ Q` witnessed by the positions of `Q` where `P` has ⊥.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ApproxOrder {
    pub positions: Vec<Position>,
}

/// Computes the witness for `p ⊑ q`, if `p ⊑ q` holds (up to α).
pub fn approx_witness(p: &Term, q: &Term) -> Option<ApproxOrder> {
    let mut out = Vec::new();
    let mut env = Vec::new();
    witness_go(p, q, &mut env, &mut Vec::new(), &mut out).then_some(ApproxOrder { positions: out })
}

fn witness_go(
    p: &Term,
    q: &Term,
    env: &mut Vec<(String, String)>,
    path: &mut Vec<Dir>,
    out: &mut Vec<Position>,
) -> bool {
    grow(|| match (p, q) {
        (Term::Bottom, _) => {
            out.push(Position(path.clone()));
            true
        }
        (Term::Var(a), Term::Var(b)) => {
            let pa = env.iter().rev().position(|(x, _)| x == a);
            let pb = env.iter().rev().position(|(_, y)| y == b);
            pa == pb && (pa.is_some() || a == b)
        }
        (Term::App(f1, a1), Term::App(f2, a2)) => {
            path.push(Dir::Fun);
            let ok = witness_go(f1, f2, env, path, out);
            path.pop();
            if !ok {
                return false;
            }
            path.push(Dir::Arg);
            let ok = witness_go(a1, a2, env, path, out);
            path.pop();
            ok
        }
        (Term::Lam(x, b1), Term::Lam(y, b2)) => {
            env.push((x.clone(), y.clone()));
            path.push(Dir::Body);
            let ok = witness_go(b1, b2, env, path, out);
            path.pop();
            env.pop();
            ok
        }
        _ => false,
    })
}

/// Replaces the subterms of `q` at the witness positions by ⊥.
fn erase(q: &Term, w: &ApproxOrder) -> Option<Term> {
    let mut t = q.clone();
    for p in &w.positions {
        t = t.replace_at(&p.0, Term::Bottom)?;
    }
    Some(t)
}

// ---------------------------------------------------------------------------
// Lifting a typing of P to a typing of Q with P ⊑ Q

/// From a derivation of `Γ ⊢ P : A` (sequent-style or natural deduction,
/// with ω) and `P ⊑ q`, builds `Γ ⊢ q : A` by typing the subterms of `q`
/// that replace ⊥ with ω.
fn lift(d: &Derivation, q: &Term, sup: &mut NameSupply) -> Derivation {
    grow(|| {
        let sys = d.system;
        let g = d.context().clone();
        if matches!(d.subject(), Term::Bottom) || d.rule == Rule::Omega {
            return Derivation::omega_tree(sys, &g, q, d.ty()).expect("⊥ has only ω-dominated types");
        }
        match d.rule {
            Rule::Ax => d.clone().with_subject(q.clone()),
            Rule::RArr | Rule::ArrI => {
                let Term::Lam(y2, body) = q else { unreachable!("⊑ keeps abstractions") };
                let y = d.detail.var.clone().expect("binder");
                let mut p = d.premisses[0].clone();
                let (b, body) = if *y2 == y {
                    (y, (**body).clone())
                } else {
                    let b = sup.fresh();
                    p = rename_var(&p, &y, &b).expect("fresh name");
                    let body = substitute(body, y2, &Term::var(&b));
                    (b, body)
                };
                let dom = p.context().types_of(&b).next().cloned().expect("binder bound");
                Derivation::arrow_intro(g, &b, dom, lift(&p, &body, sup))
            }
            Rule::RCap | Rule::CapI => Derivation::cap_intro(lift(&d.premisses[0], q, sup), lift(&d.premisses[1], q, sup)),
            Rule::CapEL | Rule::CapER => Derivation::cap_elim(lift(&d.premisses[0], q, sup), d.rule == Rule::CapEL),
            Rule::ArrE => {
                let Term::App(f, a) = q else { unreachable!("⊑ keeps applications") };
                Derivation::arrow_elim(lift(&d.premisses[0], f, sup), lift(&d.premisses[1], a, sup))
            }
            Rule::LCap => {
                let x = d.detail.var.clone().expect("principal variable");
                Derivation::l_cap(g, &x, lift(&d.premisses[0], q, sup))
            }
            Rule::LArr => {
                let x = d.detail.var.clone().expect("principal variable");
                let (_, args) = q.spine();
                let rest: Vec<Term> = args[1..].iter().map(|t| (*t).clone()).collect();
                let mut y = d.detail.fresh.clone().expect("fresh variable");
                let mut p2 = d.premisses[1].clone();
                if rest.iter().any(|t| t.has_free(&y)) {
                    let fresh = sup.fresh();
                    p2 = rename_var(&p2, &y, &fresh).expect("fresh name");
                    y = fresh;
                }
                let left = lift(&d.premisses[0], args[0], sup);
                let right = lift(&p2, &Term::apps(Term::var(&y), rest), sup);
                Derivation::l_arr(&x, &y, left, right)
            }
            Rule::BetaS | Rule::BetaL => {
                unreachable!("approximants contain no redex, so their derivations have no (Beta) node")
            }
            Rule::Omega => unreachable!(),
        }
        .with_subject(q.clone())
    })
}

fn require_llw(d: &Derivation) -> Result<Derivation> {
    match d.system {
        System::SeqLOmega => Ok(d.clone()),
        System::SeqL => Ok(d.rebrand(System::SeqLOmega)),
        found => Err(ApproxError::WrongSystem { expected: "ll or llw", found }),
    }
}

/// From `Γ ⊢ α(M) : A` and a trace `M ↠ N` builds `Γ ⊢ α(N) : A`.
///
/// Rests on monotonicity: `α(M) ⊑ α(N)` whenever `M ↠ N`.
pub fn approx_typing_step(d: &Derivation, m: &Term, trace: &ReductionTrace) -> Result<Derivation> {
    let d = require_llw(d)?;
    let am = alpha_map(m)?;
    if !alpha_eq(&am, d.subject()) {
        return Err(ApproxError::SubjectMismatch { expected: am, found: d.subject().clone() });
    }
    if !alpha_eq(&trace.start, m) {
        return Err(ApproxError::SubjectMismatch { expected: m.clone(), found: trace.start.clone() });
    }
    let an = alpha_map(trace.end())?;
    lift_to_approx(&d, &an)
}

fn lift_to_approx(d: &Derivation, target: &Term) -> Result<Derivation> {
    if approx_witness(d.subject(), target).is_none() {
        return Err(ApproxError::WitnessMismatch(format!("{} is not below {target}", d.subject())));
    }
    let mut sup = supply_for([d], &[target], &[]);
    Ok(lift(d, target, &mut sup))
}

/// Result of [`approx_combine`].
#[derive(Clone, Debug)]
pub struct Combined {
    /// The common reduct `N''`.
    pub term: Term,
    /// `Γ ⊢ α(N'') : A∩B`.
    pub derivation: Derivation,
    /// `M ↠ N''` through the first trace.
    pub trace: ReductionTrace,
}

/// From `M ↠ N` with `Γ ⊢ α(N) : A` and `M ↠ N'` with `Γ ⊢ α(N') : B`
/// finds a common reduct `N''` and builds `Γ ⊢ α(N'') : A∩B`.
pub fn approx_combine(
    m: &Term,
    t1: &ReductionTrace,
    da: &Derivation,
    t2: &ReductionTrace,
    db: &Derivation,
    fuel: usize,
) -> Result<Combined> {
    let (da, db) = (require_llw(da)?, require_llw(db)?);
    let (n2, e1, e2) = common_reduct(m, t1, t2, fuel).ok_or(ApproxError::FuelExhausted)?;
    let target = alpha_map(&n2)?;
    let la = approx_typing_step(&da, t1.end(), &e1)?;
    let lb = approx_typing_step(&db, t2.end(), &e2)?;
    let la = lift_to_approx(&la, &target)?;
    let lb = lift_to_approx(&lb, &target)?;
    let trace = t1.concat(&e1)?;
    Ok(Combined { term: n2, derivation: Derivation::cap_intro(la, lb), trace })
}

/// Result of [`approximate`].
#[derive(Clone, Debug)]
pub struct Approximation {
    /// `M'` with `M ↠ M'`.
    pub term: Term,
    /// `Γ ⊢ α(M') : A` in SEQℓω.
    pub derivation: Derivation,
    pub trace: ReductionTrace,
}

/// From `Γ ⊢ M : A` in SEQℓω finds `M ↠ M'` with `Γ ⊢ α(M') : A`.
/// `fuel` bounds each common-reduct search in the (R∩) case.
pub fn approximate(d: &Derivation, fuel: usize) -> Result<Approximation> {
    let d = require_llw(d)?;
    if d.subject().contains_bottom() {
        return Err(ApproxError::BottomInput);
    }
    approx_go(&d, fuel)
}

fn prefixed(prefix: &[Dir], tr: &ReductionTrace) -> Vec<Position> {
    tr.positions().map(|p| Position::prefixed(prefix, p)).collect()
}

fn approx_go(d: &Derivation, fuel: usize) -> Result<Approximation> {
    grow(|| {
        let m = d.subject().clone();
        let g = d.context().clone();
        let sys = d.system;
        let done = |term: Term, derivation: Derivation, positions: Vec<Position>| -> Result<Approximation> {
            let trace = ReductionTrace::from_positions(m.clone(), &positions)?;
            debug_assert!(alpha_eq(trace.end(), &term));
            let target = alpha_map(&term)?;
            Ok(Approximation { derivation: derivation.with_subject(target), term, trace })
        };
        match d.rule {
            Rule::Ax => done(m.clone(), d.clone(), vec![]),
            Rule::Omega => done(m.clone(), Derivation::omega(sys, g, alpha_map(&m)?), vec![]),
            Rule::RArr => {
                let x = d.detail.var.clone().expect("binder");
                let Term::Lam(_, _) = &m else { unreachable!() };
                let inner = approx_go(&d.premisses[0], fuel)?;
                let dom = d.premisses[0].context().types_of(&x).next().cloned().expect("binder bound");
                let term = Term::lam(x.clone(), inner.term.clone());
                let derivation = Derivation::arrow_intro(g, &x, dom, inner.derivation);
                done(term, derivation, prefixed(&[Dir::Body], &inner.trace))
            }
            Rule::BetaL => {
                let n = d.detail.n.unwrap_or(0);
                let inner = approx_go(&d.premisses[0], fuel)?;
                let mut positions = vec![Position(vec![Dir::Fun; n])];
                positions.extend(inner.trace.positions().cloned());
                done(inner.term, inner.derivation, positions)
            }
            Rule::LArr => {
                let x = d.detail.var.clone().expect("principal variable");
                let y = d.detail.fresh.clone().expect("fresh variable");
                let (_, args) = m.spine();
                let n = args.len() - 1;
                let left = approx_go(&d.premisses[0], fuel)?;
                let right = approx_go(&d.premisses[1], fuel)?;
                let (_, rest) = right.term.spine();
                let term = Term::apps(
                    Term::var(&x),
                    std::iter::once(left.term.clone()).chain(rest.into_iter().cloned()),
                );
                let derivation = Derivation::l_arr(&x, &y, left.derivation, right.derivation);
                let mut prefix = vec![Dir::Fun; n];
                prefix.push(Dir::Arg);
                let mut positions = prefixed(&prefix, &left.trace);
                positions.extend(right.trace.positions().cloned());
                done(term, derivation, positions)
            }
            Rule::LCap => {
                let x = d.detail.var.clone().expect("principal variable");
                let inner = approx_go(&d.premisses[0], fuel)?;
                let derivation = Derivation::l_cap(g, &x, inner.derivation);
                done(inner.term, derivation, inner.trace.positions().cloned().collect())
            }
            Rule::RCap => {
                let a = approx_go(&d.premisses[0], fuel)?;
                let b = approx_go(&d.premisses[1], fuel)?;
                let c = approx_combine(&m, &a.trace, &a.derivation, &b.trace, &b.derivation, fuel)?;
                done(c.term, c.derivation, c.trace.positions().cloned().collect())
            }
            other => unreachable!("{other} in a SEQℓω derivation"),
        }
    })
}

/// From `Γ ⊢ P : A` in NDω and a witness for `P ⊑ q` builds `Γ ⊢ q : A`.
pub fn unapproximate(d: &Derivation, q: &Term, w: &ApproxOrder) -> Result<Derivation> {
    if d.system != System::NdOmega {
        return Err(ApproxError::WrongSystem { expected: "ndw", found: d.system });
    }
    match erase(q, w) {
        Some(p) if alpha_eq(&p, d.subject()) => {}
        _ => return Err(ApproxError::WitnessMismatch(format!("the witness does not turn {q} into {}", d.subject()))),
    }
    let mut sup = supply_for([d], &[q], &[]);
    Ok(lift(d, q, &mut sup))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::check_derivation;
    use crate::term::{parse_bottom_term, parse_term};
    use crate::transform::{betas_to_betal, nd_to_seq, seq_to_nd, subject_expand};
    use crate::typability::type_wn;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha_map(&t("(\\x. x x)(\\x. x x)")).unwrap(), Term::Bottom);
        assert_eq!(alpha_map(&t("\\y. y (\\z. z)")).unwrap(), t("\\y. y (\\z. z)"));
        assert_eq!(alpha_map(&t("\\y. (\\x. x) y")).unwrap(), parse_bottom_term("\\y. _|_").unwrap());
        assert_eq!(alpha_map(&parse_bottom_term("_|_").unwrap()), Err(ApproxError::BottomInput));
    }

    #[test]
    fn witnesses() {
        let p = parse_bottom_term("\\y. y _|_").unwrap();
        let q = t("\\z. z ((\\x. x) z)");
        let w = approx_witness(&p, &q).unwrap();
        assert_eq!(w.positions, vec!["body.arg".parse().unwrap()]);
        assert!(alpha_eq(&erase(&q, &w).unwrap(), &p));
        assert!(approx_witness(&q, &p).is_none());
    }

    #[test]
    fn round_trip_on_discarded_omega() {
        let m = t("(\\x y. x)(\\z. z)((\\w. w w)(\\w. w w))");
        let (_, a, nd, _) = type_wn(&m, 100).unwrap();
        let ll = betas_to_betal(&nd_to_seq(&nd).unwrap()).unwrap();
        let ap = approximate(&ll, 1000).unwrap();
        assert!(check_derivation(&ap.derivation).is_valid(), "{}", check_derivation(&ap.derivation));
        assert!(alpha_eq(&alpha_map(&ap.term).unwrap(), &t("\\z. z")));
        assert!(ap.trace.replays() && alpha_eq(&ap.trace.start, &m));

        let back = seq_to_nd(&ap.derivation).unwrap();
        let w = approx_witness(back.subject(), &ap.term).unwrap();
        let mut d = unapproximate(&back, &ap.term, &w).unwrap();
        for (i, (p, _)) in ap.trace.steps.iter().enumerate().rev() {
            d = subject_expand(&d, ap.trace.term_at(i), p).unwrap();
        }
        assert!(check_derivation(&d).is_valid(), "{}", check_derivation(&d));
        assert!(alpha_eq(d.subject(), &m));
        assert_eq!(*d.ty(), a);
    }
}
