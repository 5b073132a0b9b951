//! Typing algorithms: every strongly normalising term gets a SEQ
//! derivation without (R∩), and every weakly normalising term gets an NDω
//! derivation with ω-free context and type.

use thiserror::Error;

use crate::derivation::{Derivation, NameSupply, System};
use crate::reduce::{normalize_lo, ReductionTrace, WnEvidence, SPACE_BUDGET};
use crate::term::{substitute, Term};
use crate::transform::{grow, merge_binding, seq_to_nd, subject_expand, weaken_with, TransformError};
use crate::types::{collapse, NdContext, SeqContext, Type};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypabilityError {
    #[error("fuel exhausted after {spent} steps (the term may not normalise)")]
    FuelExhausted { spent: usize },
    #[error("terms containing ⊥ are not handled")]
    BottomInTerm,
    #[error(transparent)]
    Transform(#[from] TransformError),
}

pub type Result<T> = std::result::Result<T, TypabilityError>;

struct Typer {
    fuel: usize,
    spent: usize,
    space: usize,
    next_ty: usize,
    names: NameSupply,
}

impl Typer {
    fn tick(&mut self) -> Result<()> {
        if self.spent >= self.fuel {
            return Err(TypabilityError::FuelExhausted { spent: self.spent });
        }
        self.spent += 1;
        Ok(())
    }

    fn fresh_ty(&mut self) -> Type {
        let t = Type::var(format!("φ{}", self.next_ty));
        self.next_ty += 1;
        t
    }

    /// Adds the missing bindings of `g`.
    fn weaken_to(&mut self, d: Derivation, g: &SeqContext) -> Derivation {
        let mut d = d;
        for (x, t) in g.bindings() {
            if !d.context().contains(x, t) {
                d = weaken_with(&d, x, t, &mut self.names);
            }
        }
        d
    }

    fn type_term(&mut self, m: &Term) -> Result<Derivation> {
        grow(|| {
            self.tick()?;
            let (head, args) = m.spine();
            match head {
                Term::Bottom => Err(TypabilityError::BottomInTerm),
                Term::Var(x) if args.is_empty() => {
                    let a = self.fresh_ty();
                    Ok(Derivation::ax(System::Seq, SeqContext::singleton(x.clone(), a.clone()), x, a))
                }
                Term::Var(x) => self.type_var_spine(x, &args),
                Term::Lam(x, body) if args.is_empty() => self.type_abs(x, body),
                Term::Lam(x, body) => {
                    let contractum = Term::apps(substitute(body, x, args[0]), args[1..].iter().map(|t| (*t).clone()));
                    self.space += contractum.size();
                    if self.space > SPACE_BUDGET {
                        return Err(TypabilityError::FuelExhausted { spent: self.spent });
                    }
                    let dc = self.type_term(&contractum)?;
                    let dn = self.type_term(args[0])?;
                    let g = dc.context().union(dn.context());
                    let dc = self.weaken_to(dc, &g);
                    let dn = self.weaken_to(dn, &g);
                    Ok(Derivation::beta(m.clone(), args.len() - 1, dc, Some(dn)))
                }
                Term::App(..) => unreachable!("spine head is never an application"),
            }
        })
    }

    /// `x N1 … Nn`: type every argument, then build the chain of (L→)
    /// nodes `x : A1→…→An→B`, `y1 : A2→…→B`, …, `yn : B`.
    fn type_var_spine(&mut self, x: &str, args: &[&Term]) -> Result<Derivation> {
        let mut ds = Vec::with_capacity(args.len());
        for a in args {
            ds.push(self.type_term(a)?);
        }
        let gamma = ds.iter().fold(SeqContext::new(), |g, d| g.union(d.context()));
        let b = self.fresh_ty();
        let tys: Vec<Type> = ds.iter().map(|d| d.ty().clone()).collect();
        // tails[k] = A_{k+1} → … → A_n → B
        let mut tails = vec![b.clone(); args.len() + 1];
        for k in (0..args.len()).rev() {
            tails[k] = Type::arrow(tys[k].clone(), tails[k + 1].clone());
        }
        let ys: Vec<String> = (0..args.len()).map(|_| self.names.fresh()).collect();
        let mut ctxs = vec![gamma.clone()];
        for (k, y) in ys.iter().enumerate() {
            let next = ctxs[k].with(y.clone(), tails[k + 1].clone());
            ctxs.push(next);
        }
        let mut d = Derivation::ax(System::Seq, ctxs[args.len()].clone(), &ys[args.len() - 1], b);
        for k in (0..args.len()).rev() {
            let h = if k == 0 { x.to_string() } else { ys[k - 1].clone() };
            let left = self.weaken_to(ds[k].clone(), &ctxs[k]);
            d = Derivation::l_arr(&h, &ys[k], left, d);
        }
        Ok(d)
    }

    fn type_abs(&mut self, x: &str, body: &Term) -> Result<Derivation> {
        let dp = self.type_term(body)?;
        let mut xs: Vec<Type> = dp.context().types_of(x).cloned().collect();
        let gamma = dp.context().without_var(x);
        if xs.is_empty() {
            // The binder is unused: weaken instead of (L∩).
            let a = self.fresh_ty();
            let dp = weaken_with(&dp, x, &a, &mut self.names);
            return Ok(Derivation::arrow_intro(gamma, x, a, dp));
        }
        xs.sort_by_key(|t| t.to_string());
        let mut cur = xs[0].clone();
        let mut dp = dp;
        for t in &xs[1..] {
            dp = merge_binding(&dp, x, &cur, t)?;
            cur = Type::inter(cur, t.clone());
        }
        Ok(Derivation::arrow_intro(gamma, x, cur, dp))
    }
}

/// Types a strongly normalising term in SEQ without (R∩). `fuel` bounds
/// the number of recursive calls and [`SPACE_BUDGET`] the total size of the
/// contracta visited.
pub fn type_sn(m: &Term, fuel: usize) -> Result<(SeqContext, Type, Derivation)> {
    if m.contains_bottom() {
        return Err(TypabilityError::BottomInTerm);
    }
    let mut typer = Typer { fuel, spent: 0, space: 0, next_ty: 0, names: NameSupply::for_term(m) };
    let d = typer.type_term(m)?.with_subject(m.clone());
    Ok((d.context().clone(), d.ty().clone(), d))
}

/// Types a weakly normalising term in NDω: normalise leftmost-outermost,
/// type the normal form, translate to natural deduction and expand back
/// along the trace. `fuel` bounds both the reduction and the typing.
pub fn type_wn(m: &Term, fuel: usize) -> Result<(NdContext, Type, Derivation, ReductionTrace)> {
    let (nf, trace) = match normalize_lo(m, fuel) {
        WnEvidence::Wn { normal_form, trace } => (normal_form, trace),
        WnEvidence::Unknown { fuel_spent } => return Err(TypabilityError::FuelExhausted { spent: fuel_spent }),
    };
    let (_, _, d) = type_sn(&nf, fuel)?;
    let mut d = seq_to_nd(&d)?.rebrand(System::NdOmega);
    for (i, (pos, _)) in trace.steps.iter().enumerate().rev() {
        d = subject_expand(&d, trace.term_at(i), pos)?;
    }
    let k = collapse(d.context());
    Ok((k, d.ty().clone(), d, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::{check_derivation, rule_census, Rule};
    use crate::reduce::check_sn;
    use crate::term::parse_term;
    use crate::types::{equivalent, parse_type};

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn self_application_type() {
        let (g, a, d) = type_sn(&t("\\x. x x"), 1000).unwrap();
        assert!(g.is_empty());
        assert_eq!(a.to_string(), "(φ0 & (φ0 -> φ1)) -> φ1");
        assert!(equivalent(&a, &parse_type("(φ0 & (φ0 -> φ1)) -> φ1").unwrap(), false));
        assert!(check_derivation(&d).is_valid(), "{}", check_derivation(&d));
    }

    #[test]
    fn variable() {
        let (g, a, _) = type_sn(&t("x"), 10).unwrap();
        assert_eq!(g.to_string(), "x:φ0");
        assert_eq!(a.to_string(), "φ0");
    }

    #[test]
    fn redex_without_rcap() {
        let m = t("(\\x. x x)(\\y. y)");
        let (_, _, d) = type_sn(&m, 1000).unwrap();
        assert!(check_derivation(&d).is_valid(), "{}", check_derivation(&d));
        assert_eq!(rule_census(&d).get(&Rule::RCap), None);
        assert!(check_sn(&m, 1000).is_sn());
    }

    #[test]
    fn weak_normalisation() {
        let (g, a, d, tr) = type_wn(&t("\\z. z"), 100).unwrap();
        assert!(tr.is_empty() && g.iter().next().is_none());
        assert_eq!(a.to_string(), "φ0 -> φ0");
        assert!(check_derivation(&d).is_valid());

        let m = t("(\\x y. x)(\\z. z)((\\w. w w)(\\w. w w))");
        let (g, a, d, tr) = type_wn(&m, 100).unwrap();
        assert_eq!(tr.len(), 2);
        assert!(check_derivation(&d).is_valid(), "{}", check_derivation(&d));
        assert!(a.is_omega_free() && g.to_seq().is_omega_free());
        assert!(rule_census(&d).contains_key(&Rule::Omega));

        assert!(matches!(
            type_wn(&t("(\\w. w w)(\\w. w w)"), 50),
            Err(TypabilityError::FuelExhausted { .. })
        ));
    }
}
