use itlab::approx::{alpha_map, approx_witness};
use itlab::derivation::{check_derivation, Derivation};
use itlab::format::{parse_derivation, print_derivation};
use itlab::reduce::{check_sn, redexes, step, SnEvidence};
use itlab::term::{alpha_eq, free_vars, parse_term, substitute, Term};
use itlab::transform::{nd_to_seq, seq_to_nd, subject_expand};
use itlab::typability::{type_sn, type_wn};
use itlab::types::{equivalent, leq, leq_omega, parse_type, Type};
use proptest::prelude::*;

const FUEL: usize = 2_000;

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![Just("x"), Just("y"), Just("z")].prop_map(Term::var);
    leaf.prop_recursive(4, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(f, a)| Term::app(f, a)),
            (prop_oneof![Just("x"), Just("y"), Just("z")], inner).prop_map(|(x, b)| Term::lam(x, b)),
        ]
    })
}

fn ty(omega: bool) -> impl Strategy<Value = Type> {
    let mut leaves = vec![Just(Type::var("A")).boxed(), Just(Type::var("B")).boxed()];
    if omega {
        leaves.push(Just(Type::Omega).boxed());
    }
    proptest::strategy::Union::new(leaves).prop_recursive(3, 10, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Type::arrow(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Type::inter(a, b)),
        ]
    })
}

fn sn_typing(m: &Term) -> Option<Derivation> {
    type_sn(m, FUEL).ok().map(|(_, _, d)| d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn terms_print_and_parse_back(m in term()) {
        prop_assert_eq!(parse_term(&m.to_string()).unwrap(), m);
    }

    #[test]
    fn types_print_and_parse_back(a in ty(true)) {
        prop_assert_eq!(parse_type(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn derivations_print_and_parse_back(m in term()) {
        if let Some(d) = sn_typing(&m) {
            let text = print_derivation(&d);
            let back = parse_derivation(&text, Some(d.system)).unwrap();
            prop_assert_eq!(print_derivation(&back), text);
            prop_assert!(check_derivation(&back).is_valid());
        }
    }

    #[test]
    fn a_changed_root_type_is_rejected(m in term()) {
        if let Some(mut d) = sn_typing(&m) {
            d.conclusion.ty = Type::arrow(Type::var("Z"), d.ty().clone());
            prop_assert!(!check_derivation(&d).is_valid());
        }
    }

    #[test]
    fn preorder_is_reflexive(a in ty(false)) {
        prop_assert!(leq(&a, &a).unwrap());
        prop_assert!(leq_omega(&a, &Type::Omega));
    }

    #[test]
    fn preorder_is_transitive(a in ty(true), b in ty(true), c in ty(true)) {
        if leq_omega(&a, &b) && leq_omega(&b, &c) {
            prop_assert!(leq_omega(&a, &c));
        }
    }

    #[test]
    fn intersection_is_a_lower_bound(a in ty(false), b in ty(false)) {
        let ab = Type::inter(a.clone(), b.clone());
        prop_assert!(leq(&ab, &a).unwrap());
        prop_assert!(leq(&ab, &b).unwrap());
        prop_assert!(equivalent(&ab, &Type::inter(b, a), false));
    }

    #[test]
    fn equivalence_is_mutual_preorder(a in ty(true), b in ty(true)) {
        prop_assert_eq!(equivalent(&a, &b, true), leq_omega(&a, &b) && leq_omega(&b, &a));
    }

    #[test]
    fn alpha_equivalence_survives_renaming(m in term()) {
        let renamed = match &m {
            Term::Lam(x, b) => Term::lam("w", substitute(b, x, &Term::var("w"))),
            _ => m.clone(),
        };
        if !free_vars(&m).contains("w") {
            prop_assert!(alpha_eq(&m, &renamed));
        }
    }

    #[test]
    fn substitution_of_an_absent_variable_is_identity(m in term()) {
        if !m.has_free("x") {
            prop_assert!(alpha_eq(&substitute(&m, "x", &Term::var("q")), &m));
        }
    }

    #[test]
    fn substitution_removes_the_variable(m in term(), n in term()) {
        if !n.has_free("x") {
            prop_assert!(!substitute(&m, "x", &n).has_free("x"));
        }
    }

    #[test]
    fn approximant_is_normal_and_below(m in term()) {
        let a = alpha_map(&m).unwrap();
        prop_assert!(redexes(&a).is_empty());
        prop_assert!(approx_witness(&a, &m).is_some());
        prop_assert!(alpha_map(&Term::app(Term::Bottom, m)).is_err());
    }

    #[test]
    fn approximants_grow_along_reduction(m in term()) {
        for p in redexes(&m) {
            let n = step(&m, &p).unwrap();
            let (am, an) = (alpha_map(&m).unwrap(), alpha_map(&n).unwrap());
            prop_assert!(approx_witness(&am, &an).is_some(), "{} -> {}", am, an);
        }
    }

    #[test]
    fn typed_terms_are_strongly_normalising(m in term()) {
        if sn_typing(&m).is_some() {
            let non_sn = matches!(check_sn(&m, 50_000), SnEvidence::NonSn { .. });
            prop_assert!(!non_sn);
        }
    }

    #[test]
    fn typing_is_deterministic(m in term()) {
        let a = sn_typing(&m).map(|d| print_derivation(&d));
        let b = sn_typing(&m).map(|d| print_derivation(&d));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn translations_round_trip_checks(m in term()) {
        if let Some(d) = sn_typing(&m) {
            let nd = seq_to_nd(&d).unwrap();
            prop_assert!(check_derivation(&nd).is_valid());
            let back = nd_to_seq(&nd).unwrap();
            prop_assert!(check_derivation(&back).is_valid());
            prop_assert!(alpha_eq(back.subject(), &m));
        }
    }

    #[test]
    fn expansion_inverts_a_step(m in term()) {
        if let Some(p) = redexes(&m).into_iter().next() {
            let n = step(&m, &p).unwrap();
            if let Ok((_, _, d, _)) = type_wn(&n, FUEL) {
                let e = subject_expand(&d, &m, &p).unwrap();
                prop_assert!(check_derivation(&e).is_valid());
                prop_assert!(alpha_eq(e.subject(), &m));
                prop_assert_eq!(e.ty(), d.ty());
            }
        }
    }
}
