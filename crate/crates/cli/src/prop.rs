//! Named property suites over the exhaustive closed-term corpus.

use itlab::approx::{alpha_map, approx_witness, approximate, unapproximate};
use itlab::corpus::{enumerate_terms, CorpusSpec};
use itlab::derivation::{check_derivation, rule_census, Derivation, Rule};
use itlab::format::{parse_derivation, print_derivation};
use itlab::reduce::{check_sn, normalize_lo, SnEvidence};
use itlab::term::{alpha_eq, Term};
use itlab::transform::{betal_to_betas, betas_to_betal, nd_to_seq, omega_erase, seq_to_nd, subject_expand};
use itlab::typability::{type_sn, type_wn};

pub const SUITES: [&str; 5] = ["sn", "wn", "translate", "format", "approx"];

#[derive(Debug, Default)]
pub struct Report {
    pub cases: usize,
    pub counterexamples: Vec<String>,
}

pub fn run_suite(name: &str, max_size: usize, fuel: usize) -> Result<Report, String> {
    let check: fn(&Term, usize) -> Result<(), String> = match name {
        "sn" => sn,
        "wn" => wn,
        "translate" => translate,
        "format" => format,
        "approx" => approx,
        _ => return Err(format!("unknown suite {name} (expected one of {})", SUITES.join(", "))),
    };
    let mut report = Report::default();
    for m in enumerate_terms(&CorpusSpec::closed(max_size)) {
        report.cases += 1;
        if let Err(e) = check(&m, fuel) {
            report.counterexamples.push(format!("{m}: {e}"));
        }
    }
    report.counterexamples.sort();
    Ok(report)
}

fn valid(what: &str, d: Derivation) -> Result<Derivation, String> {
    let r = check_derivation(&d);
    if r.is_valid() {
        Ok(d)
    } else {
        Err(format!("{what} produced an invalid derivation: {r}"))
    }
}

fn sn(m: &Term, fuel: usize) -> Result<(), String> {
    match (check_sn(m, fuel), type_sn(m, fuel)) {
        (SnEvidence::Unknown { .. }, _) => Ok(()),
        (SnEvidence::Sn { .. }, Ok((_, _, d))) => {
            let d = valid("type_sn", d)?;
            match rule_census(&d).get(&Rule::RCap) {
                None => Ok(()),
                Some(n) => Err(format!("{n} (R∩) nodes")),
            }
        }
        (SnEvidence::NonSn { .. }, Err(_)) => Ok(()),
        (o, r) => Err(format!("oracle {o:?} but type_sn ok={}", r.is_ok())),
    }
}

fn wn(m: &Term, fuel: usize) -> Result<(), String> {
    let lo = normalize_lo(m, fuel).is_wn();
    match type_wn(m, fuel) {
        Ok((k, a, d, _)) if lo => {
            valid("type_wn", d)?;
            if a.is_omega_free() && k.to_seq().is_omega_free() {
                Ok(())
            } else {
                Err("ω in the root sequent".into())
            }
        }
        Err(_) if !lo => Ok(()),
        r => Err(format!("normalize_lo wn={lo} but type_wn ok={}", r.is_ok())),
    }
}

fn translate(m: &Term, fuel: usize) -> Result<(), String> {
    let e = |e: itlab::transform::TransformError| e.to_string();
    if let Ok((_, _, d)) = type_sn(m, fuel) {
        let nd = valid("seq_to_nd", seq_to_nd(&d).map_err(e)?)?;
        let back = valid("nd_to_seq", nd_to_seq(&nd).map_err(e)?)?;
        let again = valid("seq_to_nd", seq_to_nd(&back).map_err(e)?)?;
        if again.conclusion != nd.conclusion {
            return Err("ND round trip changed the root sequent".into());
        }
        let l = valid("betas_to_betal", betas_to_betal(&d).map_err(e)?)?;
        valid("betal_to_betas", betal_to_betas(&l).map_err(e)?)?;
        valid("omega_erase", omega_erase(&l).map_err(e)?)?;
    }
    if let Ok((_, _, d, _)) = type_wn(m, fuel) {
        let s = valid("nd_to_seq", nd_to_seq(&d).map_err(e)?)?;
        let back = valid("seq_to_nd", seq_to_nd(&s).map_err(e)?)?;
        if back.conclusion != d.conclusion {
            return Err("NDω round trip changed the root sequent".into());
        }
    }
    Ok(())
}

fn format(m: &Term, fuel: usize) -> Result<(), String> {
    let Ok((_, _, d)) = type_sn(m, fuel) else { return Ok(()) };
    let text = print_derivation(&d);
    let back = parse_derivation(&text, None).map_err(|e| e.to_string())?;
    if back == d {
        Ok(())
    } else {
        Err("print/parse round trip changed the derivation".into())
    }
}

fn approx(m: &Term, fuel: usize) -> Result<(), String> {
    let Ok((_, _, d, _)) = type_wn(m, fuel) else { return Ok(()) };
    let e = |e: &dyn std::fmt::Display| e.to_string();
    let s = betas_to_betal(&nd_to_seq(&d).map_err(|x| e(&x))?).map_err(|x| e(&x))?;
    let ap = approximate(&s, fuel).map_err(|x| e(&x))?;
    let ad = valid("approximate", ap.derivation)?;
    if !alpha_eq(ad.subject(), &alpha_map(&ap.term).map_err(|x| e(&x))?) {
        return Err("approximant subject mismatch".into());
    }
    let nd = seq_to_nd(&ad).map_err(|x| e(&x))?;
    let w = approx_witness(nd.subject(), &ap.term).ok_or("approximant not below M'")?;
    let mut back = valid("unapproximate", unapproximate(&nd, &ap.term, &w).map_err(|x| e(&x))?)?;
    for (i, (p, _)) in ap.trace.steps.iter().enumerate().rev() {
        back = valid("subject_expand", subject_expand(&back, ap.trace.term_at(i), p).map_err(|x| e(&x))?)?;
    }
    if alpha_eq(back.subject(), m) && back.ty() == d.ty() {
        Ok(())
    } else {
        Err(format!("round trip ended at {}", back.conclusion))
    }
}
