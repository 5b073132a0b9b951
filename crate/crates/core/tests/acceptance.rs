//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Corpora: all closed terms of size ≤ 7, 1000 closed terms of size ≤ 12
//! drawn with a fixed seed, and a family of weakly but not strongly
//! normalising terms. Fuel is 10_000 for every oracle and algorithm.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use itlab::approx::{approx_witness, approximate, unapproximate};
use itlab::corpus::{enumerate_terms, sample_closed, wn_not_sn_family, CorpusSpec};
use itlab::derivation::{check_derivation, rule_census, Derivation, Rule, System};
use itlab::reduce::{check_sn, normalize_lo, SnEvidence};
use itlab::term::{alpha_eq, parse_term, Term};
use itlab::transform::{betal_to_betas, betas_to_betal, nd_to_seq, omega_erase, seq_to_nd, subject_expand};
use itlab::typability::{type_sn, type_wn};
use itlab::types::{collapse, equivalent, leq, leq_omega, parse_type, SeqContext, Type};

const FUEL: usize = 10_000;
const SAMPLE_SEED: u64 = 20_241_018;
const SAMPLE_SIZE: usize = 1000;
const SAMPLE_MAX: usize = 12;
const EXHAUSTIVE_MAX: usize = 7;
const WN_FAMILY_P: usize = 5;
const MIN_WN_NOT_SN: usize = 25;

const AC1_LIMIT: Duration = Duration::from_secs(1);
const AC2_LIMIT: Duration = Duration::from_secs(600);
const AC6_LIMIT: Duration = Duration::from_secs(60);
const AC7_LIMIT: Duration = Duration::from_secs(600);

/// Every transformer call goes through here so AC8 sees all of them.
#[derive(Default)]
struct Ledger {
    calls: usize,
    failures: Vec<String>,
}

impl Ledger {
    fn run<E: std::fmt::Display>(&mut self, what: &str, m: &Term, r: Result<Derivation, E>) -> Option<Derivation> {
        self.calls += 1;
        match r {
            Ok(d) => {
                let report = check_derivation(&d);
                if report.is_valid() {
                    Some(d)
                } else {
                    self.failures.push(format!("{what} on {m}: {report}"));
                    None
                }
            }
            Err(e) => {
                self.failures.push(format!("{what} on {m}: {e}"));
                None
            }
        }
    }
}

#[derive(Default)]
struct Criterion {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Criterion {
    fn expect(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(msg());
        }
    }

    fn report(&self, name: &str, title: &str) -> bool {
        let ok = self.failures.is_empty();
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!("{name} {verdict} {title}; {}", self.notes.join("; "));
        for f in self.failures.iter().take(5) {
            println!("    {f}");
        }
        if self.failures.len() > 5 {
            println!("    … {} more", self.failures.len() - 5);
        }
        ok
    }
}

fn nd_root_matches(nd: &Derivation, seq: &Derivation) -> bool {
    *nd.context() == collapse(seq.context()).to_seq() && nd.subject() == seq.subject() && nd.ty() == seq.ty()
}

fn corpus() -> (Vec<Term>, Vec<Term>) {
    let mut main = enumerate_terms(&CorpusSpec::closed(EXHAUSTIVE_MAX));
    main.extend(sample_closed(SAMPLE_MAX, SAMPLE_SIZE, SAMPLE_SEED));
    (main, wn_not_sn_family(WN_FAMILY_P))
}

fn ac1(ledger: &mut Ledger) -> Criterion {
    let mut c = Criterion::default();
    let m = parse_term("\\x. x x").unwrap();
    let start = Instant::now();
    let r = type_sn(&m, FUEL).map(|(_, _, d)| d);
    let elapsed = start.elapsed();
    let expected = parse_type("(φ0 & (φ0 -> φ1)) -> φ1").unwrap();
    match ledger.run("type_sn", &m, r) {
        Some(d) => {
            c.expect(d.system == System::Seq, || format!("system {}", d.system));
            c.expect(d.context().is_empty(), || format!("context {}", d.context()));
            c.expect(equivalent(d.ty(), &expected, false), || format!("type {}", d.ty()));
            c.notes.push(format!("type {}", d.ty()));
        }
        None => c.failures.push("no derivation".into()),
    }
    c.expect(elapsed < AC1_LIMIT, || format!("took {elapsed:?}"));
    c.notes.push(format!("{elapsed:?} (limit {AC1_LIMIT:?})"));
    c
}

struct Typed {
    term: Term,
    seq: Option<Derivation>,
    wn: Option<Derivation>,
}

/// AC2, AC3, AC4 and the typing half of AC5.
fn characterisation(ledger: &mut Ledger, main: &[Term], family: &[Term]) -> (Criterion, Criterion, Criterion, Vec<Typed>) {
    let (mut c2, mut c3, mut c4) = (Criterion::default(), Criterion::default(), Criterion::default());
    let start = Instant::now();
    let mut unknown = Vec::new();
    let (mut sn, mut non_sn, mut wn_not_sn, mut seq_checked) = (0, 0, 0, 0);
    let mut typed = Vec::new();
    let all: Vec<(&Term, bool)> = main.iter().map(|t| (t, true)).chain(family.iter().map(|t| (t, false))).collect();
    for (m, in_main) in all {
        let oracle = check_sn(m, FUEL);
        let ts = type_sn(m, FUEL);
        let mut seq = None;
        match (&oracle, &ts) {
            (SnEvidence::Unknown { .. }, _) => unknown.push(m.to_string()),
            (SnEvidence::Sn { .. }, Ok(_)) => sn += 1,
            (SnEvidence::NonSn { .. }, Err(_)) => non_sn += 1,
            (o, r) => c2.failures.push(format!("{m}: oracle {o:?}, type_sn ok={}", r.is_ok())),
        }
        if let Ok((_, _, d)) = ts {
            if let Some(d) = ledger.run("type_sn", m, Ok::<_, String>(d)) {
                let rcap = rule_census(&d).get(&Rule::RCap).copied().unwrap_or(0);
                c2.expect(rcap == 0, || format!("{m}: {rcap} (R∩) nodes"));
                seq = Some(d);
            }
        }

        let lo = normalize_lo(m, FUEL);
        let tw = type_wn(m, FUEL);
        c4.expect(lo.is_wn() == tw.is_ok(), || format!("{m}: normalize_lo wn={} type_wn ok={}", lo.is_wn(), tw.is_ok()));
        let mut wn = None;
        if let Ok((k, a, d, _)) = tw {
            c4.expect(a.is_omega_free() && k.to_seq().is_omega_free(), || format!("{m}: ω in root {k:?} ⊢ {a}"));
            wn = ledger.run("type_wn", m, Ok::<_, String>(d));
            if matches!(oracle, SnEvidence::NonSn { .. }) {
                c4.expect(seq.is_none(), || format!("{m}: non-SN term typed in SEQ"));
                wn_not_sn += 1;
            }
        }
        if let Some(d) = &seq {
            let nd = ledger.run("seq_to_nd", m, seq_to_nd(d));
            let mut seqs = vec![d.clone()];
            if let Some(nd) = nd {
                seqs.extend(ledger.run("nd_to_seq", m, nd_to_seq(&nd)));
            }
            for s in seqs {
                seq_checked += 1;
                c3.expect(check_sn(s.subject(), FUEL).is_sn(), || format!("typed subject {} not SN", s.subject()));
            }
        }
        if in_main || wn.is_some() {
            typed.push(Typed { term: m.clone(), seq, wn });
        }
    }
    let elapsed = start.elapsed();
    c2.expect(elapsed < AC2_LIMIT, || format!("took {elapsed:?}"));
    c2.notes.push(format!("{} terms: sn {sn}, non-sn {non_sn}, unknown {} excluded", main.len() + family.len(), unknown.len()));
    for u in unknown.iter().take(5) {
        c2.notes.push(format!("unknown {u}"));
    }
    c2.notes.push(format!("{elapsed:?} (limit {AC2_LIMIT:?})"));
    c3.notes.push(format!("{seq_checked} SEQ derivations, all subjects SN"));
    c4.expect(wn_not_sn >= MIN_WN_NOT_SN, || format!("only {wn_not_sn} WN-not-SN terms typed"));
    c4.notes.push(format!("{wn_not_sn} WN-not-SN terms typed in NDω (need ≥ {MIN_WN_NOT_SN})"));
    (c2, c3, c4, typed)
}

fn ac5(ledger: &mut Ledger, typed: &[Typed]) -> Criterion {
    let mut c = Criterion::default();
    let mut n = 0;
    for t in typed {
        let m = &t.term;
        if let Some(d) = &t.seq {
            n += 1;
            if let Some(nd) = ledger.run("seq_to_nd", m, seq_to_nd(d)) {
                c.expect(nd_root_matches(&nd, d) && nd.system == System::Nd, || format!("seq_to_nd root on {m}"));
                if let Some(back) = ledger.run("nd_to_seq", m, nd_to_seq(&nd)) {
                    c.expect(nd_root_matches(&nd, &back), || format!("nd_to_seq root on {m}"));
                    if let Some(nd2) = ledger.run("seq_to_nd", m, seq_to_nd(&back)) {
                        c.expect(nd2.conclusion == nd.conclusion, || format!("ND round trip on {m}"));
                    }
                }
            }
            if let Some(l) = ledger.run("betas_to_betal", m, betas_to_betal(d)) {
                c.expect(l.conclusion == d.conclusion && l.system == System::SeqL, || format!("betas_to_betal root on {m}"));
                if let Some(s) = ledger.run("betal_to_betas", m, betal_to_betas(&l)) {
                    c.expect(s.conclusion == d.conclusion, || format!("betal_to_betas root on {m}"));
                }
                if let Some(e) = ledger.run("omega_erase", m, omega_erase(&l.rebrand(System::SeqLOmega))) {
                    c.expect(e.conclusion == d.conclusion, || format!("omega_erase root on {m}"));
                }
                if let Some(nd) = ledger.run("seq_to_nd", m, seq_to_nd(&l)) {
                    c.expect(nd_root_matches(&nd, d), || format!("seq_to_nd(ℓ) root on {m}"));
                }
            }
        }
        if let Some(d) = &t.wn {
            n += 1;
            if let Some(s) = ledger.run("nd_to_seq", m, nd_to_seq(d)) {
                c.expect(nd_root_matches(d, &s) && s.system == System::SeqOmega, || format!("nd_to_seq(ω) root on {m}"));
                if let Some(nd) = ledger.run("seq_to_nd", m, seq_to_nd(&s)) {
                    c.expect(nd.conclusion == d.conclusion, || format!("NDω round trip on {m}"));
                }
                if let Some(l) = ledger.run("betas_to_betal", m, betas_to_betal(&s)) {
                    c.expect(l.conclusion == s.conclusion, || format!("betas_to_betal(ω) root on {m}"));
                    if let Some(b) = ledger.run("betal_to_betas", m, betal_to_betas(&l)) {
                        c.expect(b.conclusion == s.conclusion, || format!("betal_to_betas(ω) root on {m}"));
                    }
                    if let Some(nd) = ledger.run("seq_to_nd", m, seq_to_nd(&l)) {
                        c.expect(nd.conclusion == d.conclusion, || format!("seq_to_nd(ℓω) root on {m}"));
                    }
                }
            }
        }
    }
    c.notes.push(format!("{n} source derivations translated"));
    c
}

// ---------------------------------------------------------------------------
// AC6: the preorder against a rule-closure oracle

fn types_up_to(size: usize, omega: bool) -> Vec<Type> {
    let mut by_size: Vec<Vec<Type>> = vec![vec![]; size + 1];
    by_size[1] = vec![Type::var("φ0"), Type::var("φ1")];
    if omega {
        by_size[1].push(Type::Omega);
    }
    for n in 2..=size {
        let mut out = Vec::new();
        for l in 1..n - 1 {
            for a in &by_size[l] {
                for b in &by_size[n - 1 - l] {
                    out.push(Type::arrow(a.clone(), b.clone()));
                    out.push(Type::inter(a.clone(), b.clone()));
                }
            }
        }
        by_size[n] = out;
    }
    by_size.concat()
}

/// Least relation on `u` closed under reflexivity, projections,
/// transitivity and ∩-introduction (plus `A ≤ ω` when `omega`).
fn closure_oracle(u: &[Type], omega: bool) -> Vec<Vec<bool>> {
    let index: BTreeMap<&Type, usize> = u.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let n = u.len();
    let mut r = vec![vec![false; n]; n];
    for (i, t) in u.iter().enumerate() {
        r[i][i] = true;
        if let Type::Inter(a, b) = t {
            r[i][index[&**a]] = true;
            r[i][index[&**b]] = true;
        }
        if omega {
            r[i][index[&Type::Omega]] = true;
        }
    }
    let inters: Vec<(usize, usize, usize)> = u
        .iter()
        .enumerate()
        .filter_map(|(i, t)| match t {
            Type::Inter(a, b) => Some((i, index[&**a], index[&**b])),
            _ => None,
        })
        .collect();
    loop {
        let mut changed = false;
        for k in 0..n {
            for i in 0..n {
                if r[i][k] {
                    for j in 0..n {
                        if r[k][j] && !r[i][j] {
                            r[i][j] = true;
                            changed = true;
                        }
                    }
                }
            }
        }
        for row in r.iter_mut() {
            for &(bc, b, c) in &inters {
                if row[b] && row[c] && !row[bc] {
                    row[bc] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            return r;
        }
    }
}

fn ac6() -> Criterion {
    let mut c = Criterion::default();
    let start = Instant::now();
    for omega in [false, true] {
        let u = types_up_to(5, omega);
        let r = closure_oracle(&u, omega);
        for (i, a) in u.iter().enumerate() {
            for (j, b) in u.iter().enumerate() {
                let ours = if omega { leq_omega(a, b) } else { leq(a, b).unwrap() };
                c.expect(ours == r[i][j], || format!("{a} ≤{} {b}: ours {ours}, oracle {}", if omega { "ω" } else { "" }, r[i][j]));
            }
        }
        c.notes.push(format!("{} pairs{}", u.len() * u.len(), if omega { " with ω" } else { "" }));
    }
    let elapsed = start.elapsed();
    c.expect(elapsed < AC6_LIMIT, || format!("took {elapsed:?}"));
    c.notes.push(format!("{elapsed:?} (limit {AC6_LIMIT:?})"));
    c
}

// ---------------------------------------------------------------------------
// AC7: approximation round trip

fn round_trip(ledger: &mut Ledger, c: &mut Criterion, m: &Term, ll: &Derivation) {
    let ap = match approximate(ll, FUEL) {
        Ok(ap) => ap,
        Err(e) => {
            c.failures.push(format!("approximate on {m}: {e}"));
            return;
        }
    };
    let Some(d1) = ledger.run("approximate", m, Ok::<_, String>(ap.derivation.clone())) else { return };
    c.expect(ap.trace.replays() && alpha_eq(&ap.trace.start, m) && alpha_eq(ap.trace.end(), &ap.term), || {
        format!("trace on {m} does not replay to {}", ap.term)
    });
    let Some(nd) = ledger.run("seq_to_nd", m, seq_to_nd(&d1)) else { return };
    let Some(w) = approx_witness(nd.subject(), &ap.term) else {
        c.failures.push(format!("{} is not below {}", nd.subject(), ap.term));
        return;
    };
    let Some(mut d) = ledger.run("unapproximate", m, unapproximate(&nd, &ap.term, &w)) else { return };
    for (i, (p, _)) in ap.trace.steps.iter().enumerate().rev() {
        match ledger.run("subject_expand", m, subject_expand(&d, ap.trace.term_at(i), p)) {
            Some(e) => d = e,
            None => return,
        }
    }
    let gamma: SeqContext = collapse(ll.context()).to_seq();
    c.expect(alpha_eq(d.subject(), m) && d.ty() == ll.ty() && *d.context() == gamma, || {
        format!("round trip on {m} ends at {} ⊢ {} : {}", d.context(), d.subject(), d.ty())
    });
}

fn ac7(ledger: &mut Ledger, typed: &[Typed]) -> Criterion {
    let mut c = Criterion::default();
    let start = Instant::now();
    let mut n = 0;
    for t in typed {
        let m = &t.term;
        if let Some(d) = &t.seq {
            if let Some(l) = ledger.run("betas_to_betal", m, betas_to_betal(d)) {
                n += 1;
                round_trip(ledger, &mut c, m, &l.rebrand(System::SeqLOmega));
            }
        }
        if let Some(d) = &t.wn {
            let s = ledger.run("nd_to_seq", m, nd_to_seq(d));
            if let Some(l) = s.and_then(|s| ledger.run("betas_to_betal", m, betas_to_betal(&s))) {
                n += 1;
                round_trip(ledger, &mut c, m, &l);
            }
        }
    }
    let elapsed = start.elapsed();
    c.expect(elapsed < AC7_LIMIT, || format!("took {elapsed:?}"));
    c.notes.push(format!("{n} SEQℓω typings"));
    c.notes.push(format!("{elapsed:?} (limit {AC7_LIMIT:?})"));
    c
}

fn main() {
    let mut ledger = Ledger::default();
    let (main_corpus, family) = corpus();
    let mut ok = true;

    ok &= ac1(&mut ledger).report("AC1", "type-sn on λx.xx");
    let (c2, c3, c4, typed) = characterisation(&mut ledger, &main_corpus, &family);
    ok &= c2.report("AC2", "SN characterisation");
    ok &= c3.report("AC3", "typed implies SN");
    ok &= c4.report("AC4", "WN characterisation");
    ok &= ac5(&mut ledger, &typed).report("AC5", "system equivalences");
    ok &= ac6().report("AC6", "preorder decision");
    ok &= ac7(&mut ledger, &typed).report("AC7", "approximation theorem");

    let c8 = Criterion {
        notes: vec![format!("{} transformer invocations, {} rejected", ledger.calls, ledger.failures.len())],
        failures: ledger.failures.clone(),
    };
    ok &= c8.report("AC8", "transformer totality");

    if !ok {
        std::process::exit(1);
    }
}
