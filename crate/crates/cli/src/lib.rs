//! The `itlab` command-line front end.
//!
//! [`run`] takes an argument vector and two sinks and returns the exit
//! code: 0 on success, 1 for a negative verdict, 2 for usage and input
//! errors.

use std::collections::{BTreeMap, VecDeque};
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use itlab::approx::{alpha_map, approximate};
use itlab::corpus::{enumerate_terms, CorpusSpec};
use itlab::derivation::{check_derivation, rule_census, Derivation, Rule, System};
use itlab::format::{parse_derivation, print_derivation};
use itlab::reduce::{check_sn, leftmost_outermost, normalize_lo, step, ReductionTrace, SnEvidence, WnEvidence};
use itlab::term::{parse_term, parse_term_with, Position, Term};
use itlab::transform::{betal_to_betas, betas_to_betal, nd_to_seq, omega_erase, seq_to_nd, subject_expand};
use itlab::typability::{type_sn, type_wn, TypabilityError};
use itlab::types::{leq, leq_omega, parse_type};

mod prop;

pub const DEFAULT_FUEL: usize = 10_000;

#[derive(Parser, Debug)]
#[command(name = "itlab", version, about = "Intersection type systems for the λ-calculus")]
struct Cli {
    /// Print a single machine-readable summary line.
    #[arg(long, global = true)]
    porcelain: bool,
    /// Step budget for reduction, typing and search.
    #[arg(long, global = true, env = "ITLAB_FUEL", default_value_t = DEFAULT_FUEL)]
    fuel: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct TermArg {
    /// A λ-term, or `-` to read it from standard input.
    term: String,
}

#[derive(Args, Debug)]
struct FileArg {
    /// A derivation file, or `-` for standard input.
    file: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Strategy {
    /// Leftmost-outermost to normal form.
    Lo,
    /// A single step at `--at`.
    Pos,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Parse a term and print it with its size and free variables.
    Parse {
        #[command(flatten)]
        t: TermArg,
        /// Accept ⊥ (written `_|_`).
        #[arg(long)]
        bottom: bool,
    },
    /// Reduce a term.
    Reduce {
        #[command(flatten)]
        t: TermArg,
        #[arg(long, value_enum, default_value_t = Strategy::Lo)]
        strategy: Strategy,
        /// Redex position for `--strategy pos`, e.g. `fun.arg` or `root`.
        #[arg(long)]
        at: Option<Position>,
    },
    /// Decide strong normalisation by exploring the reduction graph.
    Sn(TermArg),
    /// Decide weak normalisation by leftmost-outermost reduction.
    Wn(TermArg),
    /// Type a strongly normalising term in the sequent system.
    TypeSn {
        #[command(flatten)]
        t: TermArg,
        /// Write the derivation here instead of standard output.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Type a weakly normalising term in natural deduction with ω.
    TypeWn {
        #[command(flatten)]
        t: TermArg,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Check a derivation file.
    Check {
        #[command(flatten)]
        f: FileArg,
        /// System to check against; defaults to the file's own.
        #[arg(long)]
        system: Option<String>,
    },
    /// Translate a derivation into another system.
    Translate {
        #[command(flatten)]
        f: FileArg,
        #[arg(long)]
        to: String,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Expand the subject of an ω natural-deduction derivation to a term
    /// that reduces to it in one step at `--at`.
    Expand {
        #[command(flatten)]
        f: FileArg,
        /// The expanded term.
        #[arg(long)]
        term: String,
        #[arg(long)]
        at: Position,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Decide the preorder on types.
    Leq {
        a: String,
        b: String,
        #[arg(long)]
        omega: bool,
    },
    /// Approximate a SEQℓω derivation: a reduct M′ and a typing of α(M′).
    Approx {
        #[command(flatten)]
        f: FileArg,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// List all terms up to a size.
    Enumerate {
        #[arg(long)]
        max_size: usize,
        #[arg(long)]
        closed: bool,
        #[arg(long)]
        bottom: bool,
    },
    /// Run a named property suite over a term corpus.
    Prop {
        suite: String,
        #[arg(long, default_value_t = 6)]
        max_size: usize,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Verdict(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Verdict(_) => 1,
            CliError::Input(_) | CliError::Io(_) => 2,
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

type Res<T = ()> = Result<T, CliError>;

/// Runs the CLI on `argv` (including the program name).
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let mut ctx = Ctx { out, porcelain: cli.porcelain, fuel: cli.fuel };
    match ctx.dispatch(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "itlab: {e}");
            e.code()
        }
    }
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    porcelain: bool,
    fuel: usize,
}

fn read_source(path: &str) -> Res<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(path.to_string())
    }
}

fn read_file(path: &PathBuf) -> Res<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }
}

fn term_of(t: &TermArg) -> Res<Term> {
    parse_term(&read_source(&t.term)?).map_err(input)
}

fn system_of(name: &str) -> Res<System> {
    System::from_name(name).ok_or_else(|| CliError::Input(format!("unknown system {name} (expected nd, ndw, ls, lsw, ll or llw)")))
}

fn census_line(d: &Derivation) -> String {
    let census = rule_census(d);
    Rule::ALL
        .iter()
        .filter_map(|r| census.get(r).map(|n| format!("{r}={n}")))
        .collect::<Vec<_>>()
        .join(",")
}

fn kv(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k}={}", quote(v))).collect::<Vec<_>>().join(" ")
}

fn quote(v: &str) -> String {
    if !v.is_empty() && v.chars().all(|c| c.is_ascii_alphanumeric() || "._-,=:".contains(c)) {
        v.to_string()
    } else {
        format!("{v:?}")
    }
}

impl Ctx<'_> {
    fn say(&mut self, human: impl FnOnce() -> String, porcelain: &[(&str, String)]) -> Res {
        if self.porcelain {
            writeln!(self.out, "{}", kv(porcelain))?;
        } else {
            writeln!(self.out, "{}", human())?;
        }
        Ok(())
    }

    /// Writes a derivation to `out` or, without `--porcelain`, to stdout.
    fn emit(&mut self, d: &Derivation, out: &Option<PathBuf>) -> Res {
        let text = print_derivation(d);
        match out {
            Some(p) => std::fs::write(p, format!("{text}\n"))?,
            None if !self.porcelain => writeln!(self.out, "{text}")?,
            None => {}
        }
        Ok(())
    }

    fn trace_lines(&mut self, tr: &ReductionTrace) -> Res {
        if self.porcelain {
            return Ok(());
        }
        for (i, (p, t)) in tr.steps.iter().enumerate() {
            writeln!(self.out, "{:>4} {p:<12} {t}", i + 1)?;
        }
        Ok(())
    }

    fn dispatch(&mut self, cmd: Cmd) -> Res<i32> {
        match cmd {
            Cmd::Parse { t, bottom } => {
                let m = parse_term_with(&read_source(&t.term)?, bottom).map_err(input)?;
                let free: Vec<String> = m.free_vars().into_iter().collect();
                self.say(
                    || format!("{m}\nsize {}\nfree {}", m.size(), free.join(" ")),
                    &[("term", m.to_string()), ("size", m.size().to_string()), ("free", free.join(","))],
                )?;
            }
            Cmd::Reduce { t, strategy, at } => {
                let m = term_of(&t)?;
                match strategy {
                    Strategy::Lo => match normalize_lo(&m, self.fuel) {
                        WnEvidence::Wn { normal_form, trace } => {
                            self.trace_lines(&trace)?;
                            self.say(
                                || format!("normal form {normal_form} after {} steps", trace.len()),
                                &[("normal_form", normal_form.to_string()), ("steps", trace.len().to_string())],
                            )?;
                        }
                        WnEvidence::Unknown { fuel_spent } => {
                            return Err(CliError::Verdict(format!("no normal form within {fuel_spent} steps")))
                        }
                    },
                    Strategy::Pos => {
                        let p = match at {
                            Some(p) => p,
                            None => leftmost_outermost(&m).ok_or_else(|| CliError::Verdict(format!("{m} is normal")))?,
                        };
                        let n = step(&m, &p).map_err(input)?;
                        self.say(|| format!("{p} {n}"), &[("at", p.to_string()), ("term", n.to_string())])?;
                    }
                }
            }
            Cmd::Sn(t) => {
                let m = term_of(&t)?;
                let ev = check_sn(&m, self.fuel);
                let (verdict, detail) = match &ev {
                    SnEvidence::Sn { max_len } => ("SN", format!("longest reduction {max_len}")),
                    SnEvidence::NonSn { loop_witness } => ("NonSN", format!("cycle of {} steps", loop_witness.len())),
                    SnEvidence::Unknown { fuel_spent } => ("Unknown", format!("fuel spent {fuel_spent}")),
                };
                self.say(|| format!("{verdict} ({detail})"), &[("verdict", verdict.into()), ("detail", detail.clone())])?;
                return Ok(if ev.is_sn() { 0 } else { 1 });
            }
            Cmd::Wn(t) => {
                let m = term_of(&t)?;
                let ev = normalize_lo(&m, self.fuel);
                match &ev {
                    WnEvidence::Wn { normal_form, trace } => self.say(
                        || format!("WN (normal form {normal_form} after {} steps)", trace.len()),
                        &[("verdict", "WN".into()), ("normal_form", normal_form.to_string()), ("steps", trace.len().to_string())],
                    )?,
                    WnEvidence::Unknown { fuel_spent } => self.say(
                        || format!("Unknown (fuel spent {fuel_spent})"),
                        &[("verdict", "Unknown".into()), ("steps", fuel_spent.to_string())],
                    )?,
                }
                return Ok(if ev.is_wn() { 0 } else { 1 });
            }
            Cmd::TypeSn { t, out } => {
                let m = term_of(&t)?;
                let (g, a, d) = type_sn(&m, self.fuel).map_err(verdict)?;
                let census = census_line(&d);
                self.say(
                    || format!("{}\nrules {census}", d.conclusion),
                    &[("context", g.to_string()), ("type", a.to_string()), ("rules", census.clone())],
                )?;
                self.emit(&d, &out)?;
            }
            Cmd::TypeWn { t, out } => {
                let m = term_of(&t)?;
                let (k, a, d, trace) = type_wn(&m, self.fuel).map_err(verdict)?;
                let census = census_line(&d);
                let g = k.to_seq();
                self.trace_lines(&trace)?;
                self.say(
                    || format!("{}\nrules {census}", d.conclusion),
                    &[("context", g.to_string()), ("type", a.to_string()), ("steps", trace.len().to_string()), ("rules", census.clone())],
                )?;
                self.emit(&d, &out)?;
            }
            Cmd::Check { f, system } => {
                let text = read_file(&f.file)?;
                let d = load(&text, system.as_deref())?;
                let report = check_derivation(&d);
                let ok = report.is_valid();
                self.say(
                    || if ok { format!("valid {} derivation of {}", d.system, d.conclusion) } else { format!("invalid\n{report}") },
                    &[
                        ("valid", ok.to_string()),
                        ("system", d.system.to_string()),
                        ("diagnostics", report.diagnostics.len().to_string()),
                    ],
                )?;
                return Ok(if ok { 0 } else { 1 });
            }
            Cmd::Translate { f, to, out } => {
                let d = load(&read_file(&f.file)?, None)?;
                let target = system_of(&to)?;
                let t = translate(&d, target)?;
                self.say(
                    || format!("{} derivation of {}", t.system, t.conclusion),
                    &[("system", t.system.to_string()), ("sequent", t.conclusion.to_string())],
                )?;
                self.emit(&t, &out)?;
            }
            Cmd::Expand { f, term, at, out } => {
                let d = load(&read_file(&f.file)?, None)?;
                let m = parse_term(&read_source(&term)?).map_err(input)?;
                let e = subject_expand(&d, &m, &at).map_err(input)?;
                self.say(|| format!("{}", e.conclusion), &[("sequent", e.conclusion.to_string())])?;
                self.emit(&e, &out)?;
            }
            Cmd::Leq { a, b, omega } => {
                let (a, b) = (parse_type(&a).map_err(input)?, parse_type(&b).map_err(input)?);
                let holds = if omega { leq_omega(&a, &b) } else { leq(&a, &b).map_err(input)? };
                self.say(|| holds.to_string(), &[("holds", holds.to_string())])?;
                return Ok(if holds { 0 } else { 1 });
            }
            Cmd::Approx { f, out } => {
                let d = load(&read_file(&f.file)?, None)?;
                let ap = approximate(&d, self.fuel).map_err(|e| CliError::Verdict(e.to_string()))?;
                let am = alpha_map(&ap.term).map_err(input)?;
                self.trace_lines(&ap.trace)?;
                self.say(
                    || format!("M' {}\nα(M') {am}", ap.term),
                    &[("m_prime", ap.term.to_string()), ("approximant", am.to_string()), ("steps", ap.trace.len().to_string())],
                )?;
                self.emit(&ap.derivation, &out)?;
            }
            Cmd::Enumerate { max_size, closed, bottom } => {
                if max_size == 0 {
                    return Err(CliError::Input("--max-size must be at least 1".into()));
                }
                let spec = CorpusSpec { max_size, closed_only: closed, include_bottom: bottom, seed: 0 };
                let terms = enumerate_terms(&spec);
                if self.porcelain {
                    writeln!(self.out, "count={}", terms.len())?;
                } else {
                    for t in terms {
                        writeln!(self.out, "{t}")?;
                    }
                }
            }
            Cmd::Prop { suite, max_size } => {
                let report = prop::run_suite(&suite, max_size, self.fuel).map_err(CliError::Input)?;
                if !self.porcelain {
                    for c in &report.counterexamples {
                        writeln!(self.out, "counterexample {c}")?;
                    }
                }
                let failed = report.counterexamples.len();
                self.say(
                    || format!("{suite}: {} cases, {failed} counterexamples", report.cases),
                    &[("suite", suite.clone()), ("cases", report.cases.to_string()), ("counterexamples", failed.to_string())],
                )?;
                return Ok(if failed == 0 { 0 } else { 1 });
            }
        }
        Ok(0)
    }
}

fn verdict(e: TypabilityError) -> CliError {
    match e {
        TypabilityError::FuelExhausted { .. } => CliError::Verdict(e.to_string()),
        other => CliError::Input(other.to_string()),
    }
}

fn load(text: &str, system: Option<&str>) -> Res<Derivation> {
    let sys = system.map(system_of).transpose()?;
    let d = parse_derivation(text, sys).map_err(input)?;
    Ok(match sys {
        Some(s) if s != d.system => d.rebrand(s),
        _ => d,
    })
}

type Step = fn(&Derivation) -> itlab::transform::Result<Derivation>;

fn edges(from: System) -> Vec<(System, Step)> {
    use System::*;
    let mut out: Vec<(System, Step)> = Vec::new();
    match from {
        Nd => out.push((Seq, nd_to_seq)),
        NdOmega => out.push((SeqOmega, nd_to_seq)),
        Seq => {
            out.push((Nd, seq_to_nd));
            out.push((SeqL, betas_to_betal));
        }
        SeqOmega => {
            out.push((NdOmega, seq_to_nd));
            out.push((SeqLOmega, betas_to_betal));
        }
        SeqL => {
            out.push((NdOmega, seq_to_nd));
            out.push((SeqOmega, betal_to_betas));
        }
        SeqLOmega => {
            out.push((NdOmega, seq_to_nd));
            out.push((SeqOmega, betal_to_betas));
            out.push((SeqL, omega_erase));
        }
    }
    out
}

/// Each system embeds in its ω extension by a change of label.
fn rebrand_step(from: System) -> Option<System> {
    let to = from.with_omega();
    (to != from).then_some(to)
}

/// Translates along the shortest chain of translations to `target`.
fn translate(d: &Derivation, target: System) -> Res<Derivation> {
    if !check_derivation(d).is_valid() {
        return Err(CliError::Verdict(format!("input derivation is invalid\n{}", check_derivation(d))));
    }
    let mut prev: BTreeMap<System, (System, Option<Step>)> = BTreeMap::new();
    let mut queue = VecDeque::from([d.system]);
    while let Some(s) = queue.pop_front() {
        if s == target {
            break;
        }
        let mut next: Vec<(System, Option<Step>)> = edges(s).into_iter().map(|(t, f)| (t, Some(f))).collect();
        next.extend(rebrand_step(s).map(|t| (t, None)));
        for (t, f) in next {
            if t != d.system && !prev.contains_key(&t) {
                prev.insert(t, (s, f));
                queue.push_back(t);
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = target;
    while cur != d.system {
        let Some(&(p, f)) = prev.get(&cur) else {
            return Err(CliError::Input(format!("no translation from {} to {target}", d.system)));
        };
        path.push((cur, f));
        cur = p;
    }
    let mut out = d.clone();
    for (to, f) in path.into_iter().rev() {
        out = match f {
            Some(f) => f(&out).map_err(|e| CliError::Verdict(e.to_string()))?,
            None => out.rebrand(to),
        };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_pair_of_systems_is_connected() {
        let d = itlab::typability::type_sn(&parse_term("\\x. x").unwrap(), 100).unwrap().2;
        for to in System::ALL {
            let t = translate(&d, to).unwrap();
            assert_eq!(t.system, to);
            assert!(check_derivation(&t).is_valid());
        }
    }
}
