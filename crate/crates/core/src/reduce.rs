//! β-reduction and the normalisation oracles the type systems are checked
//! against: leftmost-outermost normalisation, exhaustive strong
//! normalisation search, and common reducts.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::term::{alpha_eq, parse_bottom_term, substitute, Canon, Dir, Position, Term};

pub const DEFAULT_SN_FUEL: usize = 10_000;
pub const DEFAULT_LO_FUEL: usize = 1_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("no β-redex at position {0}")]
    NotARedex(Position),
    #[error("malformed trace: {0}")]
    BadTrace(String),
}

/// All β-redex positions, in pre-order (node, then function, then argument,
/// then body), so the leftmost-outermost redex comes first.
pub fn redexes(t: &Term) -> Vec<Position> {
    fn go(t: &Term, here: &mut Vec<Dir>, out: &mut Vec<Position>) {
        match t {
            Term::App(f, a) => {
                if matches!(**f, Term::Lam(..)) {
                    out.push(Position(here.clone()));
                }
                here.push(Dir::Fun);
                go(f, here, out);
                here.pop();
                here.push(Dir::Arg);
                go(a, here, out);
                here.pop();
            }
            Term::Lam(_, b) => {
                here.push(Dir::Body);
                go(b, here, out);
                here.pop();
            }
            Term::Var(_) | Term::Bottom => {}
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

pub fn leftmost_outermost(t: &Term) -> Option<Position> {
    fn go(t: &Term, here: &mut Vec<Dir>) -> bool {
        match t {
            Term::App(f, a) => {
                if matches!(**f, Term::Lam(..)) {
                    return true;
                }
                here.push(Dir::Fun);
                if go(f, here) {
                    return true;
                }
                here.pop();
                here.push(Dir::Arg);
                if go(a, here) {
                    return true;
                }
                here.pop();
                false
            }
            Term::Lam(_, b) => {
                here.push(Dir::Body);
                if go(b, here) {
                    return true;
                }
                here.pop();
                false
            }
            Term::Var(_) | Term::Bottom => false,
        }
    }
    let mut here = Vec::new();
    go(t, &mut here).then_some(Position(here))
}

pub fn is_normal(t: &Term) -> bool {
    leftmost_outermost(t).is_none()
}

/// Contracts the redex at `p`.
pub fn step(t: &Term, p: &Position) -> Result<Term, ReduceError> {
    let contractum = match t.subterm(p) {
        Some(Term::App(f, n)) => match &**f {
            Term::Lam(x, m) => substitute(m, x, n),
            _ => return Err(ReduceError::NotARedex(p.clone())),
        },
        _ => return Err(ReduceError::NotARedex(p.clone())),
    };
    t.replace_at(&p.0, contractum).ok_or_else(|| ReduceError::NotARedex(p.clone()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionTrace {
    pub start: Term,
    pub steps: Vec<(Position, Term)>,
}

impl ReductionTrace {
    pub fn new(start: Term) -> Self {
        ReductionTrace { start, steps: Vec::new() }
    }

    pub fn from_positions<'a, I>(start: Term, positions: I) -> Result<Self, ReduceError>
    where
        I: IntoIterator<Item = &'a Position>,
    {
        let mut tr = ReductionTrace::new(start);
        for p in positions {
            tr.push(p.clone())?;
        }
        Ok(tr)
    }

    pub fn push(&mut self, p: Position) -> Result<(), ReduceError> {
        let next = step(self.end(), &p)?;
        self.steps.push((p, next));
        Ok(())
    }

    pub fn end(&self) -> &Term {
        self.steps.last().map(|(_, t)| t).unwrap_or(&self.start)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn positions(&self) -> impl Iterator<Item = &Position> {
        self.steps.iter().map(|(p, _)| p)
    }

    /// The term before step `i` (index 0 is the start).
    pub fn term_at(&self, i: usize) -> &Term {
        if i == 0 {
            &self.start
        } else {
            &self.steps[i - 1].1
        }
    }

    /// Replays every step from the start and checks each recorded term.
    pub fn replays(&self) -> bool {
        let mut cur = self.start.clone();
        for (p, expected) in &self.steps {
            match step(&cur, p) {
                Ok(next) if alpha_eq(&next, expected) => cur = next,
                _ => return false,
            }
        }
        true
    }

    /// `self` followed by `other`, which must start where `self` ends.
    pub fn concat(&self, other: &ReductionTrace) -> Result<Self, ReduceError> {
        if !alpha_eq(self.end(), &other.start) {
            return Err(ReduceError::BadTrace("traces do not meet".into()));
        }
        ReductionTrace::from_positions(self.start.clone(), self.positions().chain(other.positions()))
    }

    pub fn parse(text: &str) -> Result<Self, ReduceError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with(";;"));
        let head = lines.next().ok_or_else(|| ReduceError::BadTrace("empty trace".into()))?;
        let start = parse_bottom_term(head).map_err(|e| ReduceError::BadTrace(e.to_string()))?;
        let mut tr = ReductionTrace::new(start);
        for line in lines {
            let (pos, term) = line
                .split_once("->")
                .ok_or_else(|| ReduceError::BadTrace(format!("expected `<position> -> <term>` in `{line}`")))?;
            let pos: Position = pos.parse().map_err(ReduceError::BadTrace)?;
            let term = parse_bottom_term(term.trim()).map_err(|e| ReduceError::BadTrace(e.to_string()))?;
            tr.push(pos.clone())?;
            if !alpha_eq(tr.end(), &term) {
                return Err(ReduceError::BadTrace(format!("step at {pos} does not produce {term}")));
            }
        }
        Ok(tr)
    }
}

impl fmt::Display for ReductionTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.start)?;
        for (p, t) in &self.steps {
            writeln!(f, "{p} -> {t}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SnEvidence {
    /// Every reduction sequence terminates; the longest has `max_len` steps.
    Sn { max_len: usize },
    /// A reduction path that revisits an α-equal term.
    NonSn { loop_witness: ReductionTrace },
    Unknown { fuel_spent: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WnEvidence {
    Wn { normal_form: Term, trace: ReductionTrace },
    Unknown { fuel_spent: usize },
}

impl SnEvidence {
    pub fn is_sn(&self) -> bool {
        matches!(self, SnEvidence::Sn { .. })
    }
}

impl WnEvidence {
    pub fn is_wn(&self) -> bool {
        matches!(self, WnEvidence::Wn { .. })
    }
}

/// Total number of term nodes a search may create before it gives up with
/// an inconclusive verdict. Guards memory on terms that grow without bound.
pub const SPACE_BUDGET: usize = 8_000_000;

/// Leftmost-outermost normalisation with at most `fuel` steps.
pub fn normalize_lo(t: &Term, fuel: usize) -> WnEvidence {
    // Only positions are kept during the search; the trace is rebuilt once
    // a normal form is reached.
    let mut cur = t.clone();
    let mut positions = Vec::new();
    let mut space = 0usize;
    loop {
        let Some(p) = leftmost_outermost(&cur) else {
            let trace = ReductionTrace::from_positions(t.clone(), &positions).expect("positions replay");
            return WnEvidence::Wn { normal_form: cur, trace };
        };
        if positions.len() >= fuel || space > SPACE_BUDGET {
            return WnEvidence::Unknown { fuel_spent: positions.len() };
        }
        cur = step(&cur, &p).expect("leftmost-outermost position is a redex");
        space += cur.size();
        positions.push(p);
    }
}

struct Frame {
    term: Term,
    canon: Canon,
    via: Option<Position>,
    children: Vec<Position>,
    next: usize,
    best: usize,
}

impl Frame {
    fn new(term: Term, canon: Canon, via: Option<Position>) -> Self {
        let children = redexes(&term);
        Frame { term, canon, via, children, next: 0, best: 0 }
    }
}

/// Exhaustive depth-first exploration of the reduction graph. Loops are
/// detected on the current path by α-canonical form; finished subgraphs are
/// memoised. `fuel` bounds the total number of contractions performed.
pub fn check_sn(t: &Term, fuel: usize) -> SnEvidence {
    let mut memo: HashMap<Canon, usize> = HashMap::new();
    let mut on_path: HashSet<Canon> = HashSet::new();
    let mut spent = 0usize;
    let mut space = 0usize;
    let root = t.canonical();
    on_path.insert(root.clone());
    let mut stack = vec![Frame::new(t.clone(), root, None)];
    loop {
        let top = stack.last_mut().expect("stack is non-empty inside the loop");
        if top.next < top.children.len() {
            let pos = top.children[top.next].clone();
            top.next += 1;
            if spent >= fuel || space > SPACE_BUDGET {
                return SnEvidence::Unknown { fuel_spent: spent };
            }
            spent += 1;
            let child = step(&top.term, &pos).expect("redex position");
            space += child.size();
            let canon = child.canonical();
            if on_path.contains(&canon) {
                let mut positions: Vec<Position> = stack.iter().filter_map(|f| f.via.clone()).collect();
                positions.push(pos);
                let witness = ReductionTrace::from_positions(t.clone(), &positions).expect("path replays");
                return SnEvidence::NonSn { loop_witness: witness };
            }
            if let Some(&len) = memo.get(&canon) {
                top.best = top.best.max(1 + len);
                continue;
            }
            on_path.insert(canon.clone());
            stack.push(Frame::new(child, canon, Some(pos)));
        } else {
            let done = stack.pop().expect("non-empty");
            on_path.remove(&done.canon);
            match stack.last_mut() {
                Some(parent) => {
                    parent.best = parent.best.max(1 + done.best);
                    memo.insert(done.canon, done.best);
                }
                None => return SnEvidence::Sn { max_len: done.best },
            }
        }
    }
}

struct Side {
    seen: HashMap<Canon, (Option<Canon>, Option<Position>, Term)>,
    queue: VecDeque<Canon>,
}

impl Side {
    fn new(start: &Term) -> Self {
        let c = start.canonical();
        let mut seen = HashMap::new();
        seen.insert(c.clone(), (None, None, start.clone()));
        Side { seen, queue: VecDeque::from([c]) }
    }

    fn path_to(&self, target: &Canon) -> Vec<Position> {
        let mut out = Vec::new();
        let mut cur = target.clone();
        while let Some((Some(parent), Some(p), _)) = self.seen.get(&cur) {
            out.push(p.clone());
            cur = parent.clone();
        }
        out.reverse();
        out
    }
}

/// A common reduct of the endpoints of two traces from `m`, found by
/// alternating breadth-first expansion of both reduction graphs.
/// Returns the meeting term and the two connecting traces.
pub fn common_reduct(
    m: &Term,
    t1: &ReductionTrace,
    t2: &ReductionTrace,
    fuel: usize,
) -> Option<(Term, ReductionTrace, ReductionTrace)> {
    if !alpha_eq(&t1.start, m) || !alpha_eq(&t2.start, m) {
        return None;
    }
    let (a, b) = (t1.end().clone(), t2.end().clone());
    let mut sides = [Side::new(&a), Side::new(&b)];
    let starts = [a, b];
    let meet = |sides: &[Side; 2], c: &Canon| -> (Term, ReductionTrace, ReductionTrace) {
        let pa = sides[0].path_to(c);
        let pb = sides[1].path_to(c);
        let ta = ReductionTrace::from_positions(starts[0].clone(), &pa).expect("bfs path replays");
        let tb = ReductionTrace::from_positions(starts[1].clone(), &pb).expect("bfs path replays");
        (ta.end().clone(), ta, tb)
    };
    let c0 = starts[0].canonical();
    if sides[1].seen.contains_key(&c0) {
        return Some(meet(&sides, &c0));
    }
    let mut spent = 0usize;
    let mut space = 0usize;
    let mut turn = 0usize;
    while !sides[0].queue.is_empty() || !sides[1].queue.is_empty() {
        let me = turn % 2;
        turn += 1;
        let Some(c) = sides[me].queue.pop_front() else { continue };
        let term = sides[me].seen[&c].2.clone();
        for p in redexes(&term) {
            if spent >= fuel || space > SPACE_BUDGET {
                return None;
            }
            spent += 1;
            let child = step(&term, &p).expect("redex position");
            space += child.size();
            let cc = child.canonical();
            if sides[me].seen.contains_key(&cc) {
                continue;
            }
            sides[me].seen.insert(cc.clone(), (Some(c.clone()), Some(p), child));
            if sides[1 - me].seen.contains_key(&cc) {
                return Some(meet(&sides, &cc));
            }
            sides[me].queue.push_back(cc);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn pos(s: &str) -> Position {
        s.parse().unwrap()
    }

    #[test]
    fn redex_positions() {
        assert_eq!(redexes(&t("(\\x. x) y")), vec![Position::root()]);
        assert!(redexes(&t("\\x. x")).is_empty());
        assert_eq!(redexes(&t("(\\x. x x) ((\\y. y) z)")), vec![Position::root(), pos("arg")]);
    }

    #[test]
    fn single_steps() {
        assert_eq!(step(&t("(\\x. x x) y"), &Position::root()).unwrap(), t("y y"));
        assert_eq!(step(&t("(\\x. z) y"), &Position::root()).unwrap(), t("z"));
        let omega = t("(\\x. x x) (\\x. x x)");
        assert_eq!(step(&omega, &Position::root()).unwrap(), omega);
        assert_eq!(step(&t("x y"), &Position::root()), Err(ReduceError::NotARedex(Position::root())));
    }

    #[test]
    fn leftmost_outermost_normalisation() {
        match normalize_lo(&t("(\\x. \\y. x) a b"), 10) {
            WnEvidence::Wn { normal_form, trace } => {
                assert_eq!(normal_form, t("a"));
                assert_eq!(trace.len(), 2);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(normalize_lo(&t("(\\x. x x) (\\x. x x)"), 50), WnEvidence::Unknown { fuel_spent: 50 });
        match normalize_lo(&t("(\\x y. x) (\\z. z) ((\\x. x x) (\\x. x x))"), 10) {
            WnEvidence::Wn { normal_form, trace } => {
                assert!(alpha_eq(&normal_form, &t("\\z. z")));
                assert_eq!(trace.len(), 2);
                assert!(trace.replays());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sn_oracle() {
        assert_eq!(check_sn(&t("\\x. x"), 100), SnEvidence::Sn { max_len: 0 });
        match check_sn(&t("(\\x. x x) (\\x. x x)"), 100) {
            SnEvidence::NonSn { loop_witness } => {
                assert_eq!(loop_witness.len(), 1);
                assert!(loop_witness.replays());
                assert!(alpha_eq(loop_witness.end(), &loop_witness.start));
            }
            other => panic!("{other:?}"),
        }
        // (λx.xx)(λy.y) → (λy.y)(λy.y) → λy.y: the only reduction path.
        assert_eq!(check_sn(&t("(\\x. x x) (\\y. y)"), 100), SnEvidence::Sn { max_len: 2 });
    }

    #[test]
    fn common_reducts() {
        let m = t("(\\x. x) ((\\y. y) z)");
        let same = ReductionTrace::from_positions(m.clone(), &[Position::root()]).unwrap();
        let (n, e1, e2) = common_reduct(&m, &same, &same, 100).unwrap();
        assert!(alpha_eq(&n, same.end()));
        assert!(e1.is_empty() && e2.is_empty());

        let outer = ReductionTrace::from_positions(m.clone(), &[Position::root()]).unwrap();
        let inner = ReductionTrace::from_positions(m.clone(), &[pos("arg")]).unwrap();
        let (n, e1, e2) = common_reduct(&m, &outer, &inner, 100).unwrap();
        // Both sides already meet up to α-equivalence.
        assert!(alpha_eq(&n, &t("(\\y. y) z")));
        assert!(e1.replays() && e2.replays());
        assert!(alpha_eq(e1.end(), e2.end()));
    }

    #[test]
    fn trace_text_round_trip() {
        let m = t("(\\x y. x) (\\z. z) ((\\x. x x) (\\x. x x))");
        let WnEvidence::Wn { trace, .. } = normalize_lo(&m, 10) else { panic!() };
        let text = trace.to_string();
        assert!(text.lines().nth(1).unwrap().starts_with("fun -> "));
        let back = ReductionTrace::parse(&text).unwrap();
        assert_eq!(back.len(), trace.len());
        assert!(alpha_eq(back.end(), trace.end()));
    }
}
