//! Term corpora: exhaustive enumeration up to α, exact counts, seeded
//! uniform sampling, and a family of weakly but not strongly normalising
//! terms.
//!
//! Bound variables are named by binding depth (`x`, `y`, `z`, …), so
//! generated terms never shadow. Free variables are named `a`, `b`, … in
//! order of first occurrence, which makes open terms unique up to a
//! renaming of their free variables.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::term::Term;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusSpec {
    pub max_size: usize,
    pub closed_only: bool,
    pub include_bottom: bool,
    pub seed: u64,
}

impl CorpusSpec {
    pub fn closed(max_size: usize) -> Self {
        CorpusSpec { max_size, closed_only: true, include_bottom: false, seed: 0 }
    }
}

const BOUND: [&str; 8] = ["x", "y", "z", "u", "v", "s", "t", "r"];
const FREE: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];

fn bound_name(depth: usize) -> String {
    BOUND.get(depth).map_or_else(|| format!("x{depth}"), |s| s.to_string())
}

fn free_name(i: usize) -> String {
    FREE.get(i).map_or_else(|| format!("a{i}"), |s| s.to_string())
}

/// All terms of size ≤ `spec.max_size`, by increasing size, in a fixed
/// order within each size.
pub fn enumerate_terms(spec: &CorpusSpec) -> Vec<Term> {
    let mut out = Vec::new();
    for n in 1..=spec.max_size {
        for (t, _) in exact(n, 0, 0, spec) {
            out.push(t);
        }
    }
    out
}

/// Terms of size exactly `n` under `depth` binders, having already used
/// `free` free variables; returns each term with the free count after it.
fn exact(n: usize, depth: usize, free: usize, spec: &CorpusSpec) -> Vec<(Term, usize)> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    if n == 1 {
        for i in (0..depth).rev() {
            out.push((Term::var(bound_name(i)), free));
        }
        if !spec.closed_only {
            for i in 0..=free {
                out.push((Term::var(free_name(i)), free.max(i + 1)));
            }
        }
        if spec.include_bottom {
            out.push((Term::Bottom, free));
        }
        return out;
    }
    for (body, f) in exact(n - 1, depth + 1, free, spec) {
        out.push((Term::lam(bound_name(depth), body), f));
    }
    for left in 1..n - 1 {
        for (fun, f1) in exact(left, depth, free, spec) {
            for (arg, f2) in exact(n - 1 - left, depth, f1, spec) {
                out.push((Term::app(fun.clone(), arg), f2));
            }
        }
    }
    out
}

/// Number of closed terms of size exactly `n` (with `⊥` as an extra
/// constant when `bottom` is set), computed by dynamic programming.
pub fn count_closed(n: usize, bottom: bool) -> u128 {
    Counter::new(n, bottom).count(n, 0)
}

struct Counter {
    bottom: bool,
    memo: Vec<Vec<Option<u128>>>,
}

impl Counter {
    fn new(max: usize, bottom: bool) -> Self {
        Counter { bottom, memo: vec![vec![None; max + 2]; max + 2] }
    }

    fn count(&mut self, n: usize, depth: usize) -> u128 {
        if n == 0 {
            return 0;
        }
        if let Some(c) = self.memo[n][depth] {
            return c;
        }
        let c = if n == 1 {
            depth as u128 + u128::from(self.bottom)
        } else {
            let mut c = self.count(n - 1, depth + 1);
            for left in 1..n - 1 {
                c += self.count(left, depth) * self.count(n - 1 - left, depth);
            }
            c
        };
        self.memo[n][depth] = Some(c);
        c
    }

    /// The `idx`-th closed term of size `n` in enumeration order.
    fn unrank(&mut self, n: usize, depth: usize, mut idx: u128) -> Term {
        if n == 1 {
            if idx < depth as u128 {
                return Term::var(bound_name(depth - 1 - idx as usize));
            }
            return Term::Bottom;
        }
        let lams = self.count(n - 1, depth + 1);
        if idx < lams {
            return Term::lam(bound_name(depth), self.unrank(n - 1, depth + 1, idx));
        }
        idx -= lams;
        for left in 1..n - 1 {
            let (l, r) = (self.count(left, depth), self.count(n - 1 - left, depth));
            if idx < l * r {
                let fun = self.unrank(left, depth, idx / r);
                let arg = self.unrank(n - 1 - left, depth, idx % r);
                return Term::app(fun, arg);
            }
            idx -= l * r;
        }
        unreachable!("index beyond the count")
    }
}

/// `count` closed terms drawn uniformly (with replacement) from all closed
/// terms of size ≤ `max_size`, reproducibly from `seed`.
pub fn sample_closed(max_size: usize, count: usize, seed: u64) -> Vec<Term> {
    let mut counter = Counter::new(max_size, false);
    let sizes: Vec<u128> = (0..=max_size).map(|n| counter.count(n, 0)).collect();
    let total: u128 = sizes.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut idx = rng.gen_range(0..total);
            let mut n = 0;
            while idx >= sizes[n] {
                idx -= sizes[n];
                n += 1;
            }
            counter.unrank(n, 0, idx)
        })
        .collect()
}

/// `(λx.x x)(λx.x x)`.
pub fn omega_term() -> Term {
    let d = Term::lam("x", Term::app(Term::var("x"), Term::var("x")));
    Term::app(d.clone(), d)
}

/// Terms that normalise but have an infinite reduction: a normal closed
/// term `P` placed next to a discarded `Ω`, in several shapes
/// (`(λx y.x) P Ω`, `(λy.P) Ω`, `(λx y.y) Ω P`).
pub fn wn_not_sn_family(max_p_size: usize) -> Vec<Term> {
    let k = Term::lam("x", Term::lam("y", Term::var("x")));
    let ki = Term::lam("x", Term::lam("y", Term::var("y")));
    let mut out = Vec::new();
    for p in enumerate_terms(&CorpusSpec::closed(max_p_size)) {
        if !crate::reduce::is_normal(&p) {
            continue;
        }
        out.push(Term::apps(k.clone(), [p.clone(), omega_term()]));
        out.push(Term::app(Term::lam("w", p.clone()), omega_term()));
        out.push(Term::apps(ki.clone(), [omega_term(), p]));
    }
    out
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::term::{alpha_eq, Canon};

    /// Independent recount: all terms over a fixed pool of names, deduplicated
    /// by α-canonical form.
    fn brute_closed(max: usize) -> BTreeSet<Canon> {
        let names = ["p", "q", "r", "s"];
        fn all(n: usize, names: &[&str]) -> Vec<Term> {
            if n == 1 {
                return names.iter().map(|v| Term::var(*v)).collect();
            }
            let mut out = Vec::new();
            for b in all(n - 1, names) {
                for v in names {
                    out.push(Term::lam(*v, b.clone()));
                }
            }
            for l in 1..n - 1 {
                for f in all(l, names) {
                    for a in all(n - 1 - l, names) {
                        out.push(Term::app(f.clone(), a));
                    }
                }
            }
            out
        }
        let mut set = BTreeSet::new();
        for n in 1..=max {
            for t in all(n, &names) {
                if t.free_vars().is_empty() {
                    set.insert(t.canonical());
                }
            }
        }
        set
    }

    #[test]
    fn small_closed_corpora() {
        assert!(enumerate_terms(&CorpusSpec::closed(1)).is_empty());
        let two = enumerate_terms(&CorpusSpec::closed(2));
        assert_eq!(two.len(), 1);
        assert!(alpha_eq(&two[0], &Term::lam("z", Term::var("z"))));
    }

    #[test]
    fn counts_agree_with_independent_recount() {
        for max in 1..=5 {
            let ours = enumerate_terms(&CorpusSpec::closed(max));
            let canon: BTreeSet<Canon> = ours.iter().map(Term::canonical).collect();
            assert_eq!(canon.len(), ours.len(), "duplicates at size {max}");
            assert_eq!(canon, brute_closed(max), "size {max}");
            let dp: u128 = (1..=max).map(|n| count_closed(n, false)).sum();
            assert_eq!(dp, ours.len() as u128);
        }
        // Frozen sequence: closed terms of size exactly 1..=8.
        let seq: Vec<u128> = (1..=8).map(|n| count_closed(n, false)).collect();
        assert_eq!(seq, vec![0, 1, 2, 4, 13, 42, 139, 506]);
    }

    #[test]
    fn sampling_is_reproducible_and_in_range() {
        let a = sample_closed(12, 50, 7);
        let b = sample_closed(12, 50, 7);
        assert_eq!(a, b);
        assert!(a.iter().all(|t| t.size() <= 12 && t.free_vars().is_empty()));
    }

    #[test]
    fn unrank_matches_enumeration_order() {
        let spec = CorpusSpec::closed(6);
        let mut c = Counter::new(6, false);
        let listed: Vec<Term> = enumerate_terms(&spec).into_iter().filter(|t| t.size() == 6).collect();
        for (i, t) in listed.iter().enumerate() {
            assert_eq!(&c.unrank(6, 0, i as u128), t);
        }
    }
}
