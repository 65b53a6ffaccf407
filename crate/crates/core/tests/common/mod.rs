//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use termsat::egraph::{EGraph, ENode, Id};
use termsat::rules::{parse_rule, Pattern};
use termsat::{Symbol, Term};

pub fn t(s: &str) -> Term {
    s.parse().unwrap()
}

pub fn pat(s: &str) -> Pattern {
    parse_rule(&format!("{s} --> 0"), &HashSet::new()).unwrap().lhs
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random term over `f/1`, `g/2` and atoms `a b c`, at most `depth` deep.
pub fn random_fg_term(r: &mut ChaCha8Rng, depth: usize) -> Term {
    if depth <= 1 || r.gen_bool(0.3) {
        return Term::atom(["a", "b", "c"].choose(r).unwrap());
    }
    if r.gen_bool(0.5) {
        Term::app("f", vec![random_fg_term(r, depth - 1)])
    } else {
        Term::app("g", vec![random_fg_term(r, depth - 1), random_fg_term(r, depth - 1)])
    }
}

/// Random pattern text over the same signature with variables `~x ~y ~z`.
pub fn random_fg_pattern(r: &mut ChaCha8Rng, depth: usize) -> String {
    if depth <= 1 || r.gen_bool(0.35) {
        return if r.gen_bool(0.7) {
            ["~x", "~y", "~z"].choose(r).unwrap().to_string()
        } else {
            ["a", "b", "c"].choose(r).unwrap().to_string()
        };
    }
    if r.gen_bool(0.5) {
        format!("(f {})", random_fg_pattern(r, depth - 1))
    } else {
        format!("(g {} {})", random_fg_pattern(r, depth - 1), random_fg_pattern(r, depth - 1))
    }
}

/// All distinct subterms, children before parents.
pub fn subterms(ts: &[Term]) -> Vec<Term> {
    fn go(t: &Term, seen: &mut HashSet<Term>, out: &mut Vec<Term>) {
        if let Term::Compound(_, args) = t {
            for a in args {
                go(a, seen, out);
            }
        }
        if seen.insert(t.clone()) {
            out.push(t.clone());
        }
    }
    let (mut seen, mut out) = (HashSet::new(), Vec::new());
    for t in ts {
        go(t, &mut seen, &mut out);
    }
    out
}

/// Congruence closure by brute force: union the requested pairs, then keep
/// merging any two applications with the same head whose arguments are
/// already equal, until nothing changes. Returns a class label per term.
pub fn naive_congruence(terms: &[Term], merges: &[(usize, usize)]) -> Vec<usize> {
    let n = terms.len();
    let mut label: Vec<usize> = (0..n).collect();
    let index: HashMap<&Term, usize> = terms.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let relabel = |label: &mut Vec<usize>, a: usize, b: usize| {
        let (from, to) = (label[a], label[b]);
        if from != to {
            for l in label.iter_mut() {
                if *l == from {
                    *l = to;
                }
            }
        }
    };
    for &(a, b) in merges {
        relabel(&mut label, a, b);
    }
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if label[i] == label[j] {
                    continue;
                }
                if let (Term::Compound(f, xs), Term::Compound(g, ys)) = (&terms[i], &terms[j]) {
                    if f == g
                        && xs.len() == ys.len()
                        && xs.iter().zip(ys).all(|(x, y)| label[index[x]] == label[index[y]])
                    {
                        relabel(&mut label, i, j);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return label;
        }
    }
}

pub type Subst = Vec<Option<Id>>;

/// Recursive e-matcher: every substitution under which `p` is represented
/// in the class of `id`.
pub fn naive_match(g: &EGraph, p: &Pattern, id: Id, s: Subst) -> Vec<Subst> {
    let id = g.find(id);
    match p {
        Pattern::Var(v) => match s[v.index] {
            Some(b) if g.find(b) == id => vec![s],
            Some(_) => vec![],
            None => {
                let mut s = s;
                s[v.index] = Some(id);
                vec![s]
            }
        },
        Pattern::Lit(l) => {
            if g.class(id).literals().any(|x| x == *l) {
                vec![s]
            } else {
                vec![]
            }
        }
        Pattern::Term(termsat::rules::PatOp::Sym(op), args) => {
            let mut out = Vec::new();
            for n in g.class(id).nodes() {
                if let ENode::Op(o, ch) = n {
                    if o != op || ch.len() != args.len() {
                        continue;
                    }
                    let mut states = vec![s.clone()];
                    for (a, c) in args.iter().zip(ch) {
                        states = states.into_iter().flat_map(|st| naive_match(g, a, *c, st)).collect();
                    }
                    out.extend(states);
                }
            }
            out
        }
        _ => panic!("oracle handles plain patterns only"),
    }
}

/// All (root class, substitution) pairs of the naive matcher.
pub fn naive_ematch(g: &EGraph, p: &Pattern) -> HashSet<(Id, Subst)> {
    let mut out = HashSet::new();
    for id in g.class_ids() {
        for s in naive_match(g, p, id, vec![None; p.n_vars()]) {
            out.insert((id, s));
        }
    }
    out
}

/// Random sum over atoms `a b c` with `leaves` leaves (2·leaves − 1 nodes).
pub fn random_sum(r: &mut ChaCha8Rng, leaves: usize) -> Term {
    if leaves == 1 {
        return Term::atom(["a", "b", "c"].choose(r).unwrap());
    }
    let left = r.gen_range(1..leaves);
    Term::app("+", vec![random_sum(r, left), random_sum(r, leaves - left)])
}

/// Every term one commutativity or associativity step (either direction,
/// at any position) away from `t`.
pub fn ac_neighbors(t: &Term) -> Vec<Term> {
    let plus = Symbol::new("+");
    let mut out = Vec::new();
    let Term::Compound(op, args) = t else {
        return out;
    };
    if *op == plus && args.len() == 2 {
        let (x, y) = (&args[0], &args[1]);
        out.push(Term::app("+", vec![y.clone(), x.clone()]));
        if let Term::Compound(o, ys) = y {
            if *o == plus {
                out.push(Term::app("+", vec![Term::app("+", vec![x.clone(), ys[0].clone()]), ys[1].clone()]));
            }
        }
        if let Term::Compound(o, xs) = x {
            if *o == plus {
                out.push(Term::app("+", vec![xs[0].clone(), Term::app("+", vec![xs[1].clone(), y.clone()])]));
            }
        }
    }
    for (i, a) in args.iter().enumerate() {
        for n in ac_neighbors(a) {
            let mut args = args.clone();
            args[i] = n;
            out.push(Term::Compound(*op, args));
        }
    }
    out
}

/// Terms reachable from `t` in at most `depth` rewrite steps.
pub fn bfs_reachable(t: &Term, depth: usize) -> HashSet<Term> {
    let mut seen = HashSet::from([t.clone()]);
    let mut frontier = VecDeque::from([(t.clone(), 0)]);
    while let Some((u, d)) = frontier.pop_front() {
        if d == depth {
            continue;
        }
        for n in ac_neighbors(&u) {
            if seen.insert(n.clone()) {
                frontier.push_back((n, d + 1));
            }
        }
    }
    seen
}

/// Smallest size of a term of depth at most `depth` represented by each
/// class, by dynamic programming over depth.
pub fn min_size_to_depth(g: &EGraph, depth: usize) -> HashMap<Id, usize> {
    let mut best: HashMap<Id, usize> = HashMap::new();
    for _ in 0..depth {
        let mut next = HashMap::new();
        for c in g.classes() {
            let mut m: Option<usize> = None;
            for n in c.nodes() {
                let size = n
                    .children()
                    .iter()
                    .map(|ch| best.get(&g.find(*ch)).copied())
                    .sum::<Option<usize>>()
                    .map(|s| s + 1);
                if let Some(s) = size {
                    m = Some(m.map_or(s, |x: usize| x.min(s)));
                }
            }
            if let Some(m) = m {
                next.insert(c.id(), m);
            }
        }
        best = next;
    }
    best
}
