//! Rewriter combinators.
//!
//! A rewriter maps a term to `Some(new)` or `None` for "no change". A result
//! equal to the input is treated as no change by every combinator.

use std::collections::HashSet;
use std::sync::Arc;

use rayon::prelude::*;

use crate::classical::apply_rule;
use crate::rules::Rule;
use crate::term::Term;

pub trait Rewriter: Send + Sync {
    fn rewrite(&self, t: &Term) -> Option<Term>;
}

fn changed(t: &Term, r: Option<Term>) -> Option<Term> {
    r.filter(|y| y != t)
}

impl Rewriter for Rule {
    fn rewrite(&self, t: &Term) -> Option<Term> {
        apply_rule(self, t).ok().flatten()
    }
}

impl<R: Rewriter + ?Sized> Rewriter for Box<R> {
    fn rewrite(&self, t: &Term) -> Option<Term> {
        (**self).rewrite(t)
    }
}

impl<R: Rewriter + ?Sized> Rewriter for Arc<R> {
    fn rewrite(&self, t: &Term) -> Option<Term> {
        (**self).rewrite(t)
    }
}

/// Wraps a plain function, e.g. [`crate::term::inline_anonymous`].
pub struct FnRewriter<F>(pub F);

impl<F: Fn(&Term) -> Option<Term> + Send + Sync> Rewriter for FnRewriter<F> {
    fn rewrite(&self, t: &Term) -> Option<Term> {
        (self.0)(t)
    }
}

pub struct Empty;

impl Rewriter for Empty {
    fn rewrite(&self, _t: &Term) -> Option<Term> {
        None
    }
}

/// Applies each rewriter in turn to the running result.
pub struct Chain(pub Vec<Box<dyn Rewriter>>);

impl Rewriter for Chain {
    fn rewrite(&self, t: &Term) -> Option<Term> {
        let mut cur: Option<Term> = None;
        for rw in &self.0 {
            let x = cur.as_ref().unwrap_or(t);
            if let Some(y) = changed(x, rw.rewrite(x)) {
                cur = Some(y);
            }
        }
        cur.filter(|y| y != t)
    }
}

/// Like [`Chain`], but after the first rewriter that fires, runs the whole
/// chain again from the start on its result.
pub struct RestartedChain(pub Vec<Box<dyn Rewriter>>);

impl Rewriter for RestartedChain {
    fn rewrite(&self, t: &Term) -> Option<Term> {
        for rw in &self.0 {
            if let Some(y) = changed(t, rw.rewrite(t)) {
                let again = chain_slice(&self.0, &y);
                return Some(again.unwrap_or(y)).filter(|z| z != t);
            }
        }
        None
    }
}

fn chain_slice(rws: &[Box<dyn Rewriter>], t: &Term) -> Option<Term> {
    let mut cur: Option<Term> = None;
    for rw in rws {
        let x = cur.as_ref().unwrap_or(t);
        if let Some(y) = changed(x, rw.rewrite(x)) {
            cur = Some(y);
        }
    }
    cur
}

pub struct IfElse {
    pub cond: Box<dyn Fn(&Term) -> bool + Send + Sync>,
    pub yes: Box<dyn Rewriter>,
    pub no: Box<dyn Rewriter>,
}

impl IfElse {
    /// `If(cond, rw)`: `rw` where `cond` holds, no change elsewhere.
    pub fn only_if(cond: impl Fn(&Term) -> bool + Send + Sync + 'static, rw: Box<dyn Rewriter>) -> IfElse {
        IfElse {
            cond: Box::new(cond),
            yes: rw,
            no: Box::new(Empty),
        }
    }
}

impl Rewriter for IfElse {
    fn rewrite(&self, t: &Term) -> Option<Term> {
        if (self.cond)(t) {
            self.yes.rewrite(t)
        } else {
            self.no.rewrite(t)
        }
    }
}

/// Turns "no change" into the identity.
pub struct PassThrough(pub Box<dyn Rewriter>);

impl Rewriter for PassThrough {
    fn rewrite(&self, t: &Term) -> Option<Term> {
        Some(self.0.rewrite(t).unwrap_or_else(|| t.clone()))
    }
}

/// Tree walks. With `threaded`, children of nodes whose size is at least
/// `cutoff` are rewritten in parallel; results are identical to the serial
/// walk.
struct Walk {
    rw: Box<dyn Rewriter>,
    threaded: bool,
    cutoff: usize,
}

impl Walk {
    fn children(&self, t: &Term, visit: &(dyn Fn(&Term) -> Option<Term> + Sync)) -> Option<Term> {
        let Term::Compound(op, args) = t else { return None };
        let results: Vec<Option<Term>> = if self.threaded && t.size() >= self.cutoff {
            args.par_iter().map(visit).collect()
        } else {
            args.iter().map(visit).collect()
        };
        if results.iter().all(Option::is_none) {
            return None;
        }
        let args = args
            .iter()
            .zip(results)
            .map(|(a, r)| r.unwrap_or_else(|| a.clone()))
            .collect();
        Some(Term::Compound(*op, args))
    }
}

/// Rewrites a node first, then its (possibly new) children.
pub struct Prewalk(Walk);

impl Prewalk {
    pub fn new(rw: Box<dyn Rewriter>) -> Self {
        Prewalk(Walk {
            rw,
            threaded: false,
            cutoff: 0,
        })
    }

    pub fn threaded(rw: Box<dyn Rewriter>, cutoff: usize) -> Self {
        Prewalk(Walk {
            rw,
            threaded: true,
            cutoff,
        })
    }

    fn walk(&self, t: &Term) -> Option<Term> {
        let here = changed(t, self.0.rw.rewrite(t));
        let cur = here.as_ref().unwrap_or(t);
        self.0.children(cur, &|c| self.walk(c)).or(here)
    }
}

impl Rewriter for Prewalk {
    fn rewrite(&self, t: &Term) -> Option<Term> {
        self.walk(t).filter(|y| y != t)
    }
}

/// Rewrites children first, then the rebuilt node.
pub struct Postwalk(Walk);

impl Postwalk {
    pub fn new(rw: Box<dyn Rewriter>) -> Self {
        Postwalk(Walk {
            rw,
            threaded: false,
            cutoff: 0,
        })
    }

    pub fn threaded(rw: Box<dyn Rewriter>, cutoff: usize) -> Self {
        Postwalk(Walk {
            rw,
            threaded: true,
            cutoff,
        })
    }

    fn walk(&self, t: &Term) -> Option<Term> {
        let inner = self.0.children(t, &|c| self.walk(c));
        let cur = inner.as_ref().unwrap_or(t);
        changed(cur, self.0.rw.rewrite(cur)).or(inner)
    }
}

impl Rewriter for Postwalk {
    fn rewrite(&self, t: &Term) -> Option<Term> {
        self.walk(t).filter(|y| y != t)
    }
}

/// Applies the rewriter until it stops changing the term. Does not
/// terminate if the rewriter cycles; see [`FixpointNoCycle`].
pub struct Fixpoint(pub Box<dyn Rewriter>);

impl Rewriter for Fixpoint {
    fn rewrite(&self, t: &Term) -> Option<Term> {
        let mut cur: Option<Term> = None;
        loop {
            let x = cur.as_ref().unwrap_or(t);
            match changed(x, self.0.rewrite(x)) {
                Some(y) => cur = Some(y),
                None => return cur,
            }
        }
    }
}

/// Like [`Fixpoint`], but also stops when a term seen earlier in the same
/// call comes back.
pub struct FixpointNoCycle(pub Box<dyn Rewriter>);

impl Rewriter for FixpointNoCycle {
    fn rewrite(&self, t: &Term) -> Option<Term> {
        let mut seen: HashSet<Term> = HashSet::new();
        seen.insert(t.clone());
        let mut cur: Option<Term> = None;
        loop {
            let x = cur.as_ref().unwrap_or(t);
            match changed(x, self.0.rewrite(x)) {
                Some(y) if seen.insert(y.clone()) => cur = Some(y),
                _ => return cur.filter(|y| y != t),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::parse_theory;
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn t(s: &str) -> Term {
        s.parse().unwrap()
    }

    fn rules(src: &str) -> Vec<Box<dyn Rewriter>> {
        parse_theory("t", src)
            .unwrap()
            .rules
            .into_iter()
            .map(|r| Box::new(r) as Box<dyn Rewriter>)
            .collect()
    }

    const FOLD: &str = "@vars a b\n(+ a::number b::number) => (+ a b)\n(* a::number b::number) => (* a b)\n";

    #[test]
    fn fixpoint_postwalk_folds() {
        let rw = Fixpoint(Box::new(Postwalk::new(Box::new(Chain(rules(FOLD))))));
        assert_eq!(rw.rewrite(&t("(+ 1 (+ 2 3))")), Some(t("6")));
        assert_eq!(rw.rewrite(&t("(+ x 1)")), None);
    }

    #[test]
    fn empty_and_passthrough() {
        assert_eq!(Empty.rewrite(&t("(f x)")), None);
        let pt = PassThrough(Box::new(Empty));
        assert_eq!(pt.rewrite(&t("x")), Some(t("x")));
        assert_eq!(Postwalk::new(Box::new(PassThrough(Box::new(Empty)))).rewrite(&t("(f x)")), None);
    }

    #[test]
    fn chain_reports_no_change() {
        let c = Chain(rules("(f ~x) --> (g ~x)\n(g ~x) --> (h ~x)\n"));
        assert_eq!(c.rewrite(&t("(f 1)")), Some(t("(h 1)")));
        assert_eq!(c.rewrite(&t("(k 1)")), None);
        let back = Chain(rules("(f ~x) --> (g ~x)\n(g ~x) --> (f ~x)\n"));
        assert_eq!(back.rewrite(&t("(f 1)")), None);
    }

    #[test]
    fn restarted_chain_reruns_from_the_start() {
        let rws = "(g ~x) --> (h ~x)\n(f ~x) --> (g ~x)\n";
        assert_eq!(Chain(rules(rws)).rewrite(&t("(f 1)")), Some(t("(g 1)")));
        assert_eq!(RestartedChain(rules(rws)).rewrite(&t("(f 1)")), Some(t("(h 1)")));
    }

    #[test]
    fn walk_order() {
        // (f x) -> x at the root first hides the inner rewrite in a prewalk
        let rs = "(f ~x) --> ~x\n(g ~x) --> (k ~x)\n";
        let pre = Prewalk::new(Box::new(Chain(rules(rs))));
        let post = Postwalk::new(Box::new(Chain(rules(rs))));
        assert_eq!(pre.rewrite(&t("(f (g 1))")), Some(t("(k 1)")));
        assert_eq!(post.rewrite(&t("(f (g 1))")), Some(t("(k 1)")));
        let wrap = "(a ~x) --> (a (a ~x))\n";
        assert_eq!(Postwalk::new(Box::new(Chain(rules(wrap)))).rewrite(&t("(a 1)")), Some(t("(a (a 1))")));
    }

    struct Counter(AtomicUsize);

    impl Rewriter for Counter {
        fn rewrite(&self, _t: &Term) -> Option<Term> {
            self.0.fetch_add(1, Ordering::Relaxed);
            None
        }
    }

    #[test]
    fn walks_visit_every_node_once() {
        let term = t("(f (g a b) (h (k c)) 1)");
        let c = Arc::new(Counter(AtomicUsize::new(0)));
        Prewalk::new(Box::new(c.clone())).rewrite(&term);
        assert_eq!(c.0.load(Ordering::Relaxed), term.size());
        let c = Arc::new(Counter(AtomicUsize::new(0)));
        Postwalk::new(Box::new(c.clone())).rewrite(&term);
        assert_eq!(c.0.load(Ordering::Relaxed), term.size());
    }

    #[test]
    fn threaded_walks_match_serial() {
        let term = t("(+ (+ 1 2) (+ (* 3 4) (+ 5 (* 6 7))))");
        let serial = Fixpoint(Box::new(Postwalk::new(Box::new(Chain(rules(FOLD)))))).rewrite(&term);
        let par = Fixpoint(Box::new(Postwalk::threaded(Box::new(Chain(rules(FOLD))), 2))).rewrite(&term);
        assert_eq!(serial, par);
        assert_eq!(serial, Some(t("62")));
    }

    #[test]
    fn fixpoint_no_cycle_stops() {
        let flip = "(f ~x ~y) --> (f ~y ~x)\n";
        let rw = FixpointNoCycle(Box::new(Chain(rules(flip))));
        // (f 1 2) -> (f 2 1) -> (f 1 2) seen before: stop at (f 2 1)
        assert_eq!(rw.rewrite(&t("(f 1 2)")), Some(t("(f 2 1)")));
    }

    #[test]
    fn if_else() {
        let rw = IfElse::only_if(|t| t.is_tree(), Box::new(Chain(rules("(f ~x) --> ~x\n"))));
        assert_eq!(rw.rewrite(&t("(f 1)")), Some(t("1")));
        assert_eq!(rw.rewrite(&t("x")), None);
    }
}
