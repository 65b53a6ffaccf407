//! Continuation-passing matcher for classical rewriting.
//!
//! A pattern compiles to a tree of closures. Each closure looks at the front
//! of a slice of terms, extends the substitution and hands the number of
//! consumed terms to its continuation. Returning `false` from a continuation
//! backtracks into the next alternative (only segments have alternatives).

use std::fmt;

use crate::rules::{PatOp, PatVar, Pattern};
use crate::term::Term;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Binding {
    One(Term),
    Seq(Vec<Term>),
}

/// Variable index to bound value.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Substitution(pub Vec<Option<Binding>>);

impl Substitution {
    pub fn with_vars(n: usize) -> Self {
        Substitution(vec![None; n])
    }

    pub fn get(&self, index: usize) -> Option<&Binding> {
        self.0.get(index).and_then(Option::as_ref)
    }

    pub fn term(&self, index: usize) -> Option<&Term> {
        match self.get(index) {
            Some(Binding::One(t)) => Some(t),
            _ => None,
        }
    }

    pub fn seq(&self, index: usize) -> Option<&[Term]> {
        match self.get(index) {
            Some(Binding::Seq(ts)) => Some(ts),
            _ => None,
        }
    }

    fn slot(&mut self, index: usize) -> &mut Option<Binding> {
        if self.0.len() <= index {
            self.0.resize(index + 1, None);
        }
        &mut self.0[index]
    }
}

type Next<'a> = &'a mut dyn FnMut(&mut Substitution, usize) -> bool;
type Proc = Box<dyn Fn(&[Term], &mut Substitution, Next<'_>) -> bool + Send + Sync>;

pub struct Matcher {
    root: Proc,
    n_vars: usize,
}

impl fmt::Debug for Matcher {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Matcher").field("n_vars", &self.n_vars).finish()
    }
}

impl Matcher {
    pub fn compile(p: &Pattern) -> Matcher {
        Matcher {
            root: compile(p),
            n_vars: p.n_vars(),
        }
    }

    /// First match at the root of `t`.
    pub fn matches(&self, t: &Term) -> Option<Substitution> {
        let mut found = None;
        self.for_each_match(t, &mut |s| {
            found = Some(s.clone());
            true
        });
        found
    }

    /// All matches in enumeration order.
    pub fn all_matches(&self, t: &Term) -> Vec<Substitution> {
        let mut out = Vec::new();
        self.for_each_match(t, &mut |s| {
            out.push(s.clone());
            false
        });
        out
    }

    /// Calls `f` on each match until it returns `true`.
    pub fn for_each_match(&self, t: &Term, f: &mut dyn FnMut(&Substitution) -> bool) {
        let mut s = Substitution::with_vars(self.n_vars);
        (self.root)(std::slice::from_ref(t), &mut s, &mut |s, n| n == 1 && f(s));
    }
}

/// Binds `index` to `value` for the duration of `next`, or checks an
/// existing binding for equality.
fn bind(s: &mut Substitution, index: usize, value: Binding, consumed: usize, next: Next<'_>) -> bool {
    match s.slot(index) {
        Some(existing) => *existing == value && next(s, consumed),
        slot @ None => {
            *slot = Some(value);
            if next(s, consumed) {
                return true;
            }
            s.0[index] = None;
            false
        }
    }
}

fn compile(p: &Pattern) -> Proc {
    match p {
        Pattern::Var(v) => {
            let v = v.clone();
            Box::new(move |data, s, next| {
                let Some(t) = data.first() else { return false };
                if s.get(v.index).is_none() && !v.predicate.as_ref().is_none_or(|p| p.check_term(t)) {
                    return false;
                }
                bind(s, v.index, Binding::One(t.clone()), 1, next)
            })
        }
        Pattern::Segment(v) => {
            let v = v.clone();
            Box::new(move |data, s, next| segment(&v, data, s, next))
        }
        Pattern::Lit(l) => {
            let l = *l;
            Box::new(move |data, s, next| match data.first() {
                Some(t) if t.as_literal() == Some(l) => next(s, 1),
                _ => false,
            })
        }
        Pattern::Term(op, args) => {
            let op = op.clone();
            let children: Vec<Proc> = args.iter().map(compile).collect();
            let fixed_arity = (!args.iter().any(|a| matches!(a, Pattern::Segment(_)))).then_some(args.len());
            Box::new(move |data, s, next| {
                let Some(Term::Compound(f, targs)) = data.first() else { return false };
                if fixed_arity.is_some_and(|n| n != targs.len()) {
                    return false;
                }
                let n_args = targs.len();
                let mut fin = |s: &mut Substitution, consumed: usize| consumed == n_args && next(s, 1);
                match &op {
                    PatOp::Sym(o) => *o == *f && match_seq(&children, targs, 0, s, &mut fin),
                    PatOp::Var(v) => bind(s, v.index, Binding::One(Term::Atom(*f)), 0, &mut |s, _| {
                        match_seq(&children, targs, 0, s, &mut fin)
                    }),
                }
            })
        }
    }
}

fn match_seq(procs: &[Proc], data: &[Term], consumed: usize, s: &mut Substitution, fin: Next<'_>) -> bool {
    match procs.split_first() {
        None => fin(s, consumed),
        Some((first, rest)) => first(data, s, &mut |s, n| match_seq(rest, &data[n..], consumed + n, s, fin)),
    }
}

fn segment(v: &PatVar, data: &[Term], s: &mut Substitution, next: Next<'_>) -> bool {
    if let Some(bound) = s.get(v.index) {
        let Binding::Seq(seq) = bound else { return false };
        let n = seq.len();
        return data.len() >= n && data[..n] == seq[..] && next(s, n);
    }
    for len in 0..=data.len() {
        if len > 0 {
            if let Some(p) = &v.predicate {
                // every longer split also contains this element
                if !p.check_term(&data[len - 1]) {
                    return false;
                }
            }
        }
        if bind(s, v.index, Binding::Seq(data[..len].to_vec()), len, next) {
            return true;
        }
    }
    false
}
