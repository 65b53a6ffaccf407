//! Classical (syntactic) rewriting over plain terms.

mod matcher;
mod rewriters;
mod strategy;

pub use matcher::{Binding, Matcher, Substitution};
pub use rewriters::{
    Chain, Empty, Fixpoint, FixpointNoCycle, FnRewriter, IfElse, PassThrough, Postwalk, Prewalk, RestartedChain, Rewriter,
};
pub use strategy::{parse_strategy, Strategy, StrategyError, DEFAULT_STRATEGY};

use crate::rules::{PatOp, Pattern, Rule, RuleError, RuleKind};
use crate::symbol::Symbol;
use crate::term::{eval_builtin, is_builtin, Term, CALL};

pub fn compile_matcher(lhs: &Pattern) -> Matcher {
    Matcher::compile(lhs)
}

/// Substitutes `s` into `rhs`; segments splice their sequences in place.
pub fn instantiate(rhs: &Pattern, s: &Substitution) -> Result<Term, RuleError> {
    build(rhs, s, false)
}

/// Like [`instantiate`], but every builtin node over two numeric literals
/// is folded bottom-up.
pub fn instantiate_dynamic(rhs: &Pattern, s: &Substitution) -> Result<Term, RuleError> {
    build(rhs, s, true)
}

fn build(p: &Pattern, s: &Substitution, fold: bool) -> Result<Term, RuleError> {
    let unbound = |v: &crate::rules::PatVar| RuleError::UnboundRhsVariable(v.name.to_string());
    match p {
        Pattern::Var(v) => match s.get(v.index) {
            Some(Binding::One(t)) => Ok(t.clone()),
            _ => Err(unbound(v)),
        },
        Pattern::Segment(v) => Err(unbound(v)),
        Pattern::Lit(l) => Ok(l.to_term()),
        Pattern::Term(op, args) => {
            let mut out = Vec::with_capacity(args.len());
            for a in args {
                match a {
                    Pattern::Segment(v) => match s.get(v.index) {
                        Some(Binding::Seq(ts)) => out.extend(ts.iter().cloned()),
                        Some(Binding::One(t)) => out.push(t.clone()),
                        None => return Err(unbound(v)),
                    },
                    _ => out.push(build(a, s, fold)?),
                }
            }
            let op = match op {
                PatOp::Sym(o) => *o,
                PatOp::Var(v) => match s.get(v.index) {
                    Some(Binding::One(Term::Atom(o))) => *o,
                    Some(Binding::One(f)) => {
                        out.insert(0, f.clone());
                        Symbol::new(CALL)
                    }
                    _ => return Err(unbound(v)),
                },
            };
            if fold && is_builtin(op) {
                if let [Term::Lit(a), Term::Lit(b)] = out.as_slice() {
                    if let Ok(n) = eval_builtin(op, &[*a, *b]) {
                        return Ok(Term::Lit(n));
                    }
                }
            }
            Ok(Term::Compound(op, out))
        }
    }
}

/// Applies `r` at the root of `t`.
pub fn apply_rule(r: &Rule, t: &Term) -> Result<Option<Term>, RuleError> {
    if !r.kind.is_classical() {
        return Err(RuleError::UnsupportedRuleKind {
            rule: r.name.clone(),
            kind: r.kind,
        });
    }
    let Some(s) = r.matcher().matches(t) else {
        return Ok(None);
    };
    let out = match r.kind {
        RuleKind::Dynamic => instantiate_dynamic(&r.rhs, &s)?,
        _ => instantiate(&r.rhs, &s)?,
    };
    Ok(Some(out))
}
