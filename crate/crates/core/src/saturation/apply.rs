//! Adding a rule's right-hand side to the graph under an e-match.

use crate::egraph::{EGraph, EGraphError, ENode, Id};
use crate::ematch::EMatch;
use crate::rules::{PatOp, Pattern};
use crate::term::{eval_builtin, is_builtin, Literal, Number};

enum Val {
    Num(Number),
    Class(Id),
}

/// Adds `rhs` with each variable mapped to its bound class. With `fold`,
/// variables carrying a lifted literal stand for that literal and builtin
/// nodes over two literals are evaluated. `Ok(None)` means the match cannot
/// be instantiated (an unbound variable).
pub fn add_instantiation(g: &mut EGraph, rhs: &Pattern, m: &EMatch, fold: bool) -> Result<Option<Id>, EGraphError> {
    Ok(match build(g, rhs, m, fold)? {
        Some(Val::Num(n)) => Some(g.add_enode(ENode::Lit(Literal::Num(n)))?),
        Some(Val::Class(id)) => Some(id),
        None => None,
    })
}

fn build(g: &mut EGraph, p: &Pattern, m: &EMatch, fold: bool) -> Result<Option<Val>, EGraphError> {
    Ok(Some(match p {
        Pattern::Var(v) => match (m.literals.get(v.index).copied().flatten(), m.bindings.get(v.index).copied().flatten()) {
            (Some(Literal::Num(n)), _) if fold => Val::Num(n),
            (_, Some(id)) => Val::Class(id),
            _ => return Ok(None),
        },
        Pattern::Segment(_) => return Ok(None),
        Pattern::Lit(Literal::Num(n)) => Val::Num(*n),
        Pattern::Lit(l) => Val::Class(g.add_enode(ENode::Lit(*l))?),
        Pattern::Term(op, args) => {
            let op = match op {
                PatOp::Sym(s) => *s,
                PatOp::Var(v) => match m.literals.get(v.index).copied().flatten() {
                    Some(Literal::Sym(s)) => s,
                    _ => return Ok(None),
                },
            };
            let mut vals = Vec::with_capacity(args.len());
            for a in args {
                match build(g, a, m, fold)? {
                    Some(v) => vals.push(v),
                    None => return Ok(None),
                }
            }
            if fold && is_builtin(op) {
                if let [Val::Num(a), Val::Num(b)] = vals.as_slice() {
                    if let Ok(n) = eval_builtin(op, &[*a, *b]) {
                        return Ok(Some(Val::Num(n)));
                    }
                }
            }
            let mut children = Vec::with_capacity(vals.len());
            for v in vals {
                children.push(match v {
                    Val::Class(id) => id,
                    Val::Num(n) => g.add_enode(ENode::Lit(Literal::Num(n)))?,
                });
            }
            Val::Class(g.add_enode(ENode::Op(op, children))?)
        }
    }))
}

/// The class `rhs` would instantiate to under `m`, without adding anything.
pub fn lookup_instantiation(g: &EGraph, rhs: &Pattern, m: &EMatch) -> Option<Id> {
    match rhs {
        Pattern::Var(v) => m.bindings.get(v.index).copied().flatten().map(|id| g.find(id)),
        Pattern::Segment(_) => None,
        Pattern::Lit(l) => g.lookup(&ENode::Lit(*l)),
        Pattern::Term(op, args) => {
            let op = match op {
                PatOp::Sym(s) => *s,
                PatOp::Var(v) => match m.literals.get(v.index).copied().flatten() {
                    Some(Literal::Sym(s)) => s,
                    _ => return None,
                },
            };
            let children = args
                .iter()
                .map(|a| lookup_instantiation(g, a, m))
                .collect::<Option<Vec<_>>>()?;
            g.lookup(&ENode::Op(op, children))
        }
    }
}
