use std::fmt;

use crate::rules::predicate::PredicateRef;
use crate::symbol::Symbol;
use crate::term::{Literal, Term};

/// A pattern variable. `index` is dense per rule, assigned by first
/// appearance in the left-hand side.
#[derive(Clone, PartialEq)]
pub struct PatVar {
    pub name: Symbol,
    pub index: usize,
    pub predicate: Option<PredicateRef>,
}

impl PatVar {
    pub fn new(name: &str) -> Self {
        PatVar {
            name: Symbol::new(name),
            index: 0,
            predicate: None,
        }
    }

    pub fn with_predicate(mut self, p: PredicateRef) -> Self {
        self.predicate = Some(p);
        self
    }
}

/// Operation position of a [`Pattern::Term`].
#[derive(Clone, PartialEq)]
pub enum PatOp {
    Sym(Symbol),
    Var(PatVar),
}

#[derive(Clone, PartialEq)]
pub enum Pattern {
    Var(PatVar),
    /// Matches a run of zero or more sibling arguments.
    Segment(PatVar),
    Lit(Literal),
    Term(PatOp, Vec<Pattern>),
}

impl Pattern {
    pub fn var(name: &str) -> Pattern {
        Pattern::Var(PatVar::new(name))
    }

    pub fn segment(name: &str) -> Pattern {
        Pattern::Segment(PatVar::new(name))
    }

    pub fn lit(t: &Term) -> Option<Pattern> {
        t.as_literal().map(Pattern::Lit)
    }

    pub fn app(op: &str, args: Vec<Pattern>) -> Pattern {
        Pattern::Term(PatOp::Sym(Symbol::new(op)), args)
    }

    /// Pattern matching exactly `t`.
    pub fn from_term(t: &Term) -> Pattern {
        match t {
            Term::Compound(op, args) => Pattern::Term(PatOp::Sym(*op), args.iter().map(Pattern::from_term).collect()),
            _ => Pattern::Lit(t.as_literal().unwrap()),
        }
    }

    /// The term this pattern denotes if it has no variables.
    pub fn to_ground_term(&self) -> Option<Term> {
        match self {
            Pattern::Lit(l) => Some(l.to_term()),
            Pattern::Term(PatOp::Sym(op), args) => {
                let args = args.iter().map(Pattern::to_ground_term).collect::<Option<Vec<_>>>()?;
                Some(Term::Compound(*op, args))
            }
            _ => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Pattern::Var(_) | Pattern::Segment(_) => false,
            Pattern::Lit(_) => true,
            Pattern::Term(op, args) => matches!(op, PatOp::Sym(_)) && args.iter().all(Pattern::is_ground),
        }
    }

    pub fn has_segments(&self) -> bool {
        match self {
            Pattern::Segment(_) => true,
            Pattern::Var(_) | Pattern::Lit(_) => false,
            Pattern::Term(_, args) => args.iter().any(Pattern::has_segments),
        }
    }

    /// Visits every variable occurrence in pre-order, operation position first.
    pub fn for_each_var<'a>(&'a self, f: &mut impl FnMut(&'a PatVar, VarRole)) {
        match self {
            Pattern::Var(v) => f(v, VarRole::Term),
            Pattern::Segment(v) => f(v, VarRole::Segment),
            Pattern::Lit(_) => {}
            Pattern::Term(op, args) => {
                if let PatOp::Var(v) = op {
                    f(v, VarRole::Operation);
                }
                for a in args {
                    a.for_each_var(f);
                }
            }
        }
    }

    pub(crate) fn for_each_var_mut(&mut self, f: &mut impl FnMut(&mut PatVar)) {
        match self {
            Pattern::Var(v) | Pattern::Segment(v) => f(v),
            Pattern::Lit(_) => {}
            Pattern::Term(op, args) => {
                if let PatOp::Var(v) = op {
                    f(v);
                }
                for a in args {
                    a.for_each_var_mut(f);
                }
            }
        }
    }

    /// Number of distinct variable indices.
    pub fn n_vars(&self) -> usize {
        let mut n = 0;
        self.for_each_var(&mut |v, _| n = n.max(v.index + 1));
        n
    }

    pub fn depth(&self) -> usize {
        match self {
            Pattern::Term(_, args) => 1 + args.iter().map(Pattern::depth).max().unwrap_or(0),
            _ => 1,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VarRole {
    Term,
    Segment,
    Operation,
}

impl fmt::Display for PatVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if let Some(p) = &self.predicate {
            write!(f, "::{p}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Var(v) => write!(f, "~{v}"),
            Pattern::Segment(v) => write!(f, "~~{v}"),
            Pattern::Lit(l) => write!(f, "{l}"),
            Pattern::Term(op, args) => {
                match op {
                    PatOp::Sym(s) => write!(f, "({s}")?,
                    PatOp::Var(v) => write!(f, "(~{v}")?,
                }
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Debug for PatVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self, self.index)
    }
}
