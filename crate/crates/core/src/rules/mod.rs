//! Patterns, rewrite rules and theories, plus the rule-file parser.

mod parse;
pub mod pattern;
pub mod predicate;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::classical::Matcher;
use crate::ematch::{EMatchError, EMatchProgram};
use crate::sexp::SyntaxError;
use crate::symbol::Symbol;

pub use parse::{parse_rule, parse_rule_with, parse_theory, parse_theory_with};
pub use pattern::{PatOp, PatVar, Pattern, VarRole};
pub use predicate::{Predicate, PredicateRef, PredicateRegistry};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuleError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("rule syntax error: {0}")]
    RuleSyntax(String),
    #[error("variable `{0}` appears on the right-hand side but not on the left")]
    UnboundRhsVariable(String),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("predicate `{0}` is already registered")]
    DuplicatePredicate(String),
    #[error("predicate `{name}` takes {expected} parameter(s), got {got}")]
    PredicateParams { name: String, expected: usize, got: usize },
    #[error("rule `{rule}` is {kind:?} and cannot be applied classically")]
    UnsupportedRuleKind { rule: String, kind: RuleKind },
    #[error("duplicate rule name `{0}`")]
    DuplicateRuleName(String),
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<RuleError>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    /// `-->`: directed rewrite.
    Rewrite,
    /// `=>`: directed, right-hand side is evaluated.
    Dynamic,
    /// `==`: bidirectional equality (e-graph only).
    Equality,
    /// `!=`: the two sides must never become equal (e-graph only).
    Unequal,
}

impl RuleKind {
    pub fn token(self) -> &'static str {
        match self {
            RuleKind::Rewrite => "-->",
            RuleKind::Dynamic => "=>",
            RuleKind::Equality => "==",
            RuleKind::Unequal => "!=",
        }
    }

    pub fn from_token(tok: &str) -> Option<RuleKind> {
        Some(match tok {
            "-->" => RuleKind::Rewrite,
            "=>" => RuleKind::Dynamic,
            "==" => RuleKind::Equality,
            "!=" => RuleKind::Unequal,
            _ => return None,
        })
    }

    pub fn is_classical(self) -> bool {
        matches!(self, RuleKind::Rewrite | RuleKind::Dynamic)
    }
}

/// Which side of a rule acts as the left-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Clone)]
pub struct Rule {
    pub kind: RuleKind,
    pub lhs: Pattern,
    pub rhs: Pattern,
    pub name: String,
    /// Variable names by index.
    pub patvar_names: Vec<Symbol>,
    cache: Arc<RuleCache>,
}

#[derive(Default)]
struct RuleCache {
    matcher: OnceLock<Matcher>,
    forward: OnceLock<Result<EMatchProgram, EMatchError>>,
    backward: OnceLock<Result<EMatchProgram, EMatchError>>,
}

impl Rule {
    /// Builds a rule, assigning dense variable indices in order of first
    /// appearance in `lhs` and checking that `rhs` only uses bound variables.
    pub fn new(kind: RuleKind, mut lhs: Pattern, mut rhs: Pattern, name: impl Into<String>) -> Result<Rule, RuleError> {
        if matches!(lhs, Pattern::Segment(_)) || matches!(rhs, Pattern::Segment(_)) {
            return Err(RuleError::RuleSyntax("a segment variable cannot stand alone as a rule side".into()));
        }
        let mut names: Vec<Symbol> = Vec::new();
        let mut roles: HashMap<Symbol, VarRole> = HashMap::new();
        let mut conflict = None;
        lhs.for_each_var_mut(&mut |v| {
            v.index = match names.iter().position(|n| *n == v.name) {
                Some(i) => i,
                None => {
                    names.push(v.name);
                    names.len() - 1
                }
            };
        });
        let mut check_roles = |p: &Pattern| {
            p.for_each_var(&mut |v, role| {
                let prev = *roles.entry(v.name).or_insert(role);
                if (prev == VarRole::Segment) != (role == VarRole::Segment) {
                    conflict = Some(v.name);
                }
            })
        };
        check_roles(&lhs);
        check_roles(&rhs);
        if let Some(n) = conflict {
            return Err(RuleError::RuleSyntax(format!(
                "variable `{n}` is used both as a segment and as a single variable"
            )));
        }
        let mut unbound = None;
        rhs.for_each_var_mut(&mut |v| match names.iter().position(|n| *n == v.name) {
            Some(i) => v.index = i,
            None => {
                unbound.get_or_insert(v.name);
            }
        });
        if let Some(n) = unbound {
            return Err(RuleError::UnboundRhsVariable(n.to_string()));
        }
        if kind == RuleKind::Equality {
            let mut used = vec![false; names.len()];
            rhs.for_each_var(&mut |v, _| used[v.index] = true);
            if let Some(i) = used.iter().position(|u| !u) {
                return Err(RuleError::UnboundRhsVariable(names[i].to_string()));
            }
        }
        Ok(Rule {
            kind,
            lhs,
            rhs,
            name: name.into(),
            patvar_names: names,
            cache: Arc::default(),
        })
    }

    pub fn n_vars(&self) -> usize {
        self.patvar_names.len()
    }

    /// The sides to search, in order: both for equalities, forward otherwise.
    pub fn directions(&self) -> &'static [Direction] {
        match self.kind {
            RuleKind::Equality => &[Direction::Forward, Direction::Backward],
            _ => &[Direction::Forward],
        }
    }

    /// (searched side, instantiated side) for a direction.
    pub fn sides(&self, dir: Direction) -> (&Pattern, &Pattern) {
        match dir {
            Direction::Forward => (&self.lhs, &self.rhs),
            Direction::Backward => (&self.rhs, &self.lhs),
        }
    }

    pub fn uses_analysis(&self) -> bool {
        let mut any = false;
        for p in [&self.lhs, &self.rhs] {
            p.for_each_var(&mut |v, _| any |= v.predicate.as_ref().is_some_and(PredicateRef::uses_analysis));
        }
        any
    }

    pub(crate) fn matcher(&self) -> &Matcher {
        self.cache.matcher.get_or_init(|| Matcher::compile(&self.lhs))
    }

    pub(crate) fn program(&self, dir: Direction) -> Result<&EMatchProgram, EMatchError> {
        let (cell, side) = match dir {
            Direction::Forward => (&self.cache.forward, &self.lhs),
            Direction::Backward => (&self.cache.backward, &self.rhs),
        };
        cell.get_or_init(|| EMatchProgram::compile(side).map(|mut p| {
            p.n_vars = self.n_vars();
            p
        }))
        .as_ref()
        .map_err(Clone::clone)
    }
}

impl PartialEq for Rule {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.lhs == other.lhs && self.rhs == other.rhs && self.name == other.name
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.kind.token(), self.rhs)
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.name, self)
    }
}

/// An ordered collection of uniquely named rules.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Theory {
    pub name: String,
    pub rules: Vec<Rule>,
}

impl Theory {
    pub fn new(name: impl Into<String>) -> Self {
        Theory {
            name: name.into(),
            rules: Vec::new(),
        }
    }

    /// Appends a rule. `None` names it `r<k>` after its 1-based position.
    pub fn push(&mut self, mut rule: Rule, name: Option<String>) -> Result<(), RuleError> {
        rule.name = name.unwrap_or_else(|| format!("r{}", self.rules.len() + 1));
        if self.rules.iter().any(|r| r.name == rule.name) {
            return Err(RuleError::DuplicateRuleName(rule.name));
        }
        self.rules.push(rule);
        Ok(())
    }

    /// Concatenates theories in order; rule names become `<theory>.<rule>`.
    pub fn concat<'a>(name: impl Into<String>, parts: impl IntoIterator<Item = &'a Theory>) -> Result<Theory, RuleError> {
        let mut out = Theory::new(name);
        for t in parts {
            for r in &t.rules {
                let qualified = format!("{}.{}", t.name, r.name);
                out.push(r.clone(), Some(qualified))?;
            }
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn uses_analysis(&self) -> bool {
        self.rules.iter().any(Rule::uses_analysis)
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "@name {}", r.name)?;
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}
