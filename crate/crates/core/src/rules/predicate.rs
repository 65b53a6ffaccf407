//! Named predicates that can be attached to pattern variables (`~x::number`).
//!
//! Each predicate can be checked against a plain term (classical rewriting)
//! or against an e-class (e-graph rewriting).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::analysis::sign::{SignValue, SIGN};
use crate::egraph::{EGraph, ENode, Id};
use crate::rules::RuleError;
use crate::term::{Literal, Number, Term};

pub trait Predicate: Send + Sync {
    /// Number of numeric parameters, e.g. 1 for `near_zero(1e-13)`.
    fn param_count(&self) -> usize {
        0
    }

    /// Whether a successful check in e-graph mode should bind the class's
    /// literal to the variable.
    fn lifts_literal(&self) -> bool {
        false
    }

    /// Whether the e-graph check reads analysis data.
    fn uses_analysis(&self) -> bool {
        false
    }

    fn check_literal(&self, _n: Number, _params: &[Number]) -> bool {
        false
    }

    fn check_term(&self, t: &Term, params: &[Number]) -> bool {
        match t {
            Term::Lit(n) => self.check_literal(*n, params),
            _ => false,
        }
    }

    fn check_class(&self, g: &EGraph, id: Id, params: &[Number]) -> bool {
        class_numbers(g, id).any(|n| self.check_literal(n, params))
    }
}

pub(crate) fn class_numbers(g: &EGraph, id: Id) -> impl Iterator<Item = Number> + '_ {
    g.class(id).nodes().iter().filter_map(|n| match n {
        ENode::Lit(Literal::Num(x)) => Some(*x),
        _ => None,
    })
}

/// A predicate resolved from the registry together with its parameters.
#[derive(Clone)]
pub struct PredicateRef {
    pub name: String,
    pub params: Vec<Number>,
    pub(crate) imp: Arc<dyn Predicate>,
}

impl PredicateRef {
    pub fn check_term(&self, t: &Term) -> bool {
        self.imp.check_term(t, &self.params)
    }

    pub fn check_class(&self, g: &EGraph, id: Id) -> bool {
        self.imp.check_class(g, id, &self.params)
    }

    pub fn check_literal(&self, n: Number) -> bool {
        self.imp.check_literal(n, &self.params)
    }

    pub fn lifts_literal(&self) -> bool {
        self.imp.lifts_literal()
    }

    pub fn uses_analysis(&self) -> bool {
        self.imp.uses_analysis()
    }
}

impl PartialEq for PredicateRef {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.params == other.params
    }
}

impl fmt::Display for PredicateRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.params.is_empty() {
            let ps: Vec<String> = self.params.iter().map(|p| p.to_string()).collect();
            write!(f, "({})", ps.join(", "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for PredicateRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone)]
pub struct PredicateRegistry {
    preds: BTreeMap<String, Arc<dyn Predicate>>,
}

impl PredicateRegistry {
    pub fn empty() -> Self {
        PredicateRegistry { preds: BTreeMap::new() }
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        let builtins: [(&str, Arc<dyn Predicate>); 7] = [
            ("number", Arc::new(IsNumber)),
            ("int", Arc::new(IsInt)),
            ("real", Arc::new(IsNumber)),
            ("iszero", Arc::new(IsZero)),
            ("notzero", Arc::new(NotZero)),
            ("cansimplifyfraction", Arc::new(CanSimplifyFraction)),
            ("near_zero", Arc::new(NearZero)),
        ];
        for (name, p) in builtins {
            r.register(name, p).expect("builtin names are distinct");
        }
        r
    }

    /// The shared registry of built-in predicates used by the rule parser.
    pub fn builtin() -> &'static PredicateRegistry {
        static REG: OnceLock<PredicateRegistry> = OnceLock::new();
        REG.get_or_init(Self::with_builtins)
    }

    pub fn register(&mut self, name: &str, p: Arc<dyn Predicate>) -> Result<(), RuleError> {
        if self.preds.contains_key(name) {
            return Err(RuleError::DuplicatePredicate(name.to_owned()));
        }
        self.preds.insert(name.to_owned(), p);
        Ok(())
    }

    pub fn resolve(&self, name: &str, params: Vec<Number>) -> Result<PredicateRef, RuleError> {
        let imp = self
            .preds
            .get(name)
            .ok_or_else(|| RuleError::UnknownPredicate(name.to_owned()))?;
        if params.len() != imp.param_count() {
            return Err(RuleError::PredicateParams {
                name: name.to_owned(),
                expected: imp.param_count(),
                got: params.len(),
            });
        }
        Ok(PredicateRef {
            name: name.to_owned(),
            params,
            imp: imp.clone(),
        })
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.preds.keys().map(String::as_str)
    }
}

impl Default for PredicateRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

/// Every numeric literal. `real` is an alias: integers are reals too.
struct IsNumber;

impl Predicate for IsNumber {
    fn lifts_literal(&self) -> bool {
        true
    }

    fn check_literal(&self, _n: Number, _params: &[Number]) -> bool {
        true
    }
}

/// Integral values, whether written `2` or `2.0`.
struct IsInt;

impl Predicate for IsInt {
    fn lifts_literal(&self) -> bool {
        true
    }

    fn check_literal(&self, n: Number, _params: &[Number]) -> bool {
        n.exact_int().is_some()
    }
}

struct NearZero;

impl Predicate for NearZero {
    fn param_count(&self) -> usize {
        1
    }

    fn lifts_literal(&self) -> bool {
        true
    }

    fn check_literal(&self, n: Number, params: &[Number]) -> bool {
        n.as_f64().abs() <= params[0].as_f64()
    }
}

fn class_sign(g: &EGraph, id: Id) -> Option<SignValue> {
    g.get_data::<SignValue>(SIGN, id).copied()
}

struct IsZero;

impl Predicate for IsZero {
    fn uses_analysis(&self) -> bool {
        true
    }

    fn check_literal(&self, n: Number, _params: &[Number]) -> bool {
        n.is_zero()
    }

    fn check_class(&self, g: &EGraph, id: Id, params: &[Number]) -> bool {
        class_sign(g, id) == Some(SignValue::Zero) || class_numbers(g, id).any(|n| self.check_literal(n, params))
    }
}

/// Known to be non-zero. In e-graph mode a class whose sign is unknown is
/// not accepted.
struct NotZero;

impl Predicate for NotZero {
    fn uses_analysis(&self) -> bool {
        true
    }

    fn check_literal(&self, n: Number, _params: &[Number]) -> bool {
        !n.is_zero()
    }

    fn check_class(&self, g: &EGraph, id: Id, params: &[Number]) -> bool {
        match class_sign(g, id) {
            Some(s) => !matches!(s, SignValue::Zero | SignValue::Unknown),
            None => class_numbers(g, id).any(|n| self.check_literal(n, params)),
        }
    }
}

/// `x / x` may become 1: x is finite, non-zero and not NaN.
struct CanSimplifyFraction;

impl Predicate for CanSimplifyFraction {
    fn uses_analysis(&self) -> bool {
        true
    }

    fn check_literal(&self, n: Number, _params: &[Number]) -> bool {
        let x = n.as_f64();
        x.is_finite() && x != 0.0
    }

    fn check_class(&self, g: &EGraph, id: Id, params: &[Number]) -> bool {
        match class_sign(g, id) {
            Some(s) => matches!(s, SignValue::Pos | SignValue::Neg),
            None => class_numbers(g, id).any(|n| self.check_literal(n, params)),
        }
    }
}
