//! The term model: atoms, numeric literals and compound applications.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::sexp::{Reader, Sexp, SyntaxError};
use crate::symbol::Symbol;

/// A numeric literal. Equality is by value across kinds, so `Int(1)` and
/// `Real(1.0)` are the same literal for matching and hash-consing.
#[derive(Clone, Copy)]
pub enum Number {
    Int(i64),
    Real(f64),
}

impl Number {
    pub fn as_f64(self) -> f64 {
        match self {
            Number::Int(i) => i as f64,
            Number::Real(r) => r,
        }
    }

    /// The value as an `i64` when it is integral and exactly representable.
    pub fn exact_int(self) -> Option<i64> {
        match self {
            Number::Int(i) => Some(i),
            Number::Real(r) => {
                // 2^63 is exactly representable; anything at or above it is not an i64.
                if r.fract() == 0.0 && (i64::MIN as f64..-(i64::MIN as f64)).contains(&r) {
                    Some(r as i64)
                } else {
                    None
                }
            }
        }
    }

    pub fn is_int(self) -> bool {
        matches!(self, Number::Int(_))
    }

    pub fn is_real(self) -> bool {
        matches!(self, Number::Real(_))
    }

    pub fn is_nan(self) -> bool {
        matches!(self, Number::Real(r) if r.is_nan())
    }

    pub fn is_zero(self) -> bool {
        self.as_f64() == 0.0
    }
}

impl PartialEq for Number {
    fn eq(&self, other: &Self) -> bool {
        match (*self, *other) {
            (Number::Int(a), Number::Int(b)) => a == b,
            (Number::Real(a), Number::Real(b)) => a == b || (a.is_nan() && b.is_nan()),
            (Number::Int(i), r @ Number::Real(_)) | (r @ Number::Real(_), Number::Int(i)) => {
                r.exact_int() == Some(i)
            }
        }
    }
}

// NaN compares equal to itself here so literals can live in hash maps;
// numeric ordering (`partial_cmp`) still leaves NaN unordered.
impl Eq for Number {}

impl Hash for Number {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self.exact_int() {
            Some(i) => {
                0u8.hash(state);
                i.hash(state);
            }
            None => {
                1u8.hash(state);
                let r = self.as_f64();
                let bits = if r.is_nan() { f64::NAN.to_bits() } else { r.to_bits() };
                bits.hash(state);
            }
        }
    }
}

impl PartialOrd for Number {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (*self, *other) {
            (Number::Int(a), Number::Int(b)) => Some(a.cmp(&b)),
            (a, b) => a.as_f64().partial_cmp(&b.as_f64()),
        }
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Number::Int(i) => write!(f, "{i}"),
            Number::Real(r) if r.is_nan() => f.write_str("NaN"),
            Number::Real(r) if r.is_infinite() => f.write_str(if r > 0.0 { "Inf" } else { "-Inf" }),
            Number::Real(r) => write!(f, "{r:?}"),
        }
    }
}

impl fmt::Debug for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<i64> for Number {
    fn from(i: i64) -> Self {
        Number::Int(i)
    }
}

impl From<f64> for Number {
    fn from(r: f64) -> Self {
        Number::Real(r)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Atom(Symbol),
    Lit(Number),
    Compound(Symbol, Vec<Term>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TermError {
    #[error("contract violation: `{0}` called on a non-compound term")]
    ContractViolation(&'static str),
}

/// A leaf value: a number or a symbol atom.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub enum Literal {
    Num(Number),
    Sym(Symbol),
}

impl Literal {
    pub fn to_term(self) -> Term {
        match self {
            Literal::Num(n) => Term::Lit(n),
            Literal::Sym(s) => Term::Atom(s),
        }
    }

    pub fn as_number(self) -> Option<Number> {
        match self {
            Literal::Num(n) => Some(n),
            Literal::Sym(_) => None,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Num(n) => write!(f, "{n}"),
            Literal::Sym(s) => write!(f, "{s}"),
        }
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub(crate) const LAMBDA: &str = "lambda";
pub(crate) const CALL: &str = "call";

impl Term {
    pub fn atom(name: &str) -> Term {
        Term::Atom(Symbol::new(name))
    }

    pub fn int(i: i64) -> Term {
        Term::Lit(Number::Int(i))
    }

    pub fn real(r: f64) -> Term {
        Term::Lit(Number::Real(r))
    }

    pub fn app(op: &str, args: Vec<Term>) -> Term {
        Term::Compound(Symbol::new(op), args)
    }

    /// `similarterm`: build a compound with the given head.
    pub fn similar_term(op: Symbol, args: Vec<Term>) -> Term {
        Term::Compound(op, args)
    }

    /// `istree`: true exactly for compounds.
    pub fn is_tree(&self) -> bool {
        matches!(self, Term::Compound(..))
    }

    pub fn operation(&self) -> Result<Symbol, TermError> {
        match self {
            Term::Compound(op, _) => Ok(*op),
            _ => Err(TermError::ContractViolation("operation")),
        }
    }

    pub fn arguments(&self) -> Result<&[Term], TermError> {
        match self {
            Term::Compound(_, args) => Ok(args),
            _ => Err(TermError::ContractViolation("arguments")),
        }
    }

    pub fn arity(&self) -> Result<usize, TermError> {
        match self {
            Term::Compound(_, args) => Ok(args.len()),
            _ => Err(TermError::ContractViolation("arity")),
        }
    }

    /// The leaf value of an atom or literal; `None` for compounds.
    pub fn as_literal(&self) -> Option<Literal> {
        match self {
            Term::Atom(s) => Some(Literal::Sym(*s)),
            Term::Lit(n) => Some(Literal::Num(*n)),
            Term::Compound(..) => None,
        }
    }

    pub fn as_number(&self) -> Option<Number> {
        match self {
            Term::Lit(n) => Some(*n),
            _ => None,
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Term::Compound(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            _ => 1,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Compound(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
            _ => 1,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Atom(s) => write!(f, "{s}"),
            Term::Lit(n) => write!(f, "{n}"),
            Term::Compound(op, args) => {
                write!(f, "({op}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for Term {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_term(s)
    }
}

pub fn print_term(t: &Term) -> String {
    t.to_string()
}

pub fn parse_term(text: &str) -> Result<Term, SyntaxError> {
    let sexp = Reader::new(text).read_only()?;
    term_from_sexp(&sexp)
}

pub(crate) fn term_from_sexp(sexp: &Sexp) -> Result<Term, SyntaxError> {
    match sexp {
        Sexp::Atom { text, offset } => classify_atom(text, *offset),
        Sexp::List { items, offset } => {
            let (head, rest) = items
                .split_first()
                .ok_or_else(|| SyntaxError::new(*offset, "empty compound `()`"))?;
            let op = match head {
                Sexp::Atom { text, offset } => match classify_atom(text, *offset)? {
                    Term::Atom(s) => s,
                    _ => return Err(SyntaxError::new(*offset, format!("operation `{text}` is not a symbol"))),
                },
                Sexp::List { offset, .. } => {
                    return Err(SyntaxError::new(*offset, "operation position must hold a symbol"))
                }
            };
            let args = rest.iter().map(term_from_sexp).collect::<Result<_, _>>()?;
            Ok(Term::Compound(op, args))
        }
    }
}

fn classify_atom(text: &str, offset: usize) -> Result<Term, SyntaxError> {
    if let Some(n) = parse_number(text, offset)? {
        return Ok(Term::Lit(n));
    }
    if is_symbol(text) {
        Ok(Term::Atom(Symbol::new(text)))
    } else {
        Err(SyntaxError::new(offset, format!("invalid atom `{text}`")))
    }
}

pub(crate) fn is_symbol_start(c: char) -> bool {
    c.is_ascii_alphabetic() || "_+-*/<>=!?.|&~".contains(c)
}

pub(crate) fn is_symbol(text: &str) -> bool {
    let mut chars = text.chars();
    match chars.next() {
        Some(c) if is_symbol_start(c) => chars.all(|c| is_symbol_start(c) || c.is_ascii_digit()),
        _ => false,
    }
}

/// `Ok(None)` when `text` does not look like a number at all; an error when
/// it starts like one but is malformed.
pub(crate) fn parse_number(text: &str, offset: usize) -> Result<Option<Number>, SyntaxError> {
    match text {
        "Inf" => return Ok(Some(Number::Real(f64::INFINITY))),
        "-Inf" => return Ok(Some(Number::Real(f64::NEG_INFINITY))),
        "NaN" => return Ok(Some(Number::Real(f64::NAN))),
        _ => {}
    }
    let body = text.strip_prefix('-').unwrap_or(text);
    if !body.starts_with(|c: char| c.is_ascii_digit()) {
        return Ok(None);
    }
    let malformed = || SyntaxError::new(offset, format!("malformed number `{text}`"));
    let bytes = body.as_bytes();
    let mut i = 0;
    let digits = |i: &mut usize| {
        let start = *i;
        while *i < bytes.len() && bytes[*i].is_ascii_digit() {
            *i += 1;
        }
        *i > start
    };
    digits(&mut i);
    let mut real = false;
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        real = true;
        if !digits(&mut i) {
            return Err(malformed());
        }
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        i += 1;
        real = true;
        if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            i += 1;
        }
        if !digits(&mut i) {
            return Err(malformed());
        }
    }
    if i != bytes.len() {
        return Err(malformed());
    }
    if real {
        text.parse::<f64>().map(|r| Some(Number::Real(r))).map_err(|_| malformed())
    } else {
        text.parse::<i64>().map(|i| Some(Number::Int(i))).map_err(|_| malformed())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("`{0}` is not a builtin operation")]
    UnknownBuiltin(Symbol),
    #[error("builtin `{op}` expects 2 arguments, got {got}")]
    Arity { op: Symbol, got: usize },
}

pub fn is_builtin(op: Symbol) -> bool {
    matches!(op.as_str(), "+" | "-" | "*" | "/")
}

/// Evaluates `+ - * /` over two literals.
///
/// Int op Int stays Int while the result is exact (no overflow, exact
/// quotient); otherwise the result is Real with IEEE semantics, so `0/0` is
/// NaN and `x/0` is an infinity signed like `x`.
pub fn eval_builtin(op: Symbol, args: &[Number]) -> Result<Number, EvalError> {
    if !is_builtin(op) {
        return Err(EvalError::UnknownBuiltin(op));
    }
    let [a, b] = args else {
        return Err(EvalError::Arity { op, got: args.len() });
    };
    let (a, b) = (*a, *b);
    if let (Number::Int(x), Number::Int(y)) = (a, b) {
        let exact = match op.as_str() {
            "+" => x.checked_add(y),
            "-" => x.checked_sub(y),
            "*" => x.checked_mul(y),
            _ => {
                if y == 0 {
                    None
                } else if x.checked_rem(y) == Some(0) {
                    x.checked_div(y)
                } else {
                    None
                }
            }
        };
        if let Some(v) = exact {
            return Ok(Number::Int(v));
        }
    }
    let (x, y) = (a.as_f64(), b.as_f64());
    let r = match op.as_str() {
        "+" => x + y,
        "-" => x - y,
        "*" => x * y,
        _ => x / y,
    };
    Ok(Number::Real(r))
}

/// Inlines `(call (lambda p body) arg)` to `body[p := arg]`.
///
/// Returns `None` for anything that is not a well-formed single-argument
/// lambda application. Inner lambdas that rebind `p` are left alone.
pub fn inline_anonymous(t: &Term) -> Option<Term> {
    let Term::Compound(head, args) = t else {
        return None;
    };
    if head.as_str() != CALL || args.len() != 2 {
        return None;
    }
    let (param, body) = as_lambda(&args[0])?;
    Some(substitute_atom(body, param, &args[1]))
}

fn as_lambda(t: &Term) -> Option<(Symbol, &Term)> {
    match t {
        Term::Compound(op, args) if op.as_str() == LAMBDA && args.len() == 2 => match &args[0] {
            Term::Atom(p) => Some((*p, &args[1])),
            _ => None,
        },
        _ => None,
    }
}

fn substitute_atom(t: &Term, param: Symbol, value: &Term) -> Term {
    match t {
        Term::Atom(s) if *s == param => value.clone(),
        Term::Compound(_, _) if matches!(as_lambda(t), Some((p, _)) if p == param) => t.clone(),
        Term::Compound(op, args) => {
            Term::Compound(*op, args.iter().map(|a| substitute_atom(a, param, value)).collect())
        }
        _ => t.clone(),
    }
}
