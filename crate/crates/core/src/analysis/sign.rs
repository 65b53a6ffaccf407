//! Sign analysis over `+ - * /` with per-atom sign assumptions.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::analysis::{analyze, Analysis, AnalysisError};
use crate::egraph::{EGraph, ENode, Id};
use crate::symbol::Symbol;
use crate::term::{Literal, Term};

pub const SIGN: &str = "sign";

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum SignValue {
    Unknown,
    Zero,
    Pos,
    Neg,
    PosInf,
    NegInf,
    NaN,
}

impl SignValue {
    pub fn of_f64(x: f64) -> SignValue {
        if x.is_nan() {
            SignValue::NaN
        } else if x == f64::INFINITY {
            SignValue::PosInf
        } else if x == f64::NEG_INFINITY {
            SignValue::NegInf
        } else if x > 0.0 {
            SignValue::Pos
        } else if x < 0.0 {
            SignValue::Neg
        } else {
            SignValue::Zero
        }
    }

    /// Representative value: 0, 1, -1, ±Inf or NaN.
    pub fn to_f64(self) -> Option<f64> {
        Some(match self {
            SignValue::Unknown => return None,
            SignValue::Zero => 0.0,
            SignValue::Pos => 1.0,
            SignValue::Neg => -1.0,
            SignValue::PosInf => f64::INFINITY,
            SignValue::NegInf => f64::NEG_INFINITY,
            SignValue::NaN => f64::NAN,
        })
    }
}

impl fmt::Display for SignValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignValue::Unknown => "unknown",
            SignValue::Zero => "0",
            SignValue::Pos => "+1",
            SignValue::Neg => "-1",
            SignValue::PosInf => "Inf",
            SignValue::NegInf => "-Inf",
            SignValue::NaN => "NaN",
        })
    }
}

impl FromStr for SignValue {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "+" | "+1" | "1" | "pos" => SignValue::Pos,
            "-" | "-1" | "neg" => SignValue::Neg,
            "0" | "zero" => SignValue::Zero,
            "inf" | "+inf" => SignValue::PosInf,
            "-inf" => SignValue::NegInf,
            "nan" => SignValue::NaN,
            "?" | "unknown" => SignValue::Unknown,
            _ => return Err(format!("invalid sign `{s}`")),
        })
    }
}

#[derive(Clone, Debug)]
pub struct SignAnalysis {
    assumptions: HashMap<Symbol, SignValue>,
}

impl Default for SignAnalysis {
    /// Assumes x > 0, y < 0, z = 0 and k = +Inf.
    fn default() -> Self {
        let mut a = SignAnalysis::without_assumptions();
        for (name, s) in [
            ("x", SignValue::Pos),
            ("y", SignValue::Neg),
            ("z", SignValue::Zero),
            ("k", SignValue::PosInf),
        ] {
            a.assume(name, s);
        }
        a
    }
}

impl SignAnalysis {
    pub fn without_assumptions() -> Self {
        SignAnalysis {
            assumptions: HashMap::new(),
        }
    }

    pub fn assume(&mut self, atom: &str, s: SignValue) -> &mut Self {
        self.assumptions.insert(Symbol::new(atom), s);
        self
    }

    /// Parses `name=sign`, e.g. `x=+`, `k=inf`.
    pub fn assume_spec(&mut self, spec: &str) -> Result<&mut Self, String> {
        let (name, sign) = spec
            .split_once('=')
            .ok_or_else(|| format!("expected `name=sign`, got `{spec}`"))?;
        let s = sign.trim().parse()?;
        Ok(self.assume(name.trim(), s))
    }
}

impl Analysis for SignAnalysis {
    type Data = SignValue;

    fn name(&self) -> &str {
        SIGN
    }

    fn make(&self, _g: &EGraph, n: &ENode, child: &dyn Fn(Id) -> Option<SignValue>) -> Option<SignValue> {
        let (op, children) = match n {
            ENode::Lit(Literal::Num(x)) => return Some(SignValue::of_f64(x.as_f64())),
            ENode::Lit(Literal::Sym(s)) => {
                return Some(self.assumptions.get(s).copied().unwrap_or(SignValue::Unknown))
            }
            ENode::Op(op, children) => (op.as_str(), children),
        };
        if !matches!(op, "+" | "-" | "*" | "/") {
            return Some(SignValue::Unknown);
        }
        let signs = children.iter().map(|&c| child(c)).collect::<Option<Vec<_>>>()?;
        let values = match signs.iter().map(|s| s.to_f64()).collect::<Option<Vec<_>>>() {
            Some(v) => v,
            None => return Some(SignValue::Unknown),
        };
        Some(match (op, values.as_slice()) {
            ("-", [v]) => SignValue::of_f64(-v),
            ("*", [l, r]) => SignValue::of_f64(l * r),
            ("/", [l, r]) => SignValue::of_f64(l / r),
            ("+", [l, r]) => additive(l + r),
            ("-", [l, r]) => additive(l - r),
            _ => SignValue::Unknown,
        })
    }

    fn join(&self, a: &SignValue, b: &SignValue) -> SignValue {
        if a == b {
            *a
        } else {
            SignValue::Unknown
        }
    }

    fn render(&self, d: &SignValue) -> String {
        d.to_string()
    }
}

/// A zero sum of signs is ambiguous (1 + -1 says nothing about magnitudes).
fn additive(s: f64) -> SignValue {
    if s == 0.0 {
        SignValue::Unknown
    } else {
        SignValue::of_f64(s)
    }
}

/// Sign of a single term under the given assumptions.
pub fn sign_of(t: &Term, analysis: SignAnalysis) -> Result<SignValue, AnalysisError> {
    let mut g = EGraph::new();
    let id = g.add_term(t).expect("no node limit on a fresh graph");
    analyze(&mut g, analysis)?;
    Ok(g.get_data::<SignValue>(SIGN, id).copied().unwrap_or(SignValue::Unknown))
}
