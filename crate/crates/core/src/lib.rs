//! Term rewriting and equality saturation over symbolic expressions.

pub mod analysis;
pub mod classical;
pub mod cli;
pub mod egraph;
pub mod ematch;
pub mod rules;
pub mod saturation;
pub mod sexp;
pub mod symbol;
pub mod term;
pub mod theories;

pub use sexp::SyntaxError;
pub use symbol::Symbol;
pub use term::{eval_builtin, inline_anonymous, parse_term, print_term, EvalError, Literal, Number, Term, TermError};
