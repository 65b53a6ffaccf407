//! A small language for composing classical rewriters from the command line:
//!
//! ```text
//! strategy := name '(' strategy ')' | chain '(' ruleset ')'
//! ruleset  := item (',' item)*      item := all | inline | <rule name>
//! ```
//!
//! `name` is one of `prewalk`, `postwalk`, `fixpoint`, `fixpoint_nocycle`,
//! `passthrough`; `restarted_chain` takes a ruleset like `chain`.

use thiserror::Error;

use crate::classical::{
    Chain, FixpointNoCycle, Fixpoint, FnRewriter, PassThrough, Postwalk, Prewalk, RestartedChain, Rewriter,
};
use crate::rules::{Rule, Theory};
use crate::term::inline_anonymous;

pub const DEFAULT_STRATEGY: &str = "fixpoint(postwalk(chain(all)))";

/// Subtrees smaller than this are walked serially by threaded strategies.
const THREAD_CUTOFF: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StrategyError {
    #[error("strategy syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown combinator `{0}`")]
    UnknownCombinator(String),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
}

pub struct Strategy {
    pub rewriter: Box<dyn Rewriter>,
    /// Names of rules left out because they cannot run classically.
    pub skipped: Vec<String>,
}

pub fn parse_strategy(text: &str, theory: &Theory, threaded: bool) -> Result<Strategy, StrategyError> {
    let tokens = tokenize(text);
    let mut p = Parser {
        tokens,
        pos: 0,
        theory,
        threaded,
        skipped: Vec::new(),
        end: text.len(),
    };
    let rewriter = p.strategy()?;
    if let Some((off, tok)) = p.tokens.get(p.pos) {
        return Err(StrategyError::Syntax {
            offset: *off,
            message: format!("unexpected `{tok}` after strategy"),
        });
    }
    Ok(Strategy {
        rewriter,
        skipped: p.skipped,
    })
}

fn tokenize(text: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        let delim = c.is_whitespace() || matches!(c, '(' | ')' | ',');
        if delim {
            if let Some(s) = start.take() {
                out.push((s, text[s..i].to_owned()));
            }
            if !c.is_whitespace() {
                out.push((i, c.to_string()));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, text[s..].to_owned()));
    }
    out
}

struct Parser<'a> {
    tokens: Vec<(usize, String)>,
    pos: usize,
    theory: &'a Theory,
    threaded: bool,
    skipped: Vec<String>,
    end: usize,
}

impl Parser<'_> {
    fn next(&mut self) -> Result<(usize, String), StrategyError> {
        let tok = self.tokens.get(self.pos).cloned().ok_or(StrategyError::Syntax {
            offset: self.end,
            message: "unexpected end of strategy".into(),
        })?;
        self.pos += 1;
        Ok(tok)
    }

    fn expect(&mut self, want: &str) -> Result<(), StrategyError> {
        let (off, tok) = self.next()?;
        if tok != want {
            return Err(StrategyError::Syntax {
                offset: off,
                message: format!("expected `{want}`, found `{tok}`"),
            });
        }
        Ok(())
    }

    fn strategy(&mut self) -> Result<Box<dyn Rewriter>, StrategyError> {
        let (_, name) = self.next()?;
        self.expect("(")?;
        let rw: Box<dyn Rewriter> = match name.as_str() {
            "chain" => Box::new(Chain(self.ruleset()?)),
            "restarted_chain" => Box::new(RestartedChain(self.ruleset()?)),
            "prewalk" | "postwalk" | "fixpoint" | "fixpoint_nocycle" | "passthrough" => {
                let inner = self.strategy()?;
                match name.as_str() {
                    "prewalk" if self.threaded => Box::new(Prewalk::threaded(inner, THREAD_CUTOFF)),
                    "prewalk" => Box::new(Prewalk::new(inner)),
                    "postwalk" if self.threaded => Box::new(Postwalk::threaded(inner, THREAD_CUTOFF)),
                    "postwalk" => Box::new(Postwalk::new(inner)),
                    "fixpoint" => Box::new(Fixpoint(inner)),
                    "fixpoint_nocycle" => Box::new(FixpointNoCycle(inner)),
                    _ => Box::new(PassThrough(inner)),
                }
            }
            _ => return Err(StrategyError::UnknownCombinator(name)),
        };
        self.expect(")")?;
        Ok(rw)
    }

    fn ruleset(&mut self) -> Result<Vec<Box<dyn Rewriter>>, StrategyError> {
        let mut out: Vec<Box<dyn Rewriter>> = Vec::new();
        loop {
            let (off, item) = self.next()?;
            match item.as_str() {
                "all" => {
                    for r in &self.theory.rules {
                        self.add_rule(r, &mut out);
                    }
                }
                "inline" => out.push(Box::new(FnRewriter(inline_anonymous))),
                "(" | ")" | "," => {
                    return Err(StrategyError::Syntax {
                        offset: off,
                        message: format!("expected a rule name, found `{item}`"),
                    })
                }
                name => {
                    let r = self.theory.get(name).ok_or_else(|| StrategyError::UnknownRule(name.to_owned()))?;
                    self.add_rule(r, &mut out);
                }
            }
            match self.tokens.get(self.pos) {
                Some((_, t)) if t == "," => self.pos += 1,
                _ => return Ok(out),
            }
        }
    }

    fn add_rule(&mut self, r: &Rule, out: &mut Vec<Box<dyn Rewriter>>) {
        if r.kind.is_classical() {
            out.push(Box::new(r.clone()));
        } else {
            self.skipped.push(r.name.clone());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::parse_theory;
    use crate::term::Term;

    fn t(s: &str) -> Term {
        s.parse().unwrap()
    }

    fn folder() -> Theory {
        parse_theory(
            "folder",
            "@vars a b\n(+ a::number b::number) => (+ a b)\n(* a b) == (* b a)\n@name dbl\n(d a) --> (+ a a)\n",
        )
        .unwrap()
    }

    #[test]
    fn default_strategy() {
        let s = parse_strategy(DEFAULT_STRATEGY, &folder(), false).unwrap();
        assert_eq!(s.skipped, vec!["r2".to_string()]);
        assert_eq!(s.rewriter.rewrite(&t("(+ 1 (+ 2 3))")), Some(t("6")));
    }

    #[test]
    fn single_pass() {
        let s = parse_strategy("postwalk(chain(dbl))", &folder(), false).unwrap();
        assert_eq!(s.rewriter.rewrite(&t("(d (d 1))")), Some(t("(+ (+ 1 1) (+ 1 1))")));
        let s = parse_strategy("postwalk(chain(r1, dbl))", &folder(), false).unwrap();
        assert_eq!(s.rewriter.rewrite(&t("(d 2)")), Some(t("(+ 2 2)")));
        let s = parse_strategy("fixpoint(postwalk(chain(dbl, r1)))", &folder(), true).unwrap();
        assert_eq!(s.rewriter.rewrite(&t("(d (d 1))")), Some(t("4")));
    }

    #[test]
    fn inline_item() {
        let s = parse_strategy("postwalk(chain(inline))", &Theory::new("empty"), false).unwrap();
        assert_eq!(s.rewriter.rewrite(&t("(call (lambda x (* 7 x)) 3)")), Some(t("(* 7 3)")));
    }

    #[test]
    fn errors() {
        let th = folder();
        assert!(matches!(parse_strategy("bogus(chain(all))", &th, false), Err(StrategyError::UnknownCombinator(_))));
        assert!(matches!(parse_strategy("chain(nope)", &th, false), Err(StrategyError::UnknownRule(_))));
        assert!(matches!(parse_strategy("chain(all", &th, false), Err(StrategyError::Syntax { .. })));
        assert!(matches!(parse_strategy("chain(all) x", &th, false), Err(StrategyError::Syntax { offset: 11, .. })));
    }
}
