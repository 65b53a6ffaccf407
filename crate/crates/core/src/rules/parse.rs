//! Rule-file parser.
//!
//! A rule is `<lhs> <op> <rhs>` on one line, where `op` is one of `-->`,
//! `=>`, `==`, `!=` and both sides are S-expressions. Variables are written
//! `~x` (or bare, after `@vars x`), segments `~~x` or `x...`, and a
//! predicate is attached with `~x::number` or `~x::near_zero(1e-13)`.

use std::collections::HashSet;

use crate::rules::{PatOp, PatVar, Pattern, PredicateRegistry, Rule, RuleError, RuleKind, Theory};
use crate::sexp::{Reader, Sexp, SyntaxError};
use crate::symbol::Symbol;
use crate::term::{is_symbol, parse_number, Literal};

pub fn parse_rule(line: &str, declared: &HashSet<Symbol>) -> Result<Rule, RuleError> {
    parse_rule_with(line, declared, PredicateRegistry::builtin())
}

pub fn parse_rule_with(line: &str, declared: &HashSet<Symbol>, registry: &PredicateRegistry) -> Result<Rule, RuleError> {
    let (at, kind) = find_operator(line)?;
    let ctx = Ctx { declared, registry };
    let lhs_src = &line[..at];
    let rhs_at = at + kind.token().len();
    let lhs = Reader::new(lhs_src).with_pred_params().read_only()?;
    let rhs = Reader::new(&line[rhs_at..])
        .with_base(rhs_at)
        .with_pred_params()
        .read_only()?;
    let lhs = ctx.pattern(&lhs, false)?;
    let rhs = ctx.pattern(&rhs, false)?;
    Rule::new(kind, lhs, rhs, "")
}

pub fn parse_theory(name: &str, text: &str) -> Result<Theory, RuleError> {
    parse_theory_with(name, text, PredicateRegistry::builtin())
}

pub fn parse_theory_with(name: &str, text: &str, registry: &PredicateRegistry) -> Result<Theory, RuleError> {
    let mut theory = Theory::new(name);
    let mut declared = HashSet::new();
    let mut pending_name: Option<(usize, String)> = None;
    let at_line = |line: usize, e: RuleError| RuleError::AtLine {
        line,
        source: Box::new(e),
    };
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("");
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('@') {
            let mut words = rest.split_whitespace();
            match words.next() {
                Some("vars") => {
                    let mut vars = HashSet::new();
                    for w in words {
                        if !is_symbol(w) || w.starts_with('~') {
                            return Err(at_line(line_no, RuleError::RuleSyntax(format!("invalid variable name `{w}`"))));
                        }
                        vars.insert(Symbol::new(w));
                    }
                    declared = vars;
                }
                Some("name") => {
                    let n: Vec<&str> = words.collect();
                    if n.len() != 1 {
                        return Err(at_line(line_no, RuleError::RuleSyntax("`@name` takes exactly one word".into())));
                    }
                    pending_name = Some((line_no, n[0].to_owned()));
                }
                other => {
                    let msg = format!("unknown directive `@{}`", other.unwrap_or(""));
                    return Err(at_line(line_no, RuleError::RuleSyntax(msg)));
                }
            }
            continue;
        }
        let rule = parse_rule_with(line, &declared, registry).map_err(|e| at_line(line_no, e))?;
        theory
            .push(rule, pending_name.take().map(|(_, n)| n))
            .map_err(|e| at_line(line_no, e))?;
    }
    if let Some((line, _)) = pending_name {
        return Err(at_line(line, RuleError::RuleSyntax("`@name` is not followed by a rule".into())));
    }
    Ok(theory)
}

/// Byte offset and kind of the single top-level rule operator.
fn find_operator(line: &str) -> Result<(usize, RuleKind), RuleError> {
    let bytes = line.as_bytes();
    let mut depth = 0i32;
    let mut found = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => {
                depth += 1;
                i += 1;
            }
            b')' => {
                depth -= 1;
                i += 1;
            }
            c if c.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'(' && bytes[i] != b')' {
                    i += 1;
                }
                if depth == 0 {
                    if let Some(kind) = RuleKind::from_token(&line[start..i]) {
                        found.push((start, kind));
                    }
                }
            }
        }
    }
    match found.as_slice() {
        [one] => Ok(*one),
        [] => Err(RuleError::RuleSyntax(
            "expected one of `-->`, `=>`, `==`, `!=` between the two sides".into(),
        )),
        [_, (at, _), ..] => Err(SyntaxError::new(*at, "more than one rule operator at top level").into()),
    }
}

struct Ctx<'a> {
    declared: &'a HashSet<Symbol>,
    registry: &'a PredicateRegistry,
}

enum AtomKind {
    Var(PatVar),
    Segment(PatVar),
    Lit(Literal),
}

impl Ctx<'_> {
    fn pattern(&self, s: &Sexp, in_args: bool) -> Result<Pattern, RuleError> {
        match s {
            Sexp::Atom { text, offset } => match self.atom(text, *offset)? {
                AtomKind::Var(v) => Ok(Pattern::Var(v)),
                AtomKind::Segment(v) if in_args => Ok(Pattern::Segment(v)),
                AtomKind::Segment(_) => {
                    Err(SyntaxError::new(*offset, "segment variables may only appear as arguments").into())
                }
                AtomKind::Lit(l) => Ok(Pattern::Lit(l)),
            },
            Sexp::List { items, offset } => {
                let (head, rest) = items
                    .split_first()
                    .ok_or_else(|| SyntaxError::new(*offset, "empty compound `()`"))?;
                let op = match head {
                    Sexp::Atom { text, offset } => match self.atom(text, *offset)? {
                        AtomKind::Var(v) => PatOp::Var(v),
                        AtomKind::Lit(Literal::Sym(s)) => PatOp::Sym(s),
                        _ => return Err(SyntaxError::new(*offset, format!("invalid operation `{text}`")).into()),
                    },
                    Sexp::List { offset, .. } => {
                        return Err(SyntaxError::new(*offset, "operation position must hold a symbol or variable").into())
                    }
                };
                let args = rest.iter().map(|a| self.pattern(a, true)).collect::<Result<_, _>>()?;
                Ok(Pattern::Term(op, args))
            }
        }
    }

    fn atom(&self, text: &str, offset: usize) -> Result<AtomKind, RuleError> {
        let (core, pred) = match text.find("::") {
            Some(i) => (&text[..i], Some(&text[i + 2..])),
            None => (text, None),
        };
        let var = |name: &str| -> Result<PatVar, RuleError> {
            if !is_symbol(name) || name.starts_with('~') {
                return Err(SyntaxError::new(offset, format!("invalid variable name in `{text}`")).into());
            }
            let mut v = PatVar::new(name);
            if let Some(p) = pred {
                v.predicate = Some(self.predicate(p, offset)?);
            }
            Ok(v)
        };
        if let Some(rest) = core.strip_prefix("~~") {
            return Ok(AtomKind::Segment(var(rest)?));
        }
        if let Some(rest) = core.strip_prefix('~') {
            return Ok(match rest.strip_suffix("...") {
                Some(n) => AtomKind::Segment(var(n)?),
                None => AtomKind::Var(var(rest)?),
            });
        }
        if let Some(n) = core.strip_suffix("...") {
            if self.declared.contains(&Symbol::new(n)) {
                return Ok(AtomKind::Segment(var(n)?));
            }
        }
        if is_symbol(core) && self.declared.contains(&Symbol::new(core)) {
            return Ok(AtomKind::Var(var(core)?));
        }
        if pred.is_some() {
            return Err(SyntaxError::new(offset, format!("predicate attached to non-variable `{core}`")).into());
        }
        if let Some(n) = parse_number(core, offset)? {
            return Ok(AtomKind::Lit(Literal::Num(n)));
        }
        if is_symbol(core) {
            return Ok(AtomKind::Lit(Literal::Sym(Symbol::new(core))));
        }
        Err(SyntaxError::new(offset, format!("invalid atom `{text}`")).into())
    }

    fn predicate(&self, spec: &str, offset: usize) -> Result<crate::rules::PredicateRef, RuleError> {
        let (name, params) = match spec.find('(') {
            Some(i) => {
                let inner = spec[i + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| SyntaxError::new(offset, format!("malformed predicate `{spec}`")))?;
                let mut params = Vec::new();
                for p in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                    let n = parse_number(p, offset)?
                        .ok_or_else(|| SyntaxError::new(offset, format!("predicate parameter `{p}` is not a number")))?;
                    params.push(n);
                }
                (&spec[..i], params)
            }
            None => (spec, Vec::new()),
        };
        self.registry.resolve(name, params)
    }
}
