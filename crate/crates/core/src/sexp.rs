//! Minimal S-expression reader shared by the term and rule parsers.
//!
//! The reader only splits text into atoms and parenthesized lists; deciding
//! what an atom means (number, symbol, pattern variable, ...) is left to the
//! caller.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: {message}")]
pub struct SyntaxError {
    pub offset: usize,
    pub message: String,
}

impl SyntaxError {
    pub(crate) fn new(offset: usize, message: impl Into<String>) -> Self {
        SyntaxError {
            offset,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Sexp {
    Atom { text: String, offset: usize },
    List { items: Vec<Sexp>, offset: usize },
}

pub(crate) struct Reader<'a> {
    src: &'a str,
    pos: usize,
    base: usize,
    /// Lets `name::pred(1e-13)` lex as one atom.
    pred_params: bool,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Reader {
            src,
            pos: 0,
            base: 0,
            pred_params: false,
        }
    }

    /// Offsets reported in errors are shifted by `base`.
    pub(crate) fn with_base(mut self, base: usize) -> Self {
        self.base = base;
        self
    }

    pub(crate) fn with_pred_params(mut self) -> Self {
        self.pred_params = true;
        self
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn err(&self, at: usize, msg: impl Into<String>) -> SyntaxError {
        SyntaxError::new(self.base + at, msg)
    }

    pub(crate) fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }

    pub(crate) fn read(&mut self) -> Result<Sexp, SyntaxError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(self.err(start, "unexpected end of input")),
            Some(')') => Err(self.err(start, "unbalanced ')'")),
            Some('(') => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        None => return Err(self.err(start, "unbalanced '(': missing ')'")),
                        Some(')') => {
                            self.pos += 1;
                            break;
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
                Ok(Sexp::List {
                    items,
                    offset: self.base + start,
                })
            }
            Some(_) => {
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || c == ')' {
                        break;
                    }
                    if c == '(' {
                        let so_far = &self.src[start..self.pos];
                        if self.pred_params && so_far.contains("::") {
                            let close = self.src[self.pos..]
                                .find(')')
                                .ok_or_else(|| self.err(self.pos, "unbalanced '(' in predicate parameters"))?;
                            self.pos += close + 1;
                            continue;
                        }
                        break;
                    }
                    self.pos += c.len_utf8();
                }
                Ok(Sexp::Atom {
                    text: self.src[start..self.pos].to_owned(),
                    offset: self.base + start,
                })
            }
        }
    }

    /// Reads exactly one expression and rejects trailing input.
    pub(crate) fn read_only(mut self) -> Result<Sexp, SyntaxError> {
        let sexp = self.read()?;
        if !self.at_end() {
            return Err(self.err(self.pos, "trailing input after expression"));
        }
        Ok(sexp)
    }
}
