//! E-matching: patterns compile to a short instruction list run by a
//! backtracking machine whose registers hold e-class ids.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::egraph::{EGraph, ENode, Id};
use crate::rules::{PatOp, Pattern, PredicateRef};
use crate::symbol::Symbol;
use crate::term::{Literal, Number, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EMatchError {
    #[error("segment variables are not supported in e-graph mode")]
    SegmentUnsupported,
    #[error("variable `{0}` is used both as an operation and as an argument")]
    OpVarConflict(String),
    #[error("class {0} holds several distinct literals")]
    InconsistentClass(Id),
}

#[derive(Clone, PartialEq)]
pub enum Instruction {
    /// For each node `(op c1 .. cn)` in the class at `reg`, load the children
    /// into `out..out+n` and continue.
    Bind { reg: usize, op: Symbol, arity: usize, out: usize },
    /// Like `Bind`, for any operation; the operation is bound to variable `var`.
    BindOpVar { reg: usize, var: usize, arity: usize, out: usize },
    CheckLit { reg: usize, value: Literal },
    CheckPredicate { reg: usize, var: usize, pred: PredicateRef, bindlit: bool },
    Compare { a: usize, b: usize },
    /// The class at `reg` must be the pre-resolved class of ground term `ground`.
    LookupGround { reg: usize, ground: usize },
    /// Emit a match; `regs[i]` is the register of variable `i` (`None` for
    /// operation variables).
    Yield { regs: Vec<Option<usize>> },
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::Bind { reg, op, arity, out } => write!(f, "BIND r{reg} {op} /{arity} -> r{out}"),
            Instruction::BindOpVar { reg, var, arity, out } => write!(f, "BINDOP r{reg} v{var} /{arity} -> r{out}"),
            Instruction::CheckLit { reg, value } => write!(f, "CHECKLIT r{reg} {value}"),
            Instruction::CheckPredicate { reg, var, pred, bindlit } => {
                write!(f, "CHECKPRED r{reg} {pred} v{var}")?;
                if *bindlit {
                    f.write_str(" bindlit")?;
                }
                Ok(())
            }
            Instruction::Compare { a, b } => write!(f, "COMPARE r{a} r{b}"),
            Instruction::LookupGround { reg, ground } => write!(f, "LOOKUP r{reg} g{ground}"),
            Instruction::Yield { regs } => {
                f.write_str("YIELD")?;
                for r in regs {
                    match r {
                        Some(r) => write!(f, " r{r}")?,
                        None => f.write_str(" -")?,
                    }
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EMatchProgram {
    pub instructions: Vec<Instruction>,
    pub n_regs: usize,
    pub ground_terms: Vec<Term>,
    pub n_vars: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EMatch {
    /// The class the pattern root matched.
    pub class: Id,
    /// Class bound to each variable index.
    pub bindings: Vec<Option<Id>>,
    /// Literal lifted by a literal-type predicate, or the symbol bound to an
    /// operation variable.
    pub literals: Vec<Option<Literal>>,
}

#[derive(Clone, Copy, PartialEq)]
enum VarSlot {
    Unseen,
    Reg(usize),
    Op,
}

struct Compiler {
    code: Vec<Instruction>,
    n_regs: usize,
    grounds: Vec<Term>,
    vars: Vec<VarSlot>,
    names: Vec<Symbol>,
}

impl Compiler {
    fn var_slot(&mut self, index: usize, name: Symbol) -> &mut VarSlot {
        if self.vars.len() <= index {
            self.vars.resize(index + 1, VarSlot::Unseen);
            self.names.resize(index + 1, name);
        }
        self.names[index] = name;
        &mut self.vars[index]
    }

    fn compile(&mut self, p: &Pattern, reg: usize) -> Result<(), EMatchError> {
        match p {
            Pattern::Segment(_) => return Err(EMatchError::SegmentUnsupported),
            Pattern::Var(v) => match *self.var_slot(v.index, v.name) {
                VarSlot::Reg(first) => self.code.push(Instruction::Compare { a: first, b: reg }),
                VarSlot::Op => return Err(EMatchError::OpVarConflict(v.name.to_string())),
                VarSlot::Unseen => {
                    self.vars[v.index] = VarSlot::Reg(reg);
                    if let Some(pred) = &v.predicate {
                        self.code.push(Instruction::CheckPredicate {
                            reg,
                            var: v.index,
                            pred: pred.clone(),
                            bindlit: pred.lifts_literal(),
                        });
                    }
                }
            },
            Pattern::Lit(l) => self.code.push(Instruction::CheckLit { reg, value: *l }),
            Pattern::Term(..) if p.is_ground() => {
                self.grounds.push(p.to_ground_term().expect("ground pattern"));
                self.code.push(Instruction::LookupGround {
                    reg,
                    ground: self.grounds.len() - 1,
                });
            }
            Pattern::Term(op, args) => {
                let out = self.n_regs;
                self.n_regs += args.len();
                let arity = args.len();
                match op {
                    PatOp::Sym(op) => self.code.push(Instruction::Bind { reg, op: *op, arity, out }),
                    PatOp::Var(v) => {
                        match *self.var_slot(v.index, v.name) {
                            VarSlot::Reg(_) => return Err(EMatchError::OpVarConflict(v.name.to_string())),
                            _ => self.vars[v.index] = VarSlot::Op,
                        }
                        self.code.push(Instruction::BindOpVar {
                            reg,
                            var: v.index,
                            arity,
                            out,
                        });
                    }
                }
                for (i, a) in args.iter().enumerate() {
                    self.compile(a, out + i)?;
                }
            }
        }
        Ok(())
    }
}

impl EMatchProgram {
    pub fn compile(p: &Pattern) -> Result<EMatchProgram, EMatchError> {
        let mut c = Compiler {
            code: Vec::new(),
            n_regs: 1,
            grounds: Vec::new(),
            vars: Vec::new(),
            names: Vec::new(),
        };
        c.compile(p, 0)?;
        let regs = c
            .vars
            .iter()
            .map(|v| match v {
                VarSlot::Reg(r) => Some(*r),
                _ => None,
            })
            .collect();
        c.code.push(Instruction::Yield { regs });
        Ok(EMatchProgram {
            instructions: c.code,
            n_regs: c.n_regs,
            ground_terms: c.grounds,
            n_vars: c.vars.len(),
        })
    }

    /// One instruction per line, ground terms listed first as `g<i> = term`.
    pub fn disassemble(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.ground_terms.iter().enumerate() {
            out.push_str(&format!("g{i} = {t}\n"));
        }
        for ins in &self.instructions {
            out.push_str(&ins.to_string());
            out.push('\n');
        }
        out
    }

    /// Classes of the ground subterms, or `None` if one is absent.
    pub fn resolve_grounds(&self, g: &EGraph) -> Option<Vec<Id>> {
        self.ground_terms.iter().map(|t| g.lookup_term(t)).collect()
    }

    /// Matches rooted at one class.
    pub fn run(&self, g: &EGraph, grounds: &[Id], root: Id) -> Result<Vec<EMatch>, EMatchError> {
        let mut m = Machine {
            g,
            prog: self,
            grounds,
            root: g.find(root),
            regs: vec![root; self.n_regs],
            lits: vec![None; self.n_vars],
            out: Vec::new(),
            err: None,
        };
        m.regs[0] = m.root;
        m.exec(0);
        match m.err {
            Some(e) => Err(e),
            None => Ok(m.out),
        }
    }
}

struct Machine<'a> {
    g: &'a EGraph,
    prog: &'a EMatchProgram,
    grounds: &'a [Id],
    root: Id,
    regs: Vec<Id>,
    lits: Vec<Option<Literal>>,
    out: Vec<EMatch>,
    err: Option<EMatchError>,
}

impl Machine<'_> {
    fn exec(&mut self, pc: usize) {
        if self.err.is_some() {
            return;
        }
        let g = self.g;
        match &self.prog.instructions[pc] {
            Instruction::Bind { reg, op, arity, out } => {
                for n in g.class(self.regs[*reg]).nodes() {
                    if let ENode::Op(o, ch) = n {
                        if o == op && ch.len() == *arity {
                            for (i, c) in ch.iter().enumerate() {
                                self.regs[out + i] = g.find(*c);
                            }
                            self.exec(pc + 1);
                        }
                    }
                }
            }
            Instruction::BindOpVar { reg, var, arity, out } => {
                let prev = self.lits[*var];
                for n in g.class(self.regs[*reg]).nodes() {
                    if let ENode::Op(o, ch) = n {
                        if ch.len() != *arity || prev.is_some_and(|p| p != Literal::Sym(*o)) {
                            continue;
                        }
                        for (i, c) in ch.iter().enumerate() {
                            self.regs[out + i] = g.find(*c);
                        }
                        self.lits[*var] = Some(Literal::Sym(*o));
                        self.exec(pc + 1);
                        self.lits[*var] = prev;
                    }
                }
            }
            Instruction::CheckLit { reg, value } => {
                if g.class(self.regs[*reg]).literals().any(|l| l == *value) {
                    self.exec(pc + 1);
                }
            }
            Instruction::CheckPredicate { reg, var, pred, bindlit } => {
                let id = self.regs[*reg];
                if !pred.check_class(g, id) {
                    return;
                }
                if !*bindlit {
                    return self.exec(pc + 1);
                }
                let mut found: Option<Number> = None;
                for l in g.class(id).literals() {
                    let Literal::Num(n) = l else { continue };
                    if !pred.check_literal(n) {
                        continue;
                    }
                    match found {
                        Some(prev) if prev != n => {
                            self.err = Some(EMatchError::InconsistentClass(g.find(id)));
                            return;
                        }
                        _ => found = Some(n),
                    }
                }
                let Some(n) = found else { return };
                self.lits[*var] = Some(Literal::Num(n));
                self.exec(pc + 1);
                self.lits[*var] = None;
            }
            Instruction::Compare { a, b } => {
                if self.regs[*a] == self.regs[*b] {
                    self.exec(pc + 1);
                }
            }
            Instruction::LookupGround { reg, ground } => {
                if self.grounds[*ground] == self.regs[*reg] {
                    self.exec(pc + 1);
                }
            }
            Instruction::Yield { regs } => {
                let mut bindings = vec![None; self.prog.n_vars];
                for (i, r) in regs.iter().enumerate() {
                    bindings[i] = r.map(|r| self.regs[r]);
                }
                self.out.push(EMatch {
                    class: self.root,
                    bindings,
                    literals: self.lits.clone(),
                });
            }
        }
    }
}

/// All matches of a compiled program, over canonical classes in id order,
/// without duplicates. With `threaded`, classes are searched in parallel
/// batches and the results concatenated in class order.
pub fn ematch_program(g: &EGraph, prog: &EMatchProgram, threaded: bool) -> Result<Vec<EMatch>, EMatchError> {
    let Some(grounds) = prog.resolve_grounds(g) else {
        return Ok(Vec::new());
    };
    let ids = g.class_ids();
    let per_class: Vec<Vec<EMatch>> = if threaded {
        ids.par_chunks(64)
            .map(|chunk| -> Result<Vec<EMatch>, EMatchError> {
                let mut out = Vec::new();
                for &id in chunk {
                    out.extend(prog.run(g, &grounds, id)?);
                }
                Ok(out)
            })
            .collect::<Result<_, _>>()?
    } else {
        ids.iter().map(|&id| prog.run(g, &grounds, id)).collect::<Result<_, _>>()?
    };
    let mut seen = HashSet::new();
    Ok(per_class.into_iter().flatten().filter(|m| seen.insert(m.clone())).collect())
}

pub fn ematch(g: &EGraph, p: &Pattern) -> Result<Vec<EMatch>, EMatchError> {
    ematch_program(g, &EMatchProgram::compile(p)?, false)
}
