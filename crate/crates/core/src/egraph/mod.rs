//! E-graphs: a union-find over e-class ids, a hash-cons from canonical
//! e-nodes to classes, and per-class parent lists used to restore
//! congruence during [`EGraph::rebuild`].

mod dump;

use std::any::Any;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;
use thiserror::Error;

use crate::analysis::Erased;
use crate::symbol::Symbol;
use crate::term::{Literal, Term};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Id(u32);

impl Id {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for Id {
    fn from(i: usize) -> Self {
        Id(i as u32)
    }
}

impl fmt::Display for Id {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

impl fmt::Debug for Id {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ENode {
    Lit(Literal),
    Op(Symbol, Vec<Id>),
}

impl ENode {
    pub fn op(op: &str, children: Vec<Id>) -> ENode {
        ENode::Op(Symbol::new(op), children)
    }

    pub fn children(&self) -> &[Id] {
        match self {
            ENode::Lit(_) => &[],
            ENode::Op(_, c) => c,
        }
    }

    pub fn arity(&self) -> usize {
        self.children().len()
    }

    pub fn operation(&self) -> Option<Symbol> {
        match self {
            ENode::Op(op, _) => Some(*op),
            ENode::Lit(_) => None,
        }
    }

    fn map_children(&self, f: impl Fn(Id) -> Id) -> ENode {
        match self {
            ENode::Lit(l) => ENode::Lit(*l),
            ENode::Op(op, c) => ENode::Op(*op, c.iter().map(|&i| f(i)).collect()),
        }
    }
}

impl fmt::Display for ENode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ENode::Lit(l) => write!(f, "{l}"),
            ENode::Op(op, c) => {
                write!(f, "({op}")?;
                for id in c {
                    write!(f, " {id}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for ENode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EGraphError {
    #[error("unknown e-class id {0}")]
    UnknownId(Id),
    #[error("e-node limit of {0} reached")]
    CapacityExceeded(usize),
}

pub(crate) type DataBox = Arc<dyn Any + Send + Sync>;

#[derive(Clone)]
pub struct EClass {
    id: Id,
    /// Kept sorted by insertion order (`stamps`).
    nodes: Vec<ENode>,
    stamps: Vec<u64>,
    parents: Vec<(ENode, Id)>,
    data: Vec<Option<DataBox>>,
}

impl EClass {
    pub fn id(&self) -> Id {
        self.id
    }

    /// Nodes in the order they were first added to the graph.
    pub fn nodes(&self) -> &[ENode] {
        &self.nodes
    }

    /// Global insertion stamp of each node, parallel to [`EClass::nodes`].
    pub fn stamps(&self) -> &[u64] {
        &self.stamps
    }

    pub fn parents(&self) -> &[(ENode, Id)] {
        &self.parents
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            ENode::Lit(l) => Some(*l),
            _ => None,
        })
    }
}

#[derive(Clone)]
pub struct EGraph {
    parents: Vec<Id>,
    memo: HashMap<ENode, Id>,
    classes: Vec<Option<EClass>>,
    pending: Vec<Id>,
    analysis_pending: VecDeque<(ENode, Id)>,
    analyses: Vec<Arc<dyn Erased>>,
    node_count: usize,
    next_stamp: u64,
    enode_limit: Option<usize>,
    version: u64,
    root: Option<Id>,
}

impl Default for EGraph {
    fn default() -> Self {
        Self::new()
    }
}

impl EGraph {
    pub fn new() -> Self {
        EGraph {
            parents: Vec::new(),
            memo: HashMap::new(),
            classes: Vec::new(),
            pending: Vec::new(),
            analysis_pending: VecDeque::new(),
            analyses: Vec::new(),
            node_count: 0,
            next_stamp: 0,
            enode_limit: None,
            version: 0,
            root: None,
        }
    }

    /// A graph holding `t`, with `t`'s class as the root.
    pub fn from_term(t: &Term) -> Result<Self, EGraphError> {
        let mut g = Self::new();
        let id = g.add_term(t)?;
        g.root = Some(id);
        Ok(g)
    }

    pub fn root(&self) -> Option<Id> {
        self.root.map(|r| self.find(r))
    }

    pub fn set_root(&mut self, id: Id) {
        self.root = Some(id);
    }

    /// Adding a node that would push the node count past `limit` fails with
    /// [`EGraphError::CapacityExceeded`].
    pub fn set_enode_limit(&mut self, limit: Option<usize>) {
        self.enode_limit = limit;
    }

    pub fn enode_limit(&self) -> Option<usize> {
        self.enode_limit
    }

    /// Bumped on every new node and every successful union.
    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn n_ids(&self) -> usize {
        self.parents.len()
    }

    pub fn n_classes(&self) -> usize {
        self.classes.iter().filter(|c| c.is_some()).count()
    }

    /// Total nodes over all canonical classes.
    pub fn n_enodes(&self) -> usize {
        self.node_count
    }

    pub fn is_clean(&self) -> bool {
        self.pending.is_empty() && self.analysis_pending.is_empty()
    }

    pub fn find(&self, mut id: Id) -> Id {
        while self.parents[id.index()] != id {
            id = self.parents[id.index()];
        }
        id
    }

    pub fn try_find(&self, id: Id) -> Result<Id, EGraphError> {
        if id.index() < self.parents.len() {
            Ok(self.find(id))
        } else {
            Err(EGraphError::UnknownId(id))
        }
    }

    fn find_mut(&mut self, id: Id) -> Id {
        let root = self.find(id);
        let mut cur = id;
        while cur != root {
            let next = self.parents[cur.index()];
            self.parents[cur.index()] = root;
            cur = next;
        }
        root
    }

    pub fn canonicalize(&self, n: &ENode) -> ENode {
        n.map_children(|c| self.find(c))
    }

    /// The class with canonical id `find(id)`.
    pub fn class(&self, id: Id) -> &EClass {
        let id = self.find(id);
        self.classes[id.index()].as_ref().expect("canonical class exists")
    }

    fn class_mut(&mut self, id: Id) -> &mut EClass {
        let id = self.find(id);
        self.classes[id.index()].as_mut().expect("canonical class exists")
    }

    /// Canonical classes in id order.
    pub fn classes(&self) -> impl Iterator<Item = &EClass> {
        self.classes.iter().flatten()
    }

    pub fn class_ids(&self) -> Vec<Id> {
        self.classes().map(|c| c.id).collect()
    }

    pub fn lookup(&self, n: &ENode) -> Option<Id> {
        if n.children().iter().any(|c| c.index() >= self.parents.len()) {
            return None;
        }
        self.memo.get(&self.canonicalize(n)).map(|&id| self.find(id))
    }

    pub fn lookup_term(&self, t: &Term) -> Option<Id> {
        let node = match t {
            Term::Compound(op, args) => {
                let children = args.iter().map(|a| self.lookup_term(a)).collect::<Option<Vec<_>>>()?;
                ENode::Op(*op, children)
            }
            _ => ENode::Lit(t.as_literal().unwrap()),
        };
        self.lookup(&node)
    }

    pub fn add_term(&mut self, t: &Term) -> Result<Id, EGraphError> {
        let node = match t {
            Term::Compound(op, args) => {
                let children = args.iter().map(|a| self.add_term(a)).collect::<Result<Vec<_>, _>>()?;
                ENode::Op(*op, children)
            }
            _ => ENode::Lit(t.as_literal().unwrap()),
        };
        self.add_enode(node)
    }

    pub fn add_enode(&mut self, n: ENode) -> Result<Id, EGraphError> {
        for &c in n.children() {
            self.try_find(c)?;
        }
        let n = self.canonicalize(&n);
        if let Some(&id) = self.memo.get(&n) {
            return Ok(self.find(id));
        }
        if let Some(limit) = self.enode_limit {
            if self.node_count >= limit {
                return Err(EGraphError::CapacityExceeded(limit));
            }
        }
        let id = Id::from(self.parents.len());
        self.parents.push(id);
        for &c in n.children() {
            self.class_mut(c).parents.push((n.clone(), id));
        }
        let data = (0..self.analyses.len())
            .map(|slot| {
                let a = self.analyses[slot].clone();
                a.make_box(self, slot, &n)
            })
            .collect();
        let stamp = self.next_stamp;
        self.next_stamp += 1;
        self.classes.push(Some(EClass {
            id,
            nodes: vec![n.clone()],
            stamps: vec![stamp],
            parents: Vec::new(),
            data,
        }));
        self.memo.insert(n, id);
        self.node_count += 1;
        self.version += 1;
        self.run_modify(id);
        Ok(id)
    }

    /// Unions two classes and returns the surviving canonical id. The
    /// congruence invariant is restored lazily by [`EGraph::rebuild`].
    pub fn merge(&mut self, a: Id, b: Id) -> Result<Id, EGraphError> {
        let (a, b) = (self.try_find(a)?, self.try_find(b)?);
        if a == b {
            return Ok(a);
        }
        let (pa, pb) = (self.class(a).parents.len(), self.class(b).parents.len());
        let (keep, gone) = if pa > pb || (pa == pb && a < b) { (a, b) } else { (b, a) };
        self.parents[gone.index()] = keep;
        self.version += 1;
        let other = self.classes[gone.index()].take().expect("canonical class exists");
        let analyses = self.analyses.clone();
        let class = self.classes[keep.index()].as_mut().expect("canonical class exists");
        for (slot, a) in analyses.iter().enumerate() {
            let (mine, theirs) = (class.data[slot].clone(), other.data[slot].clone());
            let joined = match (&mine, &theirs) {
                (Some(x), Some(y)) => Some(a.join_box(x, y)),
                (x, y) => x.clone().or_else(|| y.clone()),
            };
            if !a.same(&joined, &mine) {
                self.analysis_pending.extend(class.parents.iter().cloned());
            }
            if !a.same(&joined, &theirs) {
                self.analysis_pending.extend(other.parents.iter().cloned());
            }
            class.data[slot] = joined;
        }
        let (nodes, stamps) = merge_sorted(
            std::mem::take(&mut class.nodes),
            std::mem::take(&mut class.stamps),
            other.nodes,
            other.stamps,
        );
        class.nodes = nodes;
        class.stamps = stamps;
        class.parents.extend(other.parents);
        self.pending.push(keep);
        self.run_modify(keep);
        Ok(self.find(keep))
    }

    /// Restores the congruence and hash-cons invariants and propagates
    /// analysis data to a fixed point.
    pub fn rebuild(&mut self) {
        while !self.is_clean() {
            let mut seen = HashSet::new();
            let todo: Vec<Id> = std::mem::take(&mut self.pending)
                .into_iter()
                .map(|id| self.find_mut(id))
                .filter(|id| seen.insert(*id))
                .collect();
            for id in todo {
                self.repair(id);
            }
            while let Some((node, id)) = self.analysis_pending.pop_front() {
                self.repair_data(&node, id);
            }
        }
        self.normalize_classes();
    }

    fn repair(&mut self, id: Id) {
        let id = self.find(id);
        let parents = std::mem::take(&mut self.class_mut(id).parents);
        for (n, _) in &parents {
            self.memo.remove(n);
        }
        let mut deduped: IndexMap<ENode, Id> = IndexMap::new();
        for (n, e) in parents {
            let n = self.canonicalize(&n);
            let mut target = self.find(e);
            if let Some(&old) = deduped.get(&n) {
                target = self.merge(old, target).expect("ids are valid");
            }
            if let Some(&m) = self.memo.get(&n) {
                target = self.merge(m, target).expect("ids are valid");
            }
            self.memo.insert(n.clone(), target);
            deduped.insert(n, target);
        }
        let id = self.find(id);
        let class = self.class_mut(id);
        class.parents.extend(deduped);
    }

    fn repair_data(&mut self, node: &ENode, id: Id) {
        let id = self.find_mut(id);
        let node = self.canonicalize(node);
        let mut changed = false;
        for slot in 0..self.analyses.len() {
            let a = self.analyses[slot].clone();
            let Some(new) = a.make_box(self, slot, &node) else { continue };
            let class = self.class_mut(id);
            let old = class.data[slot].clone();
            let joined = match &old {
                Some(o) => a.join_box(o, &new),
                None => new,
            };
            if !a.same(&Some(joined.clone()), &old) {
                class.data[slot] = Some(joined);
                let parents = class.parents.clone();
                self.analysis_pending.extend(parents);
                changed = true;
            }
        }
        if changed {
            self.run_modify(id);
        }
    }

    /// Canonicalizes and deduplicates the nodes of every class.
    fn normalize_classes(&mut self) {
        let mut count = 0;
        for i in 0..self.classes.len() {
            let Some(mut class) = self.classes[i].take() else { continue };
            let mut best: HashMap<ENode, u64> = HashMap::with_capacity(class.nodes.len());
            for (n, s) in class.nodes.drain(..).zip(class.stamps.drain(..)) {
                let n = self.canonicalize(&n);
                best.entry(n).and_modify(|old| *old = (*old).min(s)).or_insert(s);
            }
            let mut pairs: Vec<(u64, ENode)> = best.into_iter().map(|(n, s)| (s, n)).collect();
            pairs.sort_by_key(|(s, _)| *s);
            for (s, n) in pairs {
                class.nodes.push(n);
                class.stamps.push(s);
            }
            count += class.nodes.len();
            self.classes[i] = Some(class);
        }
        self.node_count = count;
    }

    fn run_modify(&mut self, id: Id) {
        for slot in 0..self.analyses.len() {
            let a = self.analyses[slot].clone();
            a.modify_box(self, slot, id);
        }
    }

    /// Attaches an analysis, replacing one with the same name, and returns
    /// its slot. Class data for a new slot starts empty.
    pub(crate) fn install(&mut self, a: Arc<dyn Erased>) -> usize {
        if let Some(slot) = self.analysis_slot(a.name()) {
            self.analyses[slot] = a;
            return slot;
        }
        self.analyses.push(a);
        for c in self.classes.iter_mut().flatten() {
            c.data.push(None);
        }
        self.analyses.len() - 1
    }

    pub(crate) fn analysis_slot(&self, name: &str) -> Option<usize> {
        self.analyses.iter().position(|a| a.name() == name)
    }

    pub(crate) fn set_data(&mut self, slot: usize, id: Id, data: Option<DataBox>) {
        self.class_mut(id).data[slot] = data;
    }

    pub(crate) fn data_box(&self, slot: usize, id: Id) -> Option<&DataBox> {
        self.class(id).data.get(slot)?.as_ref()
    }

    pub fn has_analysis(&self, name: &str) -> bool {
        self.analysis_slot(name).is_some()
    }

    /// Data of the registered analysis `name` for the class of `id`.
    pub fn get_data<D: 'static>(&self, name: &str, id: Id) -> Option<&D> {
        let slot = self.analysis_slot(name)?;
        self.data_box(slot, id)?.downcast_ref::<D>()
    }

    /// Rendered data of every registered analysis for a class.
    pub fn render_data(&self, id: Id) -> Vec<(String, String)> {
        self.analyses
            .iter()
            .enumerate()
            .filter_map(|(slot, a)| {
                let d = self.data_box(slot, id)?;
                Some((a.name().to_owned(), a.render_box(d)))
            })
            .collect()
    }

    /// Checks the congruence and hash-cons invariants; meant for tests.
    pub fn check_invariants(&self) -> Result<(), String> {
        if !self.is_clean() {
            return Err("graph has pending repairs".into());
        }
        let mut owner: HashMap<ENode, Id> = HashMap::new();
        let mut count = 0;
        for c in self.classes() {
            if c.nodes.is_empty() {
                return Err(format!("{} is empty", c.id));
            }
            if self.find(c.id) != c.id {
                return Err(format!("{} is stored but not canonical", c.id));
            }
            for n in &c.nodes {
                count += 1;
                if *n != self.canonicalize(n) {
                    return Err(format!("{n} in {} is not canonical", c.id));
                }
                if let Some(other) = owner.insert(n.clone(), c.id) {
                    return Err(format!("{n} is in both {other} and {}", c.id));
                }
                match self.memo.get(n) {
                    Some(&m) if self.find(m) == c.id => {}
                    other => return Err(format!("memo maps {n} to {other:?}, expected {}", c.id)),
                }
            }
        }
        if count != self.node_count {
            return Err(format!("node count {} but {count} nodes stored", self.node_count));
        }
        Ok(())
    }
}

fn merge_sorted(an: Vec<ENode>, as_: Vec<u64>, bn: Vec<ENode>, bs: Vec<u64>) -> (Vec<ENode>, Vec<u64>) {
    let mut nodes = Vec::with_capacity(an.len() + bn.len());
    let mut stamps = Vec::with_capacity(an.len() + bn.len());
    let mut a = an.into_iter().zip(as_).peekable();
    let mut b = bn.into_iter().zip(bs).peekable();
    loop {
        let take_a = match (a.peek(), b.peek()) {
            (Some((_, x)), Some((_, y))) => x <= y,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => break,
        };
        let (n, s) = if take_a { a.next() } else { b.next() }.unwrap();
        nodes.push(n);
        stamps.push(s);
    }
    (nodes, stamps)
}
