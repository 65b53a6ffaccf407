//! E-class analyses: a semilattice value per class, computed from its nodes
//! with `make` and combined with `join`.
//!
//! An analysis can be computed on demand into a side table
//! ([`compute_analysis`]) or attached to the graph ([`analyze`]), after
//! which every add and merge keeps it up to date.

pub mod extract;
pub mod sign;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::egraph::{DataBox, EGraph, ENode, Id};

pub use extract::{
    cost_function, extract, term_cost, AstSize, AstSizeInv, CostFunction, ExtractError, ExtractionAnalysis,
    ExtractionData, MultPenalty, COST_FUNCTIONS,
};
pub use sign::{sign_of, SignAnalysis, SignValue};

pub trait Analysis: Send + Sync {
    type Data: Clone + PartialEq + fmt::Debug + Send + Sync + 'static;

    fn name(&self) -> &str;

    /// Value of a single node. `child` gives the current value of a child
    /// class, if it has one yet; return `None` when the node cannot be
    /// evaluated yet.
    fn make(&self, g: &EGraph, n: &ENode, child: &dyn Fn(Id) -> Option<Self::Data>) -> Option<Self::Data>;

    /// Like [`Analysis::make`], also given the node's insertion stamp.
    fn make_at(
        &self,
        g: &EGraph,
        n: &ENode,
        _stamp: u64,
        child: &dyn Fn(Id) -> Option<Self::Data>,
    ) -> Option<Self::Data> {
        self.make(g, n, child)
    }

    fn join(&self, a: &Self::Data, b: &Self::Data) -> Self::Data;

    /// Called with a class's value after it changes; may add nodes or merge.
    fn modify(&self, _g: &mut EGraph, _id: Id, _data: &Self::Data) {}

    fn render(&self, d: &Self::Data) -> String {
        format!("{d:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("analysis `{name}` did not converge after {passes} passes")]
    Diverged { name: String, passes: usize },
}

/// Analysis values of canonical classes.
#[derive(Debug, Clone)]
pub struct AnalysisTable<D> {
    data: HashMap<Id, D>,
}

impl<D> AnalysisTable<D> {
    /// Value for the class of `id`.
    pub fn get(&self, g: &EGraph, id: Id) -> Option<&D> {
        self.data.get(&g.find(id))
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Id, &D)> {
        self.data.iter()
    }
}

/// Runs `make`/`join` over the graph until no class value changes. The
/// graph should be rebuilt; `modify` is not called.
pub fn analysis_fixpoint<A: Analysis>(g: &EGraph, a: &A) -> Result<AnalysisTable<A::Data>, AnalysisError> {
    let mut data: HashMap<Id, A::Data> = HashMap::new();
    let max_passes = 10 * g.n_classes().max(1);
    for _ in 0..max_passes {
        let mut changed = false;
        for c in g.classes() {
            let mut acc = data.get(&c.id()).cloned();
            for (n, &stamp) in c.nodes().iter().zip(c.stamps()) {
                let child = |id: Id| data.get(&g.find(id)).cloned();
                if let Some(d) = a.make_at(g, n, stamp, &child) {
                    acc = Some(match acc {
                        Some(x) => a.join(&x, &d),
                        None => d,
                    });
                }
            }
            if let Some(v) = acc {
                if data.get(&c.id()) != Some(&v) {
                    data.insert(c.id(), v);
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(AnalysisTable { data });
        }
    }
    Err(AnalysisError::Diverged {
        name: a.name().to_owned(),
        passes: max_passes,
    })
}

/// Like [`analysis_fixpoint`], then runs `modify` on every class and repeats
/// (after a rebuild) until `modify` leaves the graph unchanged.
pub fn compute_analysis<A: Analysis>(g: &mut EGraph, a: &A) -> Result<AnalysisTable<A::Data>, AnalysisError> {
    g.rebuild();
    let max_rounds = 10 * g.n_classes().max(1);
    for _ in 0..max_rounds {
        let version = g.version();
        let table = analysis_fixpoint(g, a)?;
        for id in g.class_ids() {
            if let Some(d) = table.get(g, id).cloned() {
                a.modify(g, id, &d);
            }
        }
        if g.version() == version {
            return Ok(table);
        }
        g.rebuild();
    }
    Err(AnalysisError::Diverged {
        name: a.name().to_owned(),
        passes: max_rounds,
    })
}

/// Computes `a` and attaches it to the graph under its name, replacing an
/// analysis of the same name. From then on the graph maintains it.
pub fn analyze<A: Analysis + 'static>(g: &mut EGraph, a: A) -> Result<(), AnalysisError> {
    let table = compute_analysis(g, &a)?;
    let slot = g.install(Arc::new(Registered(a)));
    for id in g.class_ids() {
        let d = table.get(g, id).cloned().map(|d| Arc::new(d) as DataBox);
        g.set_data(slot, id, d);
    }
    Ok(())
}

/// Type-erased view of a registered analysis.
pub(crate) trait Erased: Send + Sync {
    fn name(&self) -> &str;
    fn make_box(&self, g: &EGraph, slot: usize, n: &ENode) -> Option<DataBox>;
    fn join_box(&self, a: &DataBox, b: &DataBox) -> DataBox;
    fn same(&self, a: &Option<DataBox>, b: &Option<DataBox>) -> bool;
    fn modify_box(&self, g: &mut EGraph, slot: usize, id: Id);
    fn render_box(&self, d: &DataBox) -> String;
}

struct Registered<A>(A);

fn cast<D: 'static>(d: &DataBox) -> &D {
    d.downcast_ref::<D>().expect("analysis data has the registered type")
}

impl<A: Analysis> Erased for Registered<A> {
    fn name(&self) -> &str {
        self.0.name()
    }

    fn make_box(&self, g: &EGraph, slot: usize, n: &ENode) -> Option<DataBox> {
        let child = |id: Id| g.data_box(slot, id).map(|d| cast::<A::Data>(d).clone());
        self.0.make(g, n, &child).map(|d| Arc::new(d) as DataBox)
    }

    fn join_box(&self, a: &DataBox, b: &DataBox) -> DataBox {
        Arc::new(self.0.join(cast::<A::Data>(a), cast::<A::Data>(b)))
    }

    fn same(&self, a: &Option<DataBox>, b: &Option<DataBox>) -> bool {
        match (a, b) {
            (Some(x), Some(y)) => cast::<A::Data>(x) == cast::<A::Data>(y),
            (None, None) => true,
            _ => false,
        }
    }

    fn modify_box(&self, g: &mut EGraph, slot: usize, id: Id) {
        let Some(d) = g.data_box(slot, id).map(|d| cast::<A::Data>(d).clone()) else {
            return;
        };
        self.0.modify(g, id, &d);
    }

    fn render_box(&self, d: &DataBox) -> String {
        self.0.render(cast::<A::Data>(d))
    }
}
