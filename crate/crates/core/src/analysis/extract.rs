//! Cost-based extraction, computed as an analysis whose value per class is
//! its cheapest node.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::analysis::{analysis_fixpoint, Analysis, AnalysisError};
use crate::egraph::{EGraph, ENode, Id};
use crate::term::Term;

pub trait CostFunction: Send + Sync {
    fn name(&self) -> &str;

    /// Cost of `n` given the costs of its children, in order.
    fn cost(&self, n: &ENode, child_costs: &[f64]) -> f64;
}

/// Number of nodes in the tree.
pub struct AstSize;

impl CostFunction for AstSize {
    fn name(&self) -> &str {
        "astsize"
    }

    fn cost(&self, n: &ENode, child_costs: &[f64]) -> f64 {
        match n {
            ENode::Lit(_) => 1.0,
            ENode::Op(..) => 1.0 + child_costs.iter().sum::<f64>(),
        }
    }
}

/// Prefers larger trees: the cost is `CEILING - size`, floored at 1.
/// Cyclic classes usually make this diverge, since sizes grow without bound.
pub struct AstSizeInv;

impl AstSizeInv {
    pub const CEILING: f64 = 1e9;
}

impl CostFunction for AstSizeInv {
    fn name(&self) -> &str {
        "astsize_inv"
    }

    fn cost(&self, n: &ENode, child_costs: &[f64]) -> f64 {
        let k = Self::CEILING;
        let size = match n {
            ENode::Lit(_) => 1.0,
            ENode::Op(..) => 1.0 + child_costs.iter().map(|c| k - c).sum::<f64>(),
        };
        (k - size).max(1.0)
    }
}

/// `1 + arity + children`, with 2 extra for every multiplication.
pub struct MultPenalty;

impl CostFunction for MultPenalty {
    fn name(&self) -> &str {
        "mult_penalty"
    }

    fn cost(&self, n: &ENode, child_costs: &[f64]) -> f64 {
        match n {
            ENode::Lit(_) => 1.0,
            ENode::Op(op, children) => {
                let penalty = if op.as_str() == "*" { 2.0 } else { 0.0 };
                1.0 + children.len() as f64 + penalty + child_costs.iter().sum::<f64>()
            }
        }
    }
}

pub const COST_FUNCTIONS: [&str; 3] = ["astsize", "astsize_inv", "mult_penalty"];

pub fn cost_function(name: &str) -> Option<Box<dyn CostFunction>> {
    Some(match name {
        "astsize" => Box::new(AstSize),
        "astsize_inv" => Box::new(AstSizeInv),
        "mult_penalty" => Box::new(MultPenalty),
        _ => return None,
    })
}

/// Cost of a whole term.
pub fn term_cost(cf: &dyn CostFunction, t: &Term) -> f64 {
    match t {
        Term::Compound(op, args) => {
            let costs: Vec<f64> = args.iter().map(|a| term_cost(cf, a)).collect();
            cf.cost(&ENode::Op(*op, vec![Id::from(0); args.len()]), &costs)
        }
        _ => cf.cost(&ENode::Lit(t.as_literal().unwrap()), &[]),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtractionData {
    pub best_node: ENode,
    pub cost: f64,
    /// Insertion stamp of `best_node`; among equal costs the newest node wins.
    pub stamp: u64,
}

pub struct ExtractionAnalysis<'a> {
    pub cf: &'a dyn CostFunction,
}

impl Analysis for ExtractionAnalysis<'_> {
    type Data = ExtractionData;

    fn name(&self) -> &str {
        "extraction"
    }

    fn make(&self, g: &EGraph, n: &ENode, child: &dyn Fn(Id) -> Option<ExtractionData>) -> Option<ExtractionData> {
        self.make_at(g, n, 0, child)
    }

    fn make_at(
        &self,
        _g: &EGraph,
        n: &ENode,
        stamp: u64,
        child: &dyn Fn(Id) -> Option<ExtractionData>,
    ) -> Option<ExtractionData> {
        let costs = n.children().iter().map(|&c| child(c).map(|d| d.cost)).collect::<Option<Vec<_>>>()?;
        let cost = self.cf.cost(n, &costs);
        if cost.is_nan() || cost == f64::INFINITY {
            return None;
        }
        Some(ExtractionData {
            best_node: n.clone(),
            cost,
            stamp,
        })
    }

    fn join(&self, a: &ExtractionData, b: &ExtractionData) -> ExtractionData {
        if a.cost < b.cost || (a.cost == b.cost && a.stamp >= b.stamp) {
            a.clone()
        } else {
            b.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("no finite-cost term for class {0}")]
    Unextractable(Id),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// Cheapest term represented by the class of `root`. The graph must be
/// rebuilt.
pub fn extract(g: &EGraph, cf: &dyn CostFunction, root: Id) -> Result<Term, ExtractError> {
    let table = analysis_fixpoint(g, &ExtractionAnalysis { cf })?;
    let mut done: HashMap<Id, Term> = HashMap::new();
    let mut on_path = HashSet::new();
    build(g, &table, g.find(root), &mut done, &mut on_path)
}

fn build(
    g: &EGraph,
    table: &crate::analysis::AnalysisTable<ExtractionData>,
    id: Id,
    done: &mut HashMap<Id, Term>,
    on_path: &mut HashSet<Id>,
) -> Result<Term, ExtractError> {
    if let Some(t) = done.get(&id) {
        return Ok(t.clone());
    }
    let data = table.get(g, id).ok_or(ExtractError::Unextractable(id))?;
    if !on_path.insert(id) {
        return Err(ExtractError::Unextractable(id));
    }
    let t = match &data.best_node {
        ENode::Lit(l) => l.to_term(),
        ENode::Op(op, children) => {
            let args = children
                .iter()
                .map(|&c| build(g, table, g.find(c), done, on_path))
                .collect::<Result<Vec<_>, _>>()?;
            Term::Compound(*op, args)
        }
    };
    on_path.remove(&id);
    done.insert(id, t.clone());
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Term {
        s.parse().unwrap()
    }

    #[test]
    fn cost_functions() {
        assert_eq!(term_cost(&AstSize, &t("a")), 1.0);
        assert_eq!(term_cost(&AstSize, &t("(* a 1)")), 3.0);
        assert_eq!(term_cost(&MultPenalty, &t("7")), 1.0);
        assert_eq!(term_cost(&MultPenalty, &t("(* x 2)")), 7.0);
        assert_eq!(term_cost(&MultPenalty, &t("(+ x x)")), 5.0);
        assert!(term_cost(&AstSizeInv, &t("(+ x x)")) < term_cost(&AstSizeInv, &t("x")));
        assert_eq!(AstSizeInv::CEILING - term_cost(&AstSizeInv, &t("(+ x (f y))")), 4.0);
        for name in COST_FUNCTIONS {
            assert_eq!(cost_function(name).unwrap().name(), name);
        }
        assert!(cost_function("nope").is_none());
    }

    #[test]
    fn single_literal() {
        let g = EGraph::from_term(&t("5")).unwrap();
        assert_eq!(extract(&g, &AstSize, g.root().unwrap()).unwrap(), t("5"));
    }

    #[test]
    fn cost_choice() {
        let mut g = EGraph::new();
        let a = g.add_term(&t("(* x 2)")).unwrap();
        let b = g.add_term(&t("(+ x x)")).unwrap();
        g.merge(a, b).unwrap();
        g.rebuild();
        assert_eq!(extract(&g, &MultPenalty, a).unwrap(), t("(+ x x)"));
        let c = g.add_term(&t("(f x)")).unwrap();
        g.merge(a, c).unwrap();
        g.rebuild();
        assert_eq!(extract(&g, &AstSize, a).unwrap(), t("(f x)"));
        assert_eq!(extract(&g, &AstSizeInv, a).unwrap(), t("(+ x x)"));
    }

    #[test]
    fn ties_prefer_newest_node() {
        let mut g = EGraph::new();
        let a = g.add_term(&t("(f a)")).unwrap();
        let b = g.add_term(&t("(g a)")).unwrap();
        g.merge(a, b).unwrap();
        g.rebuild();
        assert_eq!(extract(&g, &AstSize, a).unwrap(), t("(g a)"));
    }

    #[test]
    fn cycles() {
        let mut g = EGraph::new();
        let fa = g.add_term(&t("(f a)")).unwrap();
        let a = g.lookup_term(&t("a")).unwrap();
        g.merge(fa, a).unwrap();
        g.rebuild();
        assert_eq!(extract(&g, &AstSize, fa).unwrap(), t("a"));
    }

    struct NoF;

    impl CostFunction for NoF {
        fn name(&self) -> &str {
            "no_f"
        }

        fn cost(&self, n: &ENode, child_costs: &[f64]) -> f64 {
            match n.operation() {
                Some(op) if op.as_str() == "f" => f64::INFINITY,
                _ => AstSize.cost(n, child_costs),
            }
        }
    }

    #[test]
    fn infinite_cost_is_unextractable() {
        let g = EGraph::from_term(&t("(g (f a))")).unwrap();
        let root = g.root().unwrap();
        assert!(matches!(extract(&g, &NoF, root), Err(ExtractError::Unextractable(_))));
    }
}
