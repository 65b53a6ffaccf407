mod common;

use std::collections::HashSet;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use termsat::egraph::{EGraph, Id};
use termsat::ematch::{ematch, ematch_program, EMatchProgram};
use termsat::rules::Pattern;

fn random_graph(seed: u64) -> EGraph {
    let mut r = rng(seed);
    let mut g = EGraph::new();
    for _ in 0..r.gen_range(1..6) {
        g.add_term(&random_fg_term(&mut r, 5)).unwrap();
    }
    let ids = g.class_ids();
    for _ in 0..r.gen_range(0..4) {
        g.merge(ids[r.gen_range(0..ids.len())], ids[r.gen_range(0..ids.len())]).unwrap();
    }
    g.rebuild();
    g
}

/// Rebuilds the term a pattern denotes under a match, picking any
/// representative for each bound class.
fn instantiate(g: &EGraph, p: &Pattern, s: &[Option<Id>]) -> Option<Id> {
    match p {
        Pattern::Var(v) => s[v.index],
        Pattern::Lit(l) => g.lookup_term(&l.to_term()),
        Pattern::Term(termsat::rules::PatOp::Sym(op), args) => {
            let ch: Option<Vec<Id>> = args.iter().map(|a| instantiate(g, a, s)).collect();
            g.lookup(&termsat::egraph::ENode::Op(*op, ch?))
        }
        _ => None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn vm_agrees_with_naive_matcher(gseed in any::<u64>(), pseed in any::<u64>()) {
        let g = random_graph(gseed);
        let src = random_fg_pattern(&mut rng(pseed), 4);
        let p = pat(&src);
        let vm: HashSet<(Id, Subst)> = ematch(&g, &p).unwrap().into_iter().map(|m| (m.class, m.bindings)).collect();
        prop_assert_eq!(vm, naive_ematch(&g, &p), "pattern {}", src);
    }

    #[test]
    fn every_match_is_represented(gseed in any::<u64>(), pseed in any::<u64>()) {
        let g = random_graph(gseed);
        let p = pat(&random_fg_pattern(&mut rng(pseed), 4));
        for m in ematch(&g, &p).unwrap() {
            prop_assert!(m.bindings.iter().all(Option::is_some));
            prop_assert_eq!(instantiate(&g, &p, &m.bindings), Some(m.class));
        }
    }

    #[test]
    fn threaded_matching_is_identical(gseed in any::<u64>(), pseed in any::<u64>()) {
        let g = random_graph(gseed);
        let p = pat(&random_fg_pattern(&mut rng(pseed), 3));
        let prog = EMatchProgram::compile(&p).unwrap();
        prop_assert_eq!(ematch_program(&g, &prog, false).unwrap(), ematch_program(&g, &prog, true).unwrap());
    }
}

#[test]
fn disassembly_mentions_ground_lookups() {
    let prog = EMatchProgram::compile(&pat("(g ~x (f a))")).unwrap();
    let text = prog.disassemble();
    assert!(text.starts_with("g0 = (f a)"), "{text}");
    assert!(text.contains("LOOKUP"), "{text}");
    assert!(text.contains("YIELD"), "{text}");
}

#[test]
fn nonlinear_pattern() {
    let mut g = EGraph::new();
    g.add_term(&t("(g a a)")).unwrap();
    g.add_term(&t("(g a b)")).unwrap();
    let ms = ematch(&g, &pat("(g ~x ~x)")).unwrap();
    assert_eq!(ms.len(), 1);
    assert_eq!(Some(ms[0].class), g.lookup_term(&t("(g a a)")));
}
