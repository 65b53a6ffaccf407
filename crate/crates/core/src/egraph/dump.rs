use std::fmt::Write;

use crate::egraph::{EGraph, ENode};

impl EGraph {
    /// One line per canonical class: `c<id>: node, node, ... [data: ...]`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for c in self.classes() {
            let nodes: Vec<String> = c.nodes().iter().map(ENode::to_string).collect();
            write!(out, "{}: {}", c.id(), nodes.join(", ")).unwrap();
            let data = self.render_data(c.id());
            if !data.is_empty() {
                let parts: Vec<String> = data.iter().map(|(k, v)| format!("{k}={v}")).collect();
                write!(out, " [data: {}]", parts.join(", ")).unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Graphviz rendering: one cluster per class, edges from nodes to child classes.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph egraph {\n  compound=true;\n  node [shape=box];\n");
        for c in self.classes() {
            let cid = c.id().index();
            writeln!(out, "  subgraph cluster_{cid} {{\n    label=\"{}\";\n    style=dashed;", c.id()).unwrap();
            for (i, n) in c.nodes().iter().enumerate() {
                let label = match n {
                    ENode::Lit(l) => l.to_string(),
                    ENode::Op(op, _) => op.to_string(),
                };
                writeln!(out, "    n{cid}_{i} [label=\"{}\"];", label.replace('"', "\\\"")).unwrap();
            }
            out.push_str("  }\n");
        }
        for c in self.classes() {
            let cid = c.id().index();
            for (i, n) in c.nodes().iter().enumerate() {
                for child in n.children() {
                    let target = self.find(*child).index();
                    writeln!(out, "  n{cid}_{i} -> n{target}_0 [lhead=cluster_{target}];").unwrap();
                }
            }
        }
        out.push_str("}\n");
        out
    }
}
