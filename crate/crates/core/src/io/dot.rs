//! Graphviz output for transition systems and interaction graphs.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::dynamics::TransitionSystem;
use crate::graphs::{InteractionGraph, SignedInteractionGraph};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Renders a transition system. Nodes are state labels, edges carry the
/// modality label, and attractor states are filled grey. Self-loops are
/// omitted when the system is reflexively reduced.
pub fn emit_sts_dot(ts: &TransitionSystem, name: &str) -> String {
    let shaded: BTreeSet<usize> = ts.attractors().into_iter().flat_map(|a| a.states).collect();
    let mut out = format!("digraph {} {{\n", quote(name));
    for s in 0..ts.len() {
        let label = quote(&ts.state_label(s));
        if shaded.contains(&s) {
            writeln!(out, "  {label} [style=filled, fillcolor=lightgrey];").unwrap();
        } else {
            writeln!(out, "  {label};").unwrap();
        }
    }
    for (src, m, dst) in ts.transitions() {
        writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(&ts.state_label(src)),
            quote(&ts.state_label(dst)),
            quote(&ts.labels()[m])
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

/// Renders a signed graph with arcs labelled `+`, `-` or `±`.
pub fn emit_graph_dot(g: &SignedInteractionGraph, name: &str) -> String {
    let mut out = format!("digraph {} {{\n", quote(name));
    for v in g.vertices() {
        writeln!(out, "  {};", quote(v)).unwrap();
    }
    for (a, b, sign) in g.arcs() {
        let v = g.vertices();
        writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(&v[a]),
            quote(&v[b]),
            quote(sign.symbol())
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn emit_unsigned_graph_dot(g: &InteractionGraph, name: &str) -> String {
    let mut out = format!("digraph {} {{\n", quote(name));
    for v in &g.vertices {
        writeln!(out, "  {};", quote(v)).unwrap();
    }
    for &(a, b) in &g.arcs {
        writeln!(
            out,
            "  {} -> {};",
            quote(&g.vertices[a]),
            quote(&g.vertices[b])
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::build_sts;
    use crate::fixtures::FIG1;
    use crate::graphs::interaction_graph;
    use crate::io::parse_mvnet;
    use crate::model::{Mode, DEFAULT_CAP};

    #[test]
    fn running_example_stg() {
        let net = parse_mvnet(FIG1).unwrap();
        let ts = build_sts(&net, &Mode::asynchronous(2), None, DEFAULT_CAP)
            .unwrap()
            .reflexive_reduction();
        let dot = emit_sts_dot(&ts, "fig1");
        assert_eq!(dot.matches(" -> ").count(), 10);
        assert_eq!(dot.matches("fillcolor").count(), 2);
        assert!(dot.contains("\"00\" [style=filled"));
        assert!(dot.contains("\"13\" [style=filled"));
    }

    #[test]
    fn empty_system_has_no_nodes() {
        let g = SignedInteractionGraph::new(Vec::new());
        assert_eq!(emit_graph_dot(&g, "empty"), "digraph \"empty\" {\n}\n");
    }

    #[test]
    fn signed_arcs() {
        let net = parse_mvnet(FIG1).unwrap();
        let dot = emit_graph_dot(&interaction_graph(&net, DEFAULT_CAP).unwrap(), "migs");
        assert!(dot.contains("\"x\" -> \"y\" [label=\"+\"];"));
        assert!(dot.contains("\"y\" -> \"x\" [label=\"+\"];"));
        assert!(dot.contains("\"y\" -> \"y\" [label=\"+\"];"));
    }
}
