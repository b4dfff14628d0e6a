//! Graphviz renderings of graphs, retracts and certificates.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::free_groupoid::Word;
use crate::graph::{DirectedGraph, EdgeId, Forest};
use crate::pushout::RetractReport;

const X_COLOR: &str = "blue";
const Y_COLOR: &str = "red";
const OTHER_COLOR: &str = "gray50";

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

fn edges_of(w: Option<&Word>) -> BTreeSet<EdgeId> {
    w.map(|w| w.letters().iter().map(|l| l.edge.clone()).collect()).unwrap_or_default()
}

fn header(out: &mut String, name: &str, g: &DirectedGraph) {
    let _ = writeln!(out, "digraph {} {{", quote(name));
    for v in g.vertices() {
        let _ = writeln!(out, "  {};", quote(v.as_str()));
    }
}

/// A graph with the edges of `forest` drawn bold and those of `highlight`
/// thick and red.
pub fn graph_dot(name: &str, g: &DirectedGraph, forest: Option<&Forest>, highlight: Option<&Word>) -> String {
    let hot = edges_of(highlight);
    let mut out = String::new();
    header(&mut out, name, g);
    for (e, ends) in g.edges() {
        let mut attrs = vec![format!("label={}", quote(e.as_str()))];
        if forest.is_some_and(|f| f.contains(e)) {
            attrs.push("style=bold".into());
        } else if forest.is_some() {
            attrs.push("style=dashed".into());
        }
        if hot.contains(e) {
            attrs.push(format!("color={Y_COLOR}"));
            attrs.push("penwidth=3".into());
        }
        let _ = writeln!(out, "  {} -> {} [{}];", quote(ends.src.as_str()), quote(ends.tgt.as_str()), attrs.join(", "));
    }
    out.push_str("}\n");
    out
}

/// Generators of `A` and `B` on the common objects: forest `X` edges blue,
/// forest `Y` edges red, the rest gray and dashed. Edges used by `witness`
/// are drawn thick.
pub fn retract_dot(report: &RetractReport, witness: Option<&Word>) -> String {
    let inst = report.instance();
    let union = inst.union_graph();
    let hot = edges_of(witness);
    let mut out = String::new();
    header(&mut out, "retract", &union.graph);
    for (e, ends) in union.graph.edges() {
        let (side, orig) = union.origin(e).expect("union edge");
        let (forest, color, side) = match side {
            crate::graph::PushoutSide::Left => (report.forest_x(), X_COLOR, crate::pushout::Side::A),
            crate::graph::PushoutSide::Right => (report.forest_y(), Y_COLOR, crate::pushout::Side::B),
        };
        let mut attrs = vec![format!("label={}", quote(&format!("{side}:{orig}")))];
        if forest.contains(orig) {
            attrs.push(format!("color={color}"));
            let in_witness = report.w_edge(side, orig).is_some_and(|w| hot.contains(w));
            if in_witness {
                attrs.push("penwidth=3".into());
            }
        } else {
            attrs.push(format!("color={OTHER_COLOR}"));
            attrs.push("style=dashed".into());
        }
        let _ = writeln!(out, "  {} -> {} [{}];", quote(ends.src.as_str()), quote(ends.tgt.as_str()), attrs.join(", "));
    }
    out.push_str("}\n");
    out
}
