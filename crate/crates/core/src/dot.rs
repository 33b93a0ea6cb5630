//! Graphviz DOT emission for STGs, Morse graphs, and pattern diagrams.

use crate::dynamics::{MorseGraph, Stg};
use crate::network::RegulatoryNetwork;
use crate::patternmatch::EventLabeledSubgraph;
use crate::timeseries::PatternDiagram;

fn coord_label(coords: &[u8]) -> String {
    coords.iter().map(|c| c.to_string()).collect()
}

/// STG with domain coordinates and I/D/* labels.
pub fn stg_dot(net: &RegulatoryNetwork, stg: &Stg) -> String {
    let mut s = String::from("digraph stg {\n  node [shape=box];\n");
    s.push_str(&format!(
        "  label=\"{}\";\n",
        net.names().join(",")
    ));
    for d in 0..stg.n_domains() {
        s.push_str(&format!(
            "  d{} [label=\"{} {}\"];\n",
            d,
            coord_label(&stg.coords(d)),
            stg.label_string(d)
        ));
    }
    for &(u, v) in stg.edges() {
        let events: Vec<String> = stg
            .edge_events(u, v)
            .iter()
            .map(|e| {
                format!(
                    "{}_{}{}",
                    net.name(e.var),
                    e.kind.as_str(),
                    if e.forced { "" } else { "?" }
                )
            })
            .collect();
        if events.is_empty() {
            s.push_str(&format!("  d{u} -> d{v};\n"));
        } else {
            s.push_str(&format!(
                "  d{u} -> d{v} [label=\"{}\"];\n",
                events.join(" ")
            ));
        }
    }
    for &d in stg.self_edges() {
        s.push_str(&format!("  d{d} -> d{d};\n"));
    }
    s.push_str("}\n");
    s
}

/// Morse graph with FP/FC/PC annotations; stable nodes drawn bold.
pub fn mg_dot(net: &RegulatoryNetwork, mg: &MorseGraph) -> String {
    let mut s = String::from("digraph mg {\n  node [shape=ellipse];\n");
    for (i, set) in mg.sets.iter().enumerate() {
        let style = if set.stable {
            ", style=bold, peripheries=2"
        } else {
            ""
        };
        s.push_str(&format!(
            "  m{} [label=\"{}{}\"{}];\n",
            i,
            set.annotation.display(net),
            if set.stable { " stable" } else { "" },
            style
        ));
    }
    for &(a, b) in &mg.edges {
        s.push_str(&format!("  m{a} -> m{b};\n"));
    }
    s.push_str("}\n");
    s
}

/// One Morse set with its event labels.
pub fn labeled_subgraph_dot(net: &RegulatoryNetwork, g: &EventLabeledSubgraph) -> String {
    let mut s = String::from("digraph morse_set {\n  node [shape=box];\n");
    for (i, c) in g.coords.iter().enumerate() {
        s.push_str(&format!(
            "  d{} [label=\"{} {}\"];\n",
            i,
            coord_label(c),
            g.labels[i]
        ));
    }
    for (u, v, events) in &g.edges {
        let ev: Vec<String> = events
            .iter()
            .map(|e| {
                format!(
                    "{}_{}{}",
                    net.name(e.var),
                    e.kind.as_str(),
                    if e.forced { "" } else { "?" }
                )
            })
            .collect();
        if ev.is_empty() {
            s.push_str(&format!("  d{u} -> d{v};\n"));
        } else {
            s.push_str(&format!("  d{u} -> d{v} [label=\"{}\"];\n", ev.join(" ")));
        }
    }
    s.push_str("}\n");
    s
}

/// Hasse diagram of a pattern diagram.
pub fn pattern_dot(pd: &PatternDiagram) -> String {
    let mut s = String::from("digraph pattern {\n  node [shape=ellipse];\n");
    for (i, e) in pd.events().iter().enumerate() {
        s.push_str(&format!("  e{} [label=\"{}\"];\n", i, e));
    }
    for (a, b) in pd.covers() {
        s.push_str(&format!("  e{a} -> e{b};\n"));
    }
    s.push_str("}\n");
    s
}
