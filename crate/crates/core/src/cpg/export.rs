//! Plain-text graph dump for debugging and golden tests: one node or edge
//! per line, `key=value` pairs sorted by key, deterministic ordering.

use std::fmt::Write;

use crate::cpg::graph::{PropertyGraph, Target, Value};

pub fn export_text(g: &PropertyGraph) -> String {
    let mut out = String::new();
    writeln!(out, "function {}", g.function).unwrap();
    for node in &g.nodes {
        write!(out, "node {} kind={}", node.id.0, node.kind).unwrap();
        let mut props: Vec<(String, &Value)> = g
            .properties()
            .iter()
            .filter(|((t, _), _)| *t == Target::Node(node.id))
            .map(|((_, k), v)| (k.to_string(), v))
            .collect();
        props.sort_by(|a, b| a.0.cmp(&b.0));
        for (k, v) in props {
            write!(out, " {}={}", k, render(v)).unwrap();
        }
        writeln!(out).unwrap();
    }
    for edge in &g.edges {
        write!(out, "edge {} {} -> {}", edge.kind, edge.src.0, edge.dst.0).unwrap();
        let mut props: Vec<(String, &Value)> = g
            .properties()
            .iter()
            .filter(|((t, _), _)| *t == Target::Edge(edge.id))
            .map(|((_, k), v)| (k.to_string(), v))
            .collect();
        props.sort_by(|a, b| a.0.cmp(&b.0));
        for (k, v) in props {
            write!(out, " {}={}", k, render(v)).unwrap();
        }
        writeln!(out).unwrap();
    }
    for (u, succs) in g.cfg_succ.iter().enumerate() {
        for s in succs {
            writeln!(out, "cfg {} -> {}", u, s.0).unwrap();
        }
    }
    out
}

fn render(v: &Value) -> String {
    match v {
        Value::Int(i) => i.to_string(),
        Value::Text(t) => format!("{:?}", t),
        Value::Unknown => "UNKNOWN".to_string(),
    }
}
