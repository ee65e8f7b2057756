use std::fmt::Write;

use serde::Serialize;

use crate::tss::Lts;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LtsFormat {
    Jsonl,
    Dot,
}

#[derive(Serialize)]
struct EdgeRecord<'a> {
    src: String,
    pre: &'a str,
    act: &'a str,
    post: &'a str,
    dst: String,
}

fn dot_quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// Renders an LTS as line-JSON (one object per edge) or as a Graphviz digraph.
pub fn export_lts(lts: &Lts, format: LtsFormat) -> String {
    let mut out = String::new();
    match format {
        LtsFormat::Jsonl => {
            for e in &lts.edges {
                let rec = EdgeRecord {
                    src: lts.states[e.src].to_string(),
                    pre: &e.label.before,
                    act: &e.label.action,
                    post: &e.label.after,
                    dst: lts.states[e.dst].to_string(),
                };
                out.push_str(&serde_json::to_string(&rec).expect("edge records serialize"));
                out.push('\n');
            }
        }
        LtsFormat::Dot => {
            out.push_str("digraph lts {\n");
            for (i, s) in lts.states.iter().enumerate() {
                let shape = if lts.roots.contains(&i) { "doublecircle" } else { "circle" };
                let _ = writeln!(out, "  n{i} [label={}, shape={shape}];", dot_quote(&s.to_string()));
            }
            for e in &lts.edges {
                let _ = writeln!(out, "  n{} -> n{} [label={}];", e.src, e.dst, dot_quote(&e.label.to_string()));
            }
            out.push_str("}\n");
        }
    }
    out
}
