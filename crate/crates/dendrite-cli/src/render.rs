use std::collections::BTreeMap;
use std::fmt::Write as _;

use dendrite::{PointId, Universe};

/// The universe as an undirected DOT graph. Ends hang off their anchors as
/// small dashed nodes; `notes` are appended to point labels.
pub fn universe_dot(u: &Universe, name: &str, notes: &BTreeMap<PointId, String>) -> String {
    let mut s = format!("graph {name} {{\n  node [shape=circle];\n");
    for v in u.points() {
        let l = u.label(v).expect("materialized");
        let extra = notes.get(&v).map(|n| format!("\\n{n}")).unwrap_or_default();
        let _ = writeln!(s, "  p{} [label=\"{}:{}{}\"];", v.0, v, l, extra);
    }
    for (a, b) in u.tree().edges() {
        let _ = writeln!(s, "  p{} -- p{};", a.0, b.0);
    }
    for (e, data) in u.ends() {
        let _ = writeln!(s, "  e{} [shape=point, xlabel=\"{}\"];", e.0, e);
        let _ = writeln!(s, "  p{} -- e{} [style=dashed];", data.anchor.0, e.0);
    }
    s.push_str("}\n");
    s
}

/// Left-aligned columns separated by two spaces.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<String>| {
        let mut out = String::new();
        for (i, c) in cells.iter().enumerate() {
            if i + 1 == cells.len() {
                out.push_str(c);
            } else {
                let pad = width[i] - c.chars().count();
                let _ = write!(out, "{c}{}  ", " ".repeat(pad));
            }
        }
        out.push('\n');
        out
    };
    let mut s = line(header.iter().map(|h| h.to_string()).collect());
    for r in rows {
        s.push_str(&line(r.clone()));
    }
    s
}
