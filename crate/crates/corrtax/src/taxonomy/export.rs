use std::fmt::Write;

use super::{name_ranks, Dendrogram, SpanningTree};

fn dot_quote(name: &str) -> String {
    format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz undirected graph. Nodes are listed in name order, edges in tree
/// order with the smaller name first; weights carry 4 decimals.
pub fn export_dot(tree: &SpanningTree) -> String {
    let mut out = String::from("graph mst {\n");
    let mut names: Vec<_> = tree.assets().iter().collect();
    names.sort();
    for name in names {
        writeln!(out, "  {};", dot_quote(name.as_str())).unwrap();
    }
    for e in tree.edges() {
        let (x, y) = tree.named_edge(e);
        writeln!(
            out,
            "  {} -- {} [label=\"{:.4}\"];",
            dot_quote(x.as_str()),
            dot_quote(y.as_str()),
            e.weight
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

/// `{"edges":[["A","B",0.5],...]}` in tree order.
pub fn export_json(tree: &SpanningTree) -> String {
    let edges: Vec<(&str, &str, f64)> = tree
        .edges()
        .iter()
        .map(|e| {
            let (x, y) = tree.named_edge(e);
            (x.as_str(), y.as_str(), e.weight)
        })
        .collect();
    serde_json::json!({ "edges": edges }).to_string()
}

/// Branch lengths with 10 decimals, trailing zeros dropped.
fn newick_number(x: f64) -> String {
    let s = format!("{:.10}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" || s.is_empty() {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn newick_label(name: &str) -> String {
    if name.chars().any(|c| c.is_whitespace() || "()[]':;,".contains(c)) {
        format!("'{}'", name.replace('\'', "''"))
    } else {
        name.to_string()
    }
}

/// Newick text where each internal node sits at its merge height and each
/// branch length is the parent height minus the child height. Children are
/// ordered by their smallest member name.
pub fn export_newick(dendro: &Dendrogram) -> String {
    let rank = name_ranks(dendro.leaves());
    let mut label = rank.clone();
    for m in dendro.merges() {
        label.push(label[m.left].min(label[m.right]));
    }

    let mut out = String::new();
    write_node(dendro, &label, dendro.root(), None, &mut out);
    out.push(';');
    out
}

fn write_node(dendro: &Dendrogram, label: &[usize], id: usize, parent_height: Option<f64>, out: &mut String) {
    match dendro.children(id) {
        None => out.push_str(&newick_label(dendro.leaves()[id].as_str())),
        Some((a, b)) => {
            let (first, second) = if label[a] <= label[b] { (a, b) } else { (b, a) };
            let h = dendro.height(id);
            out.push('(');
            write_node(dendro, label, first, Some(h), out);
            out.push(',');
            write_node(dendro, label, second, Some(h), out);
            out.push(')');
        }
    }
    if let Some(ph) = parent_height {
        out.push(':');
        out.push_str(&newick_number(ph - dendro.height(id)));
    }
}
