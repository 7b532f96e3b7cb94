//! Graphviz rendering of bias networks.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::network::BiasNetwork;

/// Edge pen width for an occurrence count.
pub fn penwidth(count: u32) -> u32 {
    1 + count
}

fn quote(id: &str) -> String {
    let mut out = String::with_capacity(id.len() + 2);
    out.push('"');
    for ch in id.chars() {
        if ch == '"' || ch == '\\' {
            out.push('\\');
        }
        out.push(ch);
    }
    out.push('"');
    out
}

/// DOT text for the network. Nodes and edges are emitted in lexicographic
/// order so identical networks give identical bytes.
pub fn to_dot(network: &BiasNetwork) -> String {
    let spec = network.spec();
    let mut out = String::new();
    let _ = writeln!(out, "digraph bias {{");
    let _ = writeln!(
        out,
        "  label=\"{}-{} window {}\";",
        spec.start(),
        spec.end(),
        spec.window_size()
    );
    let _ = writeln!(out, "  node [shape=ellipse, style=filled, fontcolor=black];");
    for (country, region) in network.nodes() {
        let _ = writeln!(
            out,
            "  {} [fillcolor={}, region={}];",
            quote(country.as_str()),
            region.color(),
            region.label()
        );
    }
    for ((a, b), &count) in network.collusive() {
        let _ = writeln!(
            out,
            "  {} -> {} [color=red, dir=both, penwidth={}, weight={count}];",
            quote(a.as_str()),
            quote(b.as_str()),
            penwidth(count)
        );
    }
    for ((from, to), &count) in network.one_way() {
        let _ = writeln!(
            out,
            "  {} -> {} [color=black, dir=forward, penwidth={}, weight={count}];",
            quote(from.as_str()),
            quote(to.as_str()),
            penwidth(count)
        );
    }
    out.push_str("}\n");
    out
}

/// Writes [`to_dot`] output to `path` and returns the text.
pub fn emit_dot(network: &BiasNetwork, path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    let text = to_dot(network);
    std::fs::write(path, &text).map_err(|e| Error::io(path, e))?;
    Ok(text)
}
