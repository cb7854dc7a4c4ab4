//! DOT, GraphML and JSON renderings of a partnership network.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::{json, Value};

use super::{GraphError, PartnershipNetwork};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    GraphMl,
    Json,
}

impl FromStr for ExportFormat {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(ExportFormat::Dot),
            "graphml" => Ok(ExportFormat::GraphMl),
            "json" => Ok(ExportFormat::Json),
            _ => Err(GraphError::UnsupportedFormat(s.to_string())),
        }
    }
}

/// Renders `net`. When `betweenness` is given, each node carries its score.
pub fn export_graph(
    net: &PartnershipNetwork,
    format: ExportFormat,
    betweenness: Option<&BTreeMap<String, f64>>,
) -> String {
    match format {
        ExportFormat::Dot => to_dot(net, betweenness),
        ExportFormat::GraphMl => to_graphml(net, betweenness),
        ExportFormat::Json => to_json(net, betweenness),
    }
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn to_dot(net: &PartnershipNetwork, bc: Option<&BTreeMap<String, f64>>) -> String {
    let mut out = String::new();
    let name = format!("{}/{}", net.match_id(), net.team());
    writeln!(out, "graph {} {{", dot_quote(&name)).unwrap();
    for node in net.nodes() {
        match bc.and_then(|b| b.get(node)) {
            Some(score) => writeln!(out, "  {} [betweenness={score}];", dot_quote(node)).unwrap(),
            None => writeln!(out, "  {};", dot_quote(node)).unwrap(),
        }
    }
    for e in net.edges() {
        writeln!(
            out,
            "  {} -- {} [weight={w}, label=\"{w}\"];",
            dot_quote(&net.nodes()[e.u]),
            dot_quote(&net.nodes()[e.v]),
            w = e.weight
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn to_graphml(net: &PartnershipNetwork, bc: Option<&BTreeMap<String, f64>>) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    out.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n");
    if bc.is_some() {
        out.push_str("  <key id=\"betweenness\" for=\"node\" attr.name=\"betweenness\" attr.type=\"double\"/>\n");
    }
    writeln!(
        out,
        "  <graph id=\"{}\" edgedefault=\"undirected\">",
        xml_escape(&format!("{}/{}", net.match_id(), net.team()))
    )
    .unwrap();
    for node in net.nodes() {
        match bc.and_then(|b| b.get(node)) {
            Some(score) => writeln!(
                out,
                "    <node id=\"{}\"><data key=\"betweenness\">{score}</data></node>",
                xml_escape(node)
            )
            .unwrap(),
            None => writeln!(out, "    <node id=\"{}\"/>", xml_escape(node)).unwrap(),
        }
    }
    for e in net.edges() {
        writeln!(
            out,
            "    <edge source=\"{}\" target=\"{}\"><data key=\"weight\">{}</data></edge>",
            xml_escape(&net.nodes()[e.u]),
            xml_escape(&net.nodes()[e.v]),
            e.weight
        )
        .unwrap();
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

fn to_json(net: &PartnershipNetwork, bc: Option<&BTreeMap<String, f64>>) -> String {
    let nodes: Vec<Value> = net
        .nodes()
        .iter()
        .map(|n| match bc.and_then(|b| b.get(n)) {
            Some(score) => json!({ "id": n, "betweenness": score }),
            None => json!({ "id": n }),
        })
        .collect();
    let edges: Vec<Value> = net
        .edges()
        .iter()
        .map(|e| json!({ "source": net.nodes()[e.u], "target": net.nodes()[e.v], "weight": e.weight }))
        .collect();
    let doc = json!({
        "match_id": net.match_id(),
        "team": net.team(),
        "nodes": nodes,
        "edges": edges,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
    s.push('\n');
    s
}
