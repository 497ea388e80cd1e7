use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::str::FromStr;

use quick_xml::escape::escape;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use serde::{Deserialize, Serialize};

use super::graph::TechnologySpace;
use super::overlay::Overlay;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphFormat {
    GraphMl,
    Dot,
    Json,
}

impl GraphFormat {
    pub fn extension(self) -> &'static str {
        match self {
            GraphFormat::GraphMl => "graphml",
            GraphFormat::Dot => "dot",
            GraphFormat::Json => "json",
        }
    }
}

impl FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "graphml" => Ok(GraphFormat::GraphMl),
            "dot" => Ok(GraphFormat::Dot),
            "json" => Ok(GraphFormat::Json),
            _ => Err(Error::UnknownFormat(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphNode {
    pub id: String,
    pub sector: String,
    pub complexity: Option<f64>,
    pub degree: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
    /// Keyed by attribute name, `spec_<window>`.
    #[serde(flatten)]
    pub spec: BTreeMap<String, bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub source: String,
    pub target: String,
    pub weight: f64,
    pub backbone: bool,
}

/// Format-neutral view of a space or overlay, in the order it is written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    #[serde(default)]
    pub graph: BTreeMap<String, String>,
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
}

impl GraphDocument {
    pub fn from_space(space: &TechnologySpace) -> Self {
        let mut graph = BTreeMap::new();
        let p = &space.provenance;
        graph.insert("window".to_string(), p.window.clone());
        graph.insert("scope".to_string(), p.scope.clone());
        if let Some(k) = p.backbone_k {
            let k = if k == usize::MAX {
                "all".to_string()
            } else {
                k.to_string()
            };
            graph.insert("backbone_k".to_string(), k);
        }
        if let Some(c) = p.components {
            graph.insert("components".to_string(), c.to_string());
        }
        let nodes = space
            .nodes
            .iter()
            .map(|n| GraphNode {
                id: n.label.clone(),
                sector: n.sector.clone(),
                complexity: n.complexity,
                degree: n.degree,
                category: None,
                spec: BTreeMap::new(),
            })
            .collect();
        let edges = space
            .edges
            .iter()
            .map(|e| GraphEdge {
                source: space.nodes[e.source].label.clone(),
                target: space.nodes[e.target].label.clone(),
                weight: e.weight,
                backbone: e.backbone,
            })
            .collect();
        GraphDocument { graph, nodes, edges }
    }

    pub fn from_overlay(overlay: &Overlay) -> Self {
        let mut doc = GraphDocument::from_space(&overlay.space);
        doc.graph.insert("windows".to_string(), overlay.windows.join(","));
        for (node, marking) in doc.nodes.iter_mut().zip(&overlay.markings) {
            node.category = Some(marking.category.clone());
            node.spec = marking
                .specialised
                .iter()
                .map(|(w, &b)| (format!("spec_{w}"), b))
                .collect();
        }
        doc
    }

    fn spec_keys(&self) -> BTreeSet<&str> {
        self.nodes
            .iter()
            .flat_map(|n| n.spec.keys().map(String::as_str))
            .collect()
    }
}

pub fn export_graph(doc: &GraphDocument, format: GraphFormat) -> String {
    match format {
        GraphFormat::GraphMl => to_graphml(doc),
        GraphFormat::Dot => to_dot(doc),
        GraphFormat::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("graph documents serialise");
            s.push('\n');
            s
        }
    }
}

/// Reads back a document written by [`export_graph`]. DOT is write-only.
pub fn import_graph(text: &str, format: GraphFormat) -> Result<GraphDocument> {
    match format {
        GraphFormat::Json => serde_json::from_str(text).map_err(|e| Error::Import(e.to_string())),
        GraphFormat::GraphMl => from_graphml(text),
        GraphFormat::Dot => Err(Error::UnknownFormat("dot import".into())),
    }
}

fn to_graphml(doc: &GraphDocument) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    let key = |out: &mut String, id: &str, domain: &str, name: &str, ty: &str| {
        let _ = writeln!(
            out,
            "  <key id=\"{}\" for=\"{domain}\" attr.name=\"{}\" attr.type=\"{ty}\"/>",
            escape(id),
            escape(name)
        );
    };
    for name in doc.graph.keys() {
        key(&mut out, &format!("g_{name}"), "graph", name, "string");
    }
    key(&mut out, "sector", "node", "sector", "string");
    key(&mut out, "complexity", "node", "complexity", "double");
    key(&mut out, "degree", "node", "degree", "double");
    if doc.nodes.iter().any(|n| n.category.is_some()) {
        key(&mut out, "category", "node", "category", "string");
    }
    for name in doc.spec_keys() {
        key(&mut out, name, "node", name, "boolean");
    }
    key(&mut out, "weight", "edge", "weight", "double");
    key(&mut out, "backbone", "edge", "backbone", "boolean");

    out.push_str("  <graph id=\"techspace\" edgedefault=\"undirected\">\n");
    for (name, value) in &doc.graph {
        let _ = writeln!(out, "    <data key=\"g_{}\">{}</data>", escape(name), escape(value));
    }
    for n in &doc.nodes {
        let _ = writeln!(out, "    <node id=\"{}\">", escape(&n.id));
        let _ = writeln!(out, "      <data key=\"sector\">{}</data>", escape(&n.sector));
        if let Some(c) = n.complexity {
            let _ = writeln!(out, "      <data key=\"complexity\">{c}</data>");
        }
        let _ = writeln!(out, "      <data key=\"degree\">{}</data>", n.degree);
        if let Some(c) = &n.category {
            let _ = writeln!(out, "      <data key=\"category\">{}</data>", escape(c));
        }
        for (k, v) in &n.spec {
            let _ = writeln!(out, "      <data key=\"{}\">{v}</data>", escape(k));
        }
        out.push_str("    </node>\n");
    }
    for e in &doc.edges {
        let _ = writeln!(
            out,
            "    <edge source=\"{}\" target=\"{}\">",
            escape(&e.source),
            escape(&e.target)
        );
        let _ = writeln!(out, "      <data key=\"weight\">{}</data>", e.weight);
        let _ = writeln!(out, "      <data key=\"backbone\">{}</data>", e.backbone);
        out.push_str("    </edge>\n");
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn to_dot(doc: &GraphDocument) -> String {
    let mut out = String::from("graph techspace {\n");
    if !doc.graph.is_empty() {
        let attrs: Vec<String> = doc.graph.iter().map(|(k, v)| format!("{k}={}", dot_quote(v))).collect();
        let _ = writeln!(out, "  graph [{}];", attrs.join(", "));
    }
    for n in &doc.nodes {
        let mut attrs = vec![format!("sector={}", dot_quote(&n.sector))];
        if let Some(c) = n.complexity {
            attrs.push(format!("complexity={c}"));
        }
        attrs.push(format!("degree={}", n.degree));
        if let Some(c) = &n.category {
            attrs.push(format!("category={}", dot_quote(c)));
        }
        for (k, v) in &n.spec {
            attrs.push(format!("{}={v}", dot_quote(k)));
        }
        let _ = writeln!(out, "  {} [{}];", dot_quote(&n.id), attrs.join(", "));
    }
    for e in &doc.edges {
        let _ = writeln!(
            out,
            "  {} -- {} [weight={}, backbone={}];",
            dot_quote(&e.source),
            dot_quote(&e.target),
            e.weight,
            e.backbone
        );
    }
    out.push_str("}\n");
    out
}

fn attr(e: &BytesStart, name: &str) -> Result<Option<String>> {
    for a in e.attributes() {
        let a = a.map_err(|e| Error::Import(e.to_string()))?;
        if a.key.as_ref() == name.as_bytes() {
            let v = a.unescape_value().map_err(|e| Error::Import(e.to_string()))?;
            return Ok(Some(v.into_owned()));
        }
    }
    Ok(None)
}

fn required(e: &BytesStart, name: &str) -> Result<String> {
    attr(e, name)?.ok_or_else(|| Error::Import(format!("missing attribute {name}")))
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse()
        .map_err(|_| Error::Import(format!("{key}: bad number {v:?}")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        _ => Err(Error::Import(format!("{key}: bad boolean {v:?}"))),
    }
}

enum Owner {
    Graph,
    Node(GraphNode),
    Edge(GraphEdge),
}

fn from_graphml(text: &str) -> Result<GraphDocument> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(true);
    let err = |e: quick_xml::Error| Error::Import(e.to_string());

    let mut keys: BTreeMap<String, String> = BTreeMap::new();
    let mut doc = GraphDocument {
        graph: BTreeMap::new(),
        nodes: vec![],
        edges: vec![],
    };
    let mut owner: Option<Owner> = None;
    let mut data_key: Option<String> = None;
    let mut data_text = String::new();

    loop {
        match reader.read_event().map_err(err)? {
            Event::Start(e) | Event::Empty(e) if e.local_name().as_ref() == b"key" => {
                keys.insert(required(&e, "id")?, required(&e, "attr.name")?);
            }
            Event::Start(e) => match e.local_name().as_ref() {
                b"graph" => owner = Some(Owner::Graph),
                b"node" => {
                    owner = Some(Owner::Node(GraphNode {
                        id: required(&e, "id")?,
                        sector: String::new(),
                        complexity: None,
                        degree: 0.0,
                        category: None,
                        spec: BTreeMap::new(),
                    }))
                }
                b"edge" => {
                    owner = Some(Owner::Edge(GraphEdge {
                        source: required(&e, "source")?,
                        target: required(&e, "target")?,
                        weight: 0.0,
                        backbone: false,
                    }))
                }
                b"data" => {
                    data_key = Some(required(&e, "key")?);
                    data_text.clear();
                }
                _ => {}
            },
            Event::Empty(e) if e.local_name().as_ref() == b"node" => {
                doc.nodes.push(GraphNode {
                    id: required(&e, "id")?,
                    sector: String::new(),
                    complexity: None,
                    degree: 0.0,
                    category: None,
                    spec: BTreeMap::new(),
                });
            }
            Event::Text(t) => {
                if data_key.is_some() {
                    data_text.push_str(&t.unescape().map_err(err)?);
                }
            }
            Event::End(e) => match e.local_name().as_ref() {
                b"data" => {
                    let id = data_key.take().unwrap_or_default();
                    let name = keys
                        .get(&id)
                        .ok_or_else(|| Error::Import(format!("undeclared key {id}")))?;
                    let v = data_text.as_str();
                    match owner.as_mut() {
                        Some(Owner::Graph) => {
                            doc.graph.insert(name.clone(), v.to_string());
                        }
                        Some(Owner::Node(n)) => match name.as_str() {
                            "sector" => n.sector = v.to_string(),
                            "complexity" => n.complexity = Some(parse_f64(name, v)?),
                            "degree" => n.degree = parse_f64(name, v)?,
                            "category" => n.category = Some(v.to_string()),
                            s if s.starts_with("spec_") => {
                                n.spec.insert(s.to_string(), parse_bool(s, v)?);
                            }
                            other => return Err(Error::Import(format!("unknown node attribute {other}"))),
                        },
                        Some(Owner::Edge(ed)) => match name.as_str() {
                            "weight" => ed.weight = parse_f64(name, v)?,
                            "backbone" => ed.backbone = parse_bool(name, v)?,
                            other => return Err(Error::Import(format!("unknown edge attribute {other}"))),
                        },
                        None => return Err(Error::Import("data outside graph".into())),
                    }
                }
                b"node" | b"edge" => {
                    match owner.take() {
                        Some(Owner::Node(n)) => doc.nodes.push(n),
                        Some(Owner::Edge(ed)) => doc.edges.push(ed),
                        _ => {}
                    }
                    owner = Some(Owner::Graph);
                }
                b"graph" => owner = None,
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
    }
    Ok(doc)
}
