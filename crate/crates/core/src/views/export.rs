//! DOT, GraphML and JSON renderings of graph documents.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::{EdgeKind, Fill, GraphDocument, Marker, Shape};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    GraphMl,
    Json,
}

impl ExportFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Some(ExportFormat::Dot),
            "graphml" => Some(ExportFormat::GraphMl),
            "json" => Some(ExportFormat::Json),
            _ => None,
        }
    }
}

pub fn export(doc: &GraphDocument, format: ExportFormat) -> String {
    match format {
        ExportFormat::Dot => to_dot(doc),
        ExportFormat::GraphMl => to_graphml(doc),
        ExportFormat::Json => to_json(doc),
    }
}

pub fn to_json(doc: &GraphDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

fn dot_quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

fn shape_attrs(shape: Shape) -> &'static str {
    match shape {
        Shape::Square => "box",
        Shape::Circle => "ellipse",
        Shape::MetaBox => "folder",
    }
}

fn fill_colors(fill: Fill) -> (&'static str, &'static str) {
    match fill {
        Fill::ProductionWhite => ("white", "black"),
        Fill::TestBlack => ("black", "white"),
        Fill::MetaNeutral => ("lightgrey", "black"),
    }
}

fn edge_style(kind: EdgeKind, marker: Option<Marker>) -> (&'static str, &'static str, &'static str) {
    // (style, color, arrowhead)
    let (style, color, head) = match kind {
        EdgeKind::Containment => ("solid", "grey50", "none"),
        EdgeKind::Coverage => ("solid", "blue", "normal"),
        EdgeKind::Dependency => ("bold", "red", "empty"),
    };
    match marker {
        Some(Marker::Inherited) => ("dashed", color, head),
        Some(Marker::Setup) => ("dotted", color, head),
        None => (style, color, head),
    }
}

fn fmt_num(v: f64) -> String {
    // Shortest round-trip form keeps output stable and compact.
    let s = format!("{v}");
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

pub fn to_dot(doc: &GraphDocument) -> String {
    let mut out = String::new();
    let name = format!("testscope {}", doc.view_kind.as_str());
    let _ = writeln!(out, "digraph {} {{", dot_quote(&name));
    for (k, v) in &doc.meta {
        let _ = writeln!(out, "  // {k}: {}", v.replace('\n', " "));
    }
    let _ = writeln!(out, "  node [style=filled, fontsize=10];");

    // Nodes grouped by their cluster parent so clusters render as boxes.
    let mut by_group: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    let mut loose = Vec::new();
    for (i, n) in doc.nodes.iter().enumerate() {
        match n.group.as_deref() {
            Some(g) if doc.node(g).is_some() => by_group.entry(g).or_default().push(i),
            _ => loose.push(i),
        }
    }
    let node_line = |out: &mut String, i: usize, indent: &str| {
        let n = &doc.nodes[i];
        let (fill, font) = fill_colors(n.fill);
        let mut attrs = vec![
            format!("label={}", dot_quote(&n.label)),
            format!("shape={}", shape_attrs(n.shape)),
            format!("fillcolor={fill}"),
            format!("fontcolor={font}"),
        ];
        match n.marker {
            Some(Marker::Inherited) => attrs.push("style=\"filled,dashed\"".into()),
            Some(Marker::Setup) => attrs.push("style=\"filled,dotted\"".into()),
            None => {}
        }
        if let Some(p) = n.position {
            attrs.push(format!("pos={}", dot_quote(&format!("{},{}!", fmt_num(p.x), fmt_num(p.y)))));
        }
        let _ = writeln!(out, "{indent}{} [{}];", dot_quote(&n.id), attrs.join(", "));
    };
    for i in loose {
        node_line(&mut out, i, "  ");
    }
    for (cluster, (group, members)) in by_group.iter().enumerate() {
        let label = doc.node(group).map_or(*group, |n| n.label.as_str());
        let _ = writeln!(out, "  subgraph cluster_{cluster} {{");
        let _ = writeln!(out, "    label={};", dot_quote(label));
        for &i in members {
            node_line(&mut out, i, "    ");
        }
        let _ = writeln!(out, "  }}");
    }
    for e in &doc.edges {
        let (style, color, head) = edge_style(e.kind, e.marker);
        let kind = match e.kind {
            EdgeKind::Containment => "containment",
            EdgeKind::Coverage => "coverage",
            EdgeKind::Dependency => "dependency",
        };
        let _ = writeln!(
            out,
            "  {} -> {} [class={kind}, style={style}, color={color}, arrowhead={head}, weight={}, label={}];",
            dot_quote(&e.from),
            dot_quote(&e.to),
            e.weight,
            dot_quote(&if e.weight > 1 { e.weight.to_string() } else { String::new() }),
        );
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

const GRAPHML_KEYS: &[(&str, &str, &str, &str)] = &[
    ("label", "node", "label", "string"),
    ("shape", "node", "shape", "string"),
    ("fill", "node", "fill", "string"),
    ("entity", "node", "entity", "int"),
    ("group", "node", "group", "string"),
    ("nmarker", "node", "marker", "string"),
    ("x", "node", "x", "double"),
    ("y", "node", "y", "double"),
    ("kind", "edge", "kind", "string"),
    ("weight", "edge", "weight", "int"),
    ("emarker", "edge", "marker", "string"),
];

pub fn to_graphml(doc: &GraphDocument) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    for (id, target, name, ty) in GRAPHML_KEYS {
        let _ = writeln!(
            out,
            "  <key id=\"{id}\" for=\"{target}\" attr.name=\"{name}\" attr.type=\"{ty}\"/>"
        );
    }
    let _ = writeln!(
        out,
        "  <graph id=\"{}\" edgedefault=\"directed\">",
        xml_escape(doc.view_kind.as_str())
    );
    let data = |out: &mut String, key: &str, value: &str| {
        let _ = writeln!(out, "      <data key=\"{key}\">{}</data>", xml_escape(value));
    };
    for n in &doc.nodes {
        let _ = writeln!(out, "    <node id=\"{}\">", xml_escape(&n.id));
        data(&mut out, "label", &n.label);
        data(&mut out, "shape", &format!("{:?}", n.shape));
        data(&mut out, "fill", &format!("{:?}", n.fill));
        if let Some(e) = n.entity {
            data(&mut out, "entity", &e.0.to_string());
        }
        if let Some(g) = &n.group {
            data(&mut out, "group", g);
        }
        if let Some(m) = n.marker {
            data(&mut out, "nmarker", &format!("{m:?}"));
        }
        if let Some(p) = n.position {
            data(&mut out, "x", &fmt_num(p.x));
            data(&mut out, "y", &fmt_num(p.y));
        }
        out.push_str("    </node>\n");
    }
    for e in &doc.edges {
        let _ = writeln!(
            out,
            "    <edge source=\"{}\" target=\"{}\">",
            xml_escape(&e.from),
            xml_escape(&e.to)
        );
        data(&mut out, "kind", &format!("{:?}", e.kind));
        data(&mut out, "weight", &e.weight.to_string());
        if let Some(m) = e.marker {
            data(&mut out, "emarker", &format!("{m:?}"));
        }
        out.push_str("    </edge>\n");
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}
