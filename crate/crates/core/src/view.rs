//! Layer-tagged view projections and interchange rendering.
//!
//! Views reference shared elements by id and never copy them: adding an
//! element to ten views leaves exactly one element record in the model.
//! Rendering is a pure projection to DOT, GraphML, or the canonical
//! structured form, byte-stable for golden tests.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Element, ElementId, Layer, Model, Relationship, RelationshipKind};

/// Per-view display settings: which property keys to print, whether to pull
/// in owned sub-elements, and which edge kinds to draw.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ViewDisplay {
    pub show_properties: Vec<String>,
    pub show_sub_elements: bool,
    pub include_edge_kinds: Vec<RelationshipKind>,
}

/// A named projection over shared model elements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct View {
    pub id: ElementId,
    pub name: String,
    pub layer: Layer,
    pub members: Vec<ElementId>,
    pub display: ViewDisplay,
}

/// Output formats for `render_view`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderFormat {
    Dot,
    GraphMl,
    Structured,
}

impl fmt::Display for RenderFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RenderFormat::Dot => "dot",
            RenderFormat::GraphMl => "graphml",
            RenderFormat::Structured => "structured",
        })
    }
}

impl FromStr for RenderFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(RenderFormat::Dot),
            "graphml" => Ok(RenderFormat::GraphMl),
            "structured" => Ok(RenderFormat::Structured),
            _ => Err(Error::InvalidInput(format!("unknown render format: {s}"))),
        }
    }
}

/// One layer's elements plus a summary of edges crossing into or out of
/// the layer, counted by (kind, source layer, target layer).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LayerReport {
    pub layer: Layer,
    pub elements: Vec<ElementId>,
    pub cross_layer_edges: Vec<CrossLayerEdgeCount>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossLayerEdgeCount {
    pub kind: RelationshipKind,
    pub source_layer: Layer,
    pub target_layer: Layer,
    pub count: usize,
}

fn slugify(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    let mut last_dash = true;
    for ch in name.chars() {
        if ch.is_ascii_alphanumeric() {
            out.push(ch.to_ascii_lowercase());
            last_dash = false;
        } else if !last_dash {
            out.push('-');
            last_dash = true;
        }
    }
    while out.ends_with('-') {
        out.pop();
    }
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

impl Model {
    /// Create a view over existing elements. The view id is the slug of the
    /// name; creating two views with the same slug is a conflict.
    pub fn create_view(
        &mut self,
        name: impl Into<String>,
        layer: Layer,
        mut members: Vec<ElementId>,
        mut display: ViewDisplay,
    ) -> Result<ElementId> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(Error::InvalidInput("view name must not be empty".into()));
        }
        for member in &members {
            if !self.contains_element(member) {
                return Err(Error::DanglingReference(format!("view member {member}")));
            }
        }
        members.sort();
        members.dedup();
        display.include_edge_kinds.sort();
        display.include_edge_kinds.dedup();
        let id = ElementId::new(slugify(&name));
        match self.views.binary_search_by(|v| v.id.cmp(&id)) {
            Ok(_) => Err(Error::Conflict(format!("view {id} already exists"))),
            Err(at) => {
                self.views.insert(
                    at,
                    View {
                        id: id.clone(),
                        name,
                        layer,
                        members,
                        display,
                    },
                );
                Ok(id)
            }
        }
    }

    /// Render a view. Output is deterministic: nodes sorted by id, edges by
    /// (source, target, kind); only edges of the view's included kinds with
    /// both endpoints in the view are drawn.
    pub fn render_view(&self, view_id: &ElementId, format: RenderFormat) -> Result<String> {
        let view = self
            .view(view_id)
            .ok_or_else(|| Error::NotFound(format!("view {view_id}")))?;

        let mut nodes: BTreeMap<&ElementId, &Element> = BTreeMap::new();
        for member in &view.members {
            let el = self
                .element(member)
                .ok_or_else(|| Error::DanglingReference(format!("view member {member}")))?;
            nodes.insert(&el.id, el);
            if view.display.show_sub_elements {
                for sub in el.self_and_sub_elements() {
                    nodes.insert(&sub.id, sub);
                }
            }
        }

        let mut edges: Vec<&Relationship> = self
            .relationships
            .iter()
            .filter(|r| {
                view.display.include_edge_kinds.contains(&r.kind)
                    && nodes.contains_key(&r.source)
                    && nodes.contains_key(&r.target)
            })
            .collect();
        edges.sort_by(|a, b| {
            (&a.source, &a.target, a.kind).cmp(&(&b.source, &b.target, b.kind))
        });

        match format {
            RenderFormat::Dot => Ok(render_dot(view, &nodes, &edges)),
            RenderFormat::GraphMl => Ok(render_graphml(view, &nodes, &edges)),
            RenderFormat::Structured => render_structured(view, &nodes, &edges),
        }
    }

    /// List every element tagged with `layer` and count cross-layer edges
    /// touching it.
    pub fn layer_report(&self, layer: Layer) -> LayerReport {
        let mut elements: Vec<ElementId> = self
            .all_elements()
            .into_iter()
            .filter(|e| e.layer_tags.contains(&layer))
            .map(|e| e.id.clone())
            .collect();
        elements.sort();

        let mut counts: BTreeMap<(RelationshipKind, Layer, Layer), usize> = BTreeMap::new();
        for rel in &self.relationships {
            let (Some(src), Some(tgt)) = (self.element(&rel.source), self.element(&rel.target))
            else {
                continue;
            };
            for &sl in &src.layer_tags {
                for &tl in &tgt.layer_tags {
                    if sl != tl && (sl == layer || tl == layer) {
                        *counts.entry((rel.kind, sl, tl)).or_default() += 1;
                    }
                }
            }
        }
        let cross_layer_edges = counts
            .into_iter()
            .map(|((kind, source_layer, target_layer), count)| CrossLayerEdgeCount {
                kind,
                source_layer,
                target_layer,
                count,
            })
            .collect();

        LayerReport {
            layer,
            elements,
            cross_layer_edges,
        }
    }
}

fn node_label(view: &View, el: &Element) -> String {
    let mut label = dot_escape(&el.name);
    for key in &view.display.show_properties {
        if let Some(value) = el.properties.get(key) {
            label.push_str("\\n");
            label.push_str(&dot_escape(&format!("{key}: {value}")));
        }
    }
    label
}

fn render_dot(
    view: &View,
    nodes: &BTreeMap<&ElementId, &Element>,
    edges: &[&Relationship],
) -> String {
    let mut out = String::new();
    out.push_str(&format!("digraph \"{}\" {{\n", dot_escape(&view.name)));
    out.push_str("  rankdir=LR;\n");
    for (id, el) in nodes {
        out.push_str(&format!(
            "  \"{}\" [label=\"{}\"];\n",
            dot_escape(id.as_str()),
            node_label(view, el)
        ));
    }
    for rel in edges {
        out.push_str(&format!(
            "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
            dot_escape(rel.source.as_str()),
            dot_escape(rel.target.as_str()),
            rel.kind
        ));
    }
    out.push_str("}\n");
    out
}

fn render_graphml(
    view: &View,
    nodes: &BTreeMap<&ElementId, &Element>,
    edges: &[&Relationship],
) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    out.push_str("  <key id=\"d0\" for=\"node\" attr.name=\"name\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"d1\" for=\"node\" attr.name=\"kind\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"d2\" for=\"node\" attr.name=\"layers\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"d3\" for=\"edge\" attr.name=\"kind\" attr.type=\"string\"/>\n");
    out.push_str(&format!(
        "  <graph id=\"{}\" edgedefault=\"directed\">\n",
        xml_escape(view.id.as_str())
    ));
    for (id, el) in nodes {
        let layers = el
            .layer_tags
            .iter()
            .map(Layer::as_str)
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&format!("    <node id=\"{}\">\n", xml_escape(id.as_str())));
        out.push_str(&format!(
            "      <data key=\"d0\">{}</data>\n",
            xml_escape(&el.name)
        ));
        out.push_str(&format!("      <data key=\"d1\">{}</data>\n", el.kind));
        out.push_str(&format!("      <data key=\"d2\">{layers}</data>\n"));
        out.push_str("    </node>\n");
    }
    for rel in edges {
        out.push_str(&format!(
            "    <edge id=\"{}\" source=\"{}\" target=\"{}\">\n",
            xml_escape(rel.id.as_str()),
            xml_escape(rel.source.as_str()),
            xml_escape(rel.target.as_str())
        ));
        out.push_str(&format!("      <data key=\"d3\">{}</data>\n", rel.kind));
        out.push_str("    </edge>\n");
    }
    out.push_str("  </graph>\n");
    out.push_str("</graphml>\n");
    out
}

fn render_structured(
    view: &View,
    nodes: &BTreeMap<&ElementId, &Element>,
    edges: &[&Relationship],
) -> Result<String> {
    let doc = serde_json::json!({
        "view": view,
        "elements": nodes.values().collect::<Vec<_>>(),
        "edges": edges,
    });
    crate::store::to_canonical_json(&doc)
}
