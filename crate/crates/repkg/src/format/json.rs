//! JSON graph documents:
//! `{"directed": bool, "nodes": [{"label", "abstract"?, "locked"?}],
//! "edges": [{"source", "target", "weight"?}]}`.

use repkg_core::{DependencyGraph, Edge, Node};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::IngestError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDocument {
    pub label: String,
    #[serde(rename = "abstract", default, skip_serializing_if = "Option::is_none")]
    pub is_abstract: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub locked: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDocument {
    pub source: usize,
    pub target: usize,
    #[serde(default = "unit", skip_serializing_if = "is_unit")]
    pub weight: f64,
}

fn unit() -> f64 {
    1.0
}

fn is_unit(w: &f64) -> bool {
    *w == 1.0
}

/// Serialized form of a [`DependencyGraph`]. Undirected graphs list each
/// pair once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub directed: bool,
    pub nodes: Vec<NodeDocument>,
    pub edges: Vec<EdgeDocument>,
}

impl From<&DependencyGraph> for GraphDocument {
    fn from(g: &DependencyGraph) -> Self {
        GraphDocument {
            directed: g.is_directed(),
            nodes: g
                .nodes()
                .iter()
                .map(|n| NodeDocument {
                    label: n.label.clone(),
                    is_abstract: n.is_abstract,
                    locked: n.locked,
                })
                .collect(),
            edges: g
                .edges()
                .iter()
                .filter(|e| g.is_directed() || e.source <= e.target)
                .map(|e| EdgeDocument {
                    source: e.source,
                    target: e.target,
                    weight: e.weight,
                })
                .collect(),
        }
    }
}

impl GraphDocument {
    pub fn into_graph(self) -> Result<DependencyGraph, IngestError> {
        let n = self.nodes.len();
        let nodes = self
            .nodes
            .into_iter()
            .map(|d| Node {
                label: d.label,
                is_abstract: d.is_abstract,
                locked: d.locked,
            })
            .collect();
        let mut edges = Vec::with_capacity(self.edges.len());
        for (i, e) in self.edges.iter().enumerate() {
            let schema = |field: &str, message: String| IngestError::Schema {
                field: format!("edges[{i}].{field}"),
                message,
            };
            if !e.weight.is_finite() || e.weight < 0.0 {
                return Err(schema(
                    "weight",
                    format!("must be a nonnegative number, found {}", e.weight),
                ));
            }
            for (field, v) in [("source", e.source), ("target", e.target)] {
                if v >= n {
                    return Err(schema(field, format!("node index {v} out of range ({n} nodes)")));
                }
            }
            edges.push(Edge::new(e.source, e.target, e.weight));
        }
        let g = DependencyGraph::from_parts(nodes, edges, self.directed).map_err(|e| IngestError::Schema {
            field: "edges".into(),
            message: e.to_string(),
        })?;
        Ok(g.simplify())
    }

    /// Validates a JSON value and converts it, naming the offending field on
    /// failure.
    pub fn from_value(value: &Value) -> Result<GraphDocument, IngestError> {
        let obj = value.as_object().ok_or_else(|| schema("$", "expected an object"))?;
        let directed = match obj.get("directed") {
            None => true,
            Some(Value::Bool(b)) => *b,
            Some(_) => return Err(schema("directed", "expected a boolean")),
        };
        let nodes = match obj.get("nodes") {
            Some(Value::Array(a)) => a,
            None => return Err(schema("nodes", "missing")),
            Some(_) => return Err(schema("nodes", "expected an array")),
        };
        let mut node_docs = Vec::with_capacity(nodes.len());
        for (i, v) in nodes.iter().enumerate() {
            let o = v
                .as_object()
                .ok_or_else(|| schema(&format!("nodes[{i}]"), "expected an object"))?;
            let label = match o.get("label") {
                Some(Value::String(s)) => s.clone(),
                None | Some(Value::Null) => String::new(),
                Some(_) => return Err(schema(&format!("nodes[{i}].label"), "expected a string")),
            };
            let flag = |key: &str| match o.get(key) {
                None | Some(Value::Null) => Ok(None),
                Some(Value::Bool(b)) => Ok(Some(*b)),
                Some(_) => Err(schema(&format!("nodes[{i}].{key}"), "expected a boolean")),
            };
            node_docs.push(NodeDocument {
                label,
                is_abstract: flag("abstract")?,
                locked: flag("locked")?,
            });
        }
        let edges = match obj.get("edges") {
            Some(Value::Array(a)) => a.as_slice(),
            None => &[],
            Some(_) => return Err(schema("edges", "expected an array")),
        };
        let mut edge_docs = Vec::with_capacity(edges.len());
        for (i, v) in edges.iter().enumerate() {
            let o = v
                .as_object()
                .ok_or_else(|| schema(&format!("edges[{i}]"), "expected an object"))?;
            let index = |key: &str| {
                o.get(key)
                    .and_then(Value::as_u64)
                    .map(|x| x as usize)
                    .ok_or_else(|| schema(&format!("edges[{i}].{key}"), "expected a nonnegative integer"))
            };
            let weight = match o.get("weight") {
                None | Some(Value::Null) => 1.0,
                Some(w) => w
                    .as_f64()
                    .ok_or_else(|| schema(&format!("edges[{i}].weight"), "expected a number"))?,
            };
            edge_docs.push(EdgeDocument {
                source: index("source")?,
                target: index("target")?,
                weight,
            });
        }
        Ok(GraphDocument {
            directed,
            nodes: node_docs,
            edges: edge_docs,
        })
    }
}

fn schema(field: &str, message: &str) -> IngestError {
    IngestError::Schema {
        field: field.into(),
        message: message.into(),
    }
}

pub fn parse_json(text: &str) -> Result<DependencyGraph, IngestError> {
    if text.trim().is_empty() {
        return Err(IngestError::Empty);
    }
    let value: Value = serde_json::from_str(text).map_err(|e| IngestError::Syntax {
        line: e.line(),
        message: e.to_string(),
    })?;
    GraphDocument::from_value(&value)?.into_graph()
}

pub fn write_json(g: &DependencyGraph) -> String {
    serde_json::to_string_pretty(&GraphDocument::from(g)).expect("graph documents always serialize")
}
