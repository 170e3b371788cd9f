//! Directed, weighted dependency graph of classes.
//!
//! Every graph is stored as a list of directed edges. An undirected graph is
//! the same structure with `directed == false` and every edge `(u, v, w)`
//! mirrored by `(v, u, w)`, so all quality formulas run over one code path.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::membership::Membership;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Node {
    /// Qualified class name, e.g. `pkg.sub.ClassName`.
    pub label: String,
    pub is_abstract: Option<bool>,
    pub locked: Option<bool>,
}

impl Node {
    pub fn new(label: impl Into<String>) -> Self {
        Node {
            label: label.into(),
            is_abstract: None,
            locked: None,
        }
    }

    pub fn is_locked(&self) -> bool {
        self.locked.unwrap_or(false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

impl Edge {
    pub fn new(source: usize, target: usize, weight: f64) -> Self {
        Edge { source, target, weight }
    }
}

/// Outgoing and incoming edge weight of one node.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Strength {
    pub out: f64,
    pub incoming: f64,
}

/// A single interactive change to a graph.
#[derive(Debug, Clone, PartialEq)]
pub enum Edit {
    AddNode { label: String },
    RemoveNode { index: usize },
    AddEdge { source: usize, target: usize },
    RemoveEdge { source: usize, target: usize },
    SetLocked { index: usize, locked: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DependencyGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    directed: bool,
}

impl Default for DependencyGraph {
    fn default() -> Self {
        DependencyGraph::new(true)
    }
}

impl DependencyGraph {
    pub fn new(directed: bool) -> Self {
        DependencyGraph {
            nodes: Vec::new(),
            edges: Vec::new(),
            directed,
        }
    }

    /// Builds a graph from parts, validating endpoints and weights.
    ///
    /// For undirected graphs each listed edge is mirrored; list every
    /// undirected pair once.
    pub fn from_parts(nodes: Vec<Node>, edges: Vec<Edge>, directed: bool) -> Result<Self> {
        let mut g = DependencyGraph {
            nodes,
            edges: Vec::with_capacity(edges.len()),
            directed,
        };
        for e in edges {
            g.add_edge(e.source, e.target, e.weight)?;
        }
        Ok(g)
    }

    /// Convenience constructor used heavily in tests: labelled nodes and unit
    /// weight edges, already simplified.
    pub fn from_edge_list(labels: &[&str], edges: &[(usize, usize)], directed: bool) -> Result<Self> {
        let nodes = labels.iter().map(|l| Node::new(*l)).collect();
        let edges = edges.iter().map(|&(s, t)| Edge::new(s, t, 1.0)).collect();
        Ok(Self::from_parts(nodes, edges, directed)?.simplify())
    }

    pub fn add_node(&mut self, node: Node) -> usize {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    /// Appends an edge without merging. Undirected graphs get the mirror edge
    /// too (self-loops are stored once).
    pub fn add_edge(&mut self, source: usize, target: usize, weight: f64) -> Result<()> {
        self.check_node(source)?;
        self.check_node(target)?;
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::InvalidWeight(weight));
        }
        self.edges.push(Edge::new(source, target, weight));
        if !self.directed && source != target {
            self.edges.push(Edge::new(target, source, weight));
        }
        Ok(())
    }

    fn check_node(&self, index: usize) -> Result<()> {
        if index < self.nodes.len() {
            Ok(())
        } else {
            Err(Error::NodeNotFound(index))
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, index: usize) -> Option<&Node> {
        self.nodes.get(index)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Number of stored (directed) edges.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sum of all stored edge weights. For an undirected graph this is `2m`.
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn set_label(&mut self, index: usize, label: impl Into<String>) -> Result<()> {
        self.check_node(index)?;
        self.nodes[index].label = label.into();
        Ok(())
    }

    pub fn weight(&self, source: usize, target: usize) -> f64 {
        self.edges
            .iter()
            .filter(|e| e.source == source && e.target == target)
            .map(|e| e.weight)
            .sum()
    }

    pub fn has_edge(&self, source: usize, target: usize) -> bool {
        self.edges.iter().any(|e| e.source == source && e.target == target)
    }

    /// Removes self-loops, collapses parallel edges per ordered pair by
    /// summing weights and drops zero-weight edges. Edges come out sorted by
    /// `(source, target)`.
    pub fn simplify(&self) -> DependencyGraph {
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for e in &self.edges {
            if e.source != e.target {
                *merged.entry((e.source, e.target)).or_insert(0.0) += e.weight;
            }
        }
        let edges = merged
            .into_iter()
            .filter(|&(_, w)| w > 0.0)
            .map(|((s, t), w)| Edge::new(s, t, w))
            .collect();
        DependencyGraph {
            nodes: self.nodes.clone(),
            edges,
            directed: self.directed,
        }
    }

    pub fn is_simple(&self) -> bool {
        let mut seen = BTreeMap::new();
        self.edges
            .iter()
            .all(|e| e.source != e.target && e.weight > 0.0 && seen.insert((e.source, e.target), ()).is_none())
    }

    /// True when every edge `(u, v, w)` has a mirror `(v, u, w)`.
    pub fn is_symmetric(&self) -> bool {
        let mut weights: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for e in &self.edges {
            *weights.entry((e.source, e.target)).or_insert(0.0) += e.weight;
        }
        weights
            .iter()
            .all(|(&(s, t), w)| weights.get(&(t, s)).is_some_and(|m| m == w))
    }

    /// Per-node outgoing and incoming weight sums.
    pub fn strengths(&self) -> Vec<Strength> {
        let mut s = alloc::vec![Strength::default(); self.nodes.len()];
        for e in &self.edges {
            s[e.source].out += e.weight;
            s[e.target].incoming += e.weight;
        }
        s
    }

    /// One node per community; cross-community edges merged with summed
    /// weights, intra-community edges dropped. Community `c` becomes node `c`
    /// labelled `community<c>`.
    pub fn condense(&self, membership: &Membership) -> Result<DependencyGraph> {
        membership.check_len(self.node_count())?;
        let nodes = (0..membership.community_count())
            .map(|c| Node::new(alloc::format!("community{c}")))
            .collect();
        let edges = self
            .edges
            .iter()
            .filter_map(|e| {
                let (a, b) = (membership.community_of(e.source), membership.community_of(e.target));
                (a != b).then(|| Edge::new(a, b, e.weight))
            })
            .collect();
        Ok(DependencyGraph {
            nodes,
            edges,
            directed: true,
        }
        .simplify())
    }

    /// Applies an interactive edit and returns the simplified result.
    ///
    /// Removing a node shifts every higher index down by one; labels are the
    /// stable identity.
    pub fn apply_edit(&self, edit: &Edit) -> Result<DependencyGraph> {
        let mut g = self.clone();
        match edit {
            Edit::AddNode { label } => {
                g.add_node(Node::new(label.clone()));
            }
            Edit::RemoveNode { index } => {
                let index = *index;
                g.check_node(index)?;
                g.nodes.remove(index);
                g.edges.retain(|e| e.source != index && e.target != index);
                for e in &mut g.edges {
                    if e.source > index {
                        e.source -= 1;
                    }
                    if e.target > index {
                        e.target -= 1;
                    }
                }
            }
            Edit::AddEdge { source, target } => {
                g.add_edge(*source, *target, 1.0)?;
            }
            Edit::RemoveEdge { source, target } => {
                let (s, t) = (*source, *target);
                g.check_node(s)?;
                g.check_node(t)?;
                let before = g.edges.len();
                let directed = g.directed;
                g.edges.retain(|e| {
                    let forward = e.source == s && e.target == t;
                    let backward = !directed && e.source == t && e.target == s;
                    !(forward || backward)
                });
                if g.edges.len() == before {
                    return Err(Error::EdgeNotFound(s, t));
                }
            }
            Edit::SetLocked { index, locked } => {
                g.check_node(*index)?;
                g.nodes[*index].locked = Some(*locked);
            }
        }
        Ok(g.simplify())
    }
}
