//! Partition quality: intra-community edge fraction and Newman modularity in
//! its undirected and directed (weighted) forms.
//!
//! Both modularity variants reduce to
//!
//! ```text
//! Q = (T * intra - sum_c out_c * in_c) / T^2
//! ```
//!
//! where `T` is the total stored edge weight, `intra` the weight of edges
//! inside communities and `out_c`/`in_c` the summed out/in strengths of
//! community `c`. For the undirected variant the graph is stored
//! symmetrically, so `T = 2m` and `out_c = in_c = k_c`. With integer weights
//! every partial sum is an exact integer in `f64`, so mathematically equal
//! partitions compare bitwise equal.

use alloc::vec;
use alloc::vec::Vec;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::graph::DependencyGraph;
use crate::membership::Membership;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Undirected,
    Directed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityValue {
    pub value: f64,
    pub variant: Variant,
    /// `2m` for undirected graphs, `m` (total directed weight) otherwise.
    pub total_weight: f64,
}

/// Fraction of edge weight that falls inside communities.
pub fn intra_edge_fraction(g: &DependencyGraph, m: &Membership) -> Result<f64> {
    m.check_len(g.node_count())?;
    let total = g.total_weight();
    if g.edge_count() == 0 || total == 0.0 {
        return Err(Error::UndefinedFraction);
    }
    let intra: f64 = g
        .edges()
        .iter()
        .filter(|e| m.community_of(e.source) == m.community_of(e.target))
        .map(|e| e.weight)
        .sum();
    Ok(intra / total)
}

/// Undirected modularity of a symmetric graph.
pub fn modularity_undirected(g: &DependencyGraph, m: &Membership) -> Result<QualityValue> {
    if !g.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    evaluate(g, m, Variant::Undirected)
}

/// Directed modularity, normalized by the total edge weight `m`.
pub fn modularity_directed(g: &DependencyGraph, m: &Membership) -> Result<QualityValue> {
    evaluate(g, m, Variant::Directed)
}

pub fn modularity(g: &DependencyGraph, m: &Membership, variant: Variant) -> Result<QualityValue> {
    match variant {
        Variant::Undirected => modularity_undirected(g, m),
        Variant::Directed => modularity_directed(g, m),
    }
}

fn evaluate(g: &DependencyGraph, m: &Membership, variant: Variant) -> Result<QualityValue> {
    m.check_len(g.node_count())?;
    let totals = CommunityTotals::new(g, m);
    if totals.total == 0.0 {
        return Err(Error::UndefinedModularity);
    }
    Ok(QualityValue {
        value: totals.value(),
        variant,
        total_weight: totals.total,
    })
}

struct CommunityTotals {
    total: f64,
    intra: f64,
    null: f64,
}

impl CommunityTotals {
    fn new(g: &DependencyGraph, m: &Membership) -> Self {
        let mut out = vec![0.0; m.community_count()];
        let mut inc = vec![0.0; m.community_count()];
        let (mut total, mut intra) = (0.0, 0.0);
        for e in g.edges() {
            let (a, b) = (m.community_of(e.source), m.community_of(e.target));
            out[a] += e.weight;
            inc[b] += e.weight;
            total += e.weight;
            if a == b {
                intra += e.weight;
            }
        }
        let null = out.iter().zip(&inc).map(|(o, i)| o * i).sum();
        CommunityTotals { total, intra, null }
    }

    fn value(&self) -> f64 {
        quality_from_sums(self.total, self.intra, self.null)
    }
}

fn quality_from_sums(total: f64, intra: f64, null: f64) -> f64 {
    (total * intra - null) / (total * total)
}

/// Reference evaluation: the double sum over all ordered node pairs,
/// diagonal included, on a dense adjacency matrix.
pub fn dense_modularity(g: &DependencyGraph, m: &Membership) -> Result<f64> {
    m.check_len(g.node_count())?;
    let n = g.node_count();
    let total = g.total_weight();
    if g.edge_count() == 0 || total == 0.0 {
        return Err(Error::UndefinedModularity);
    }
    let mut adjacency = vec![0.0; n * n];
    for e in g.edges() {
        adjacency[e.source * n + e.target] += e.weight;
    }
    let strengths = g.strengths();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if m.community_of(i) == m.community_of(j) {
                q += adjacency[i * n + j] - strengths[i].out * strengths[j].incoming / total;
            }
        }
    }
    Ok(q / total)
}

/// `Q(m with node moved to target) - Q(m)`.
pub fn delta_q_move(g: &DependencyGraph, m: &Membership, node: usize, target: usize) -> Result<f64> {
    let state = QualityState::new(g, m)?;
    if node >= g.node_count() {
        return Err(Error::NodeNotFound(node));
    }
    if target >= m.community_count() {
        return Err(Error::CommunityOutOfRange {
            id: target,
            count: m.community_count(),
        });
    }
    Ok(state.tentative(node, target).value - state.value())
}

/// Incrementally maintained modularity for single-node moves.
#[derive(Debug, Clone)]
pub struct QualityState {
    assignment: Vec<usize>,
    out: Vec<f64>,
    inc: Vec<f64>,
    node_out: Vec<f64>,
    node_in: Vec<f64>,
    /// Per node: (neighbour, weight) over incident non-loop edges, both
    /// directions.
    incident: Vec<Vec<(usize, f64)>>,
    total: f64,
    intra: f64,
    null: f64,
}

/// Outcome of evaluating a single move without applying it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tentative {
    pub node: usize,
    pub target: usize,
    pub value: f64,
    intra: f64,
    null: f64,
}

impl QualityState {
    pub fn new(g: &DependencyGraph, m: &Membership) -> Result<Self> {
        m.check_len(g.node_count())?;
        let totals = CommunityTotals::new(g, m);
        if totals.total == 0.0 {
            return Err(Error::UndefinedModularity);
        }
        let n = g.node_count();
        let k = m.community_count();
        let mut out = vec![0.0; k];
        let mut inc = vec![0.0; k];
        let mut node_out = vec![0.0; n];
        let mut node_in = vec![0.0; n];
        let mut incident = vec![Vec::new(); n];
        for e in g.edges() {
            out[m.community_of(e.source)] += e.weight;
            inc[m.community_of(e.target)] += e.weight;
            node_out[e.source] += e.weight;
            node_in[e.target] += e.weight;
            if e.source != e.target {
                incident[e.source].push((e.target, e.weight));
                incident[e.target].push((e.source, e.weight));
            }
        }
        Ok(QualityState {
            assignment: m.assignment().to_vec(),
            out,
            inc,
            node_out,
            node_in,
            incident,
            total: totals.total,
            intra: totals.intra,
            null: totals.null,
        })
    }

    pub fn value(&self) -> f64 {
        quality_from_sums(self.total, self.intra, self.null)
    }

    pub fn community_of(&self, node: usize) -> usize {
        self.assignment[node]
    }

    pub fn membership(&self) -> Membership {
        Membership::with_count(self.assignment.clone(), self.out.len()).expect("ids stay in range")
    }

    /// Quality if `node` were placed in `target`.
    pub fn tentative(&self, node: usize, target: usize) -> Tentative {
        let from = self.assignment[node];
        if from == target {
            return Tentative {
                node,
                target,
                value: self.value(),
                intra: self.intra,
                null: self.null,
            };
        }
        let (mut to_from, mut to_target) = (0.0, 0.0);
        for &(u, w) in &self.incident[node] {
            let c = self.assignment[u];
            if c == from {
                to_from += w;
            } else if c == target {
                to_target += w;
            }
        }
        let (o, i) = (self.node_out[node], self.node_in[node]);
        let intra = self.intra - to_from + to_target;
        let null = self.null - self.out[from] * self.inc[from] - self.out[target] * self.inc[target]
            + (self.out[from] - o) * (self.inc[from] - i)
            + (self.out[target] + o) * (self.inc[target] + i);
        Tentative {
            node,
            target,
            value: quality_from_sums(self.total, intra, null),
            intra,
            null,
        }
    }

    /// Applies a move previously evaluated against this exact state.
    pub fn apply(&mut self, t: &Tentative) {
        let from = self.assignment[t.node];
        if from == t.target {
            return;
        }
        let (o, i) = (self.node_out[t.node], self.node_in[t.node]);
        self.out[from] -= o;
        self.inc[from] -= i;
        self.out[t.target] += o;
        self.inc[t.target] += i;
        self.assignment[t.node] = t.target;
        self.intra = t.intra;
        self.null = t.null;
    }
}

/// One term group of a hand-evaluated modularity change:
/// `multiplicity * (adjacency - out_degree * in_degree / 2m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContributionTerm {
    pub multiplicity: i64,
    pub adjacency: i64,
    pub out_degree: i64,
    pub in_degree: i64,
}

impl ContributionTerm {
    pub fn new(multiplicity: i64, adjacency: i64, out_degree: i64, in_degree: i64) -> Self {
        ContributionTerm {
            multiplicity,
            adjacency,
            out_degree,
            in_degree,
        }
    }
}

/// Exact sum of edge contributions to a modularity change.
pub fn contribution_sum(two_m: i64, terms: &[ContributionTerm]) -> Ratio<i64> {
    terms.iter().fold(Ratio::from_integer(0), |acc, t| {
        acc + Ratio::from_integer(t.multiplicity)
            * (Ratio::from_integer(t.adjacency) - Ratio::new(t.out_degree * t.in_degree, two_m))
    })
}
