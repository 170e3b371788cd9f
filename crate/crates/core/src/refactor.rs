//! Greedy package refactoring over the directed, weighted package
//! dependency network.
//!
//! Starting from the packaging encoded in class labels, every node is
//! tentatively placed in the community of every other node. The first node
//! whose best placement strictly raises modularity is moved, the movement is
//! recorded and the scan restarts from the first node. The loop ends when a
//! full scan moves nothing.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::DependencyGraph;
use crate::membership::{class_name, ensure_labels, membership_from_labels, Membership, PackageTable};
use crate::metrics::InstabilityReport;
use crate::modularity::{QualityState, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Directed modularity on the dependency graph as given.
    Directed,
    /// Undirected modularity after discarding edge directions.
    Undirected,
}

impl Mode {
    pub fn variant(self) -> Variant {
        match self {
            Mode::Directed => Variant::Directed,
            Mode::Undirected => Variant::Undirected,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Directed => "directed",
            Mode::Undirected => "undirected",
        }
    }
}

/// Suggested relocation of one class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Movement {
    pub node: usize,
    /// Full qualified label of the class.
    pub class_label: String,
    pub from: String,
    pub to: String,
    pub from_community: usize,
    pub to_community: usize,
    pub step: usize,
}

impl Movement {
    /// Unqualified class name, as shown in suggestion lists.
    pub fn class_name(&self) -> &str {
        class_name(&self.class_label)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefactorResult {
    pub mode: Mode,
    pub initial_q: f64,
    pub final_q: f64,
    pub initial_membership: Membership,
    /// Final packaging, in the id space of `packages`.
    pub membership: Membership,
    pub packages: PackageTable,
    pub movements: Vec<Movement>,
}

/// Drops edge directions: every `(u, v, w)` becomes `u <-> v` with weight
/// `w`, antiparallel pairs merge by summing, self-loops go away.
pub fn naive_transform(g: &DependencyGraph) -> DependencyGraph {
    let mut out = DependencyGraph::new(false);
    for node in g.nodes() {
        out.add_node(node.clone());
    }
    for e in g.edges() {
        out.add_edge(e.source, e.target, e.weight)
            .expect("edge of a valid graph");
    }
    out.simplify()
}

/// Runs the refactoring on `g` with the label-derived initial packaging.
pub fn refactor(g: &DependencyGraph, mode: Mode) -> Result<RefactorResult> {
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let labeled = ensure_labels(&g.simplify());
    let (initial, packages) = membership_from_labels(&labeled);
    let quality_graph = match mode {
        Mode::Directed => labeled,
        Mode::Undirected => naive_transform(&labeled),
    };
    refactor_from(&quality_graph, initial, packages, mode)
}

/// Runs the refactoring loop from an explicit initial packaging.
///
/// `g` is the graph modularity is evaluated on; for [`Mode::Undirected`] it
/// must already be symmetric. Locked nodes are never moved.
pub fn refactor_from(
    g: &DependencyGraph,
    initial: Membership,
    packages: PackageTable,
    mode: Mode,
) -> Result<RefactorResult> {
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    if mode == Mode::Undirected && !g.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    if initial.community_count() > packages.len() {
        return Err(Error::PackageNotFound(packages.len()));
    }
    let n = g.node_count();
    let mut state = QualityState::new(g, &initial)?;
    let mut q = state.value();
    let initial_q = q;
    // running best, kept across restarts
    let mut q_best = -1.0;
    let mut movements = Vec::new();
    let mut seen = vec![usize::MAX; initial.community_count()];

    'scan: loop {
        for i in 0..n {
            if g.nodes()[i].is_locked() {
                continue;
            }
            let mut selected = None;
            for j in 0..n {
                let c = state.community_of(j);
                // a community already tried for this node cannot beat itself
                if seen[c] == i {
                    continue;
                }
                seen[c] = i;
                let t = state.tentative(i, c);
                if t.value > q_best {
                    q_best = t.value;
                    selected = Some(t);
                }
            }
            seen.iter_mut().for_each(|s| *s = usize::MAX);
            if q_best > q {
                let t = selected.expect("a strict improvement was found while scanning this node");
                let from = state.community_of(i);
                movements.push(Movement {
                    node: i,
                    class_label: g.nodes()[i].label.clone(),
                    from: String::from(packages.name(from).expect("checked above")),
                    to: String::from(packages.name(t.target).expect("checked above")),
                    from_community: from,
                    to_community: t.target,
                    step: movements.len(),
                });
                state.apply(&t);
                q = q_best;
                continue 'scan;
            }
        }
        break;
    }

    Ok(RefactorResult {
        mode,
        initial_q,
        final_q: q,
        initial_membership: initial,
        membership: state.membership(),
        packages,
        movements,
    })
}

/// Applies `movements` in order to `initial`.
pub fn replay(initial: &Membership, movements: &[Movement]) -> Result<Membership> {
    let mut m = initial.clone();
    for mv in movements {
        if m.community_of(mv.node) != mv.from_community {
            return Err(Error::CommunityOutOfRange {
                id: mv.from_community,
                count: m.community_count(),
            });
        }
        m.reassign(mv.node, mv.to_community)?;
    }
    Ok(m)
}

/// Original, directed-refactored and undirected-refactored instability of
/// one package; `None` marks a package that no longer has members.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub package: String,
    pub original: Option<f64>,
    pub directed: Option<f64>,
    pub undirected: Option<f64>,
}

pub fn compare_report(
    original: &InstabilityReport,
    directed: &InstabilityReport,
    undirected: &InstabilityReport,
) -> Vec<ComparisonRow> {
    let lookup = |r: &InstabilityReport, name: &str| r.get(name).map(|p| p.instability);
    original
        .rows
        .iter()
        .map(|row| ComparisonRow {
            package: row.package.clone(),
            original: Some(row.instability),
            directed: lookup(directed, &row.package),
            undirected: lookup(undirected, &row.package),
        })
        .collect()
}
