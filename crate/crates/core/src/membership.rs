//! Community assignments and the package table derived from class labels.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::DependencyGraph;

/// Node to community assignment.
///
/// Ids are `< community_count`. Label-derived memberships are dense; the
/// output of a refactoring keeps package ids and may leave some empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Membership {
    assignment: Vec<usize>,
    community_count: usize,
}

impl Membership {
    /// Community count is one past the largest id.
    pub fn new(assignment: Vec<usize>) -> Self {
        let community_count = assignment.iter().max().map_or(0, |m| m + 1);
        Membership {
            assignment,
            community_count,
        }
    }

    pub fn with_count(assignment: Vec<usize>, community_count: usize) -> Result<Self> {
        if let Some(&id) = assignment.iter().find(|&&c| c >= community_count) {
            return Err(Error::CommunityOutOfRange {
                id,
                count: community_count,
            });
        }
        Ok(Membership {
            assignment,
            community_count,
        })
    }

    pub fn singletons(n: usize) -> Self {
        Membership::new((0..n).collect())
    }

    pub fn single(n: usize) -> Self {
        Membership {
            assignment: alloc::vec![0; n],
            community_count: usize::from(n > 0),
        }
    }

    /// Relabels arbitrary ids densely in first-appearance order.
    pub fn compacted_from(raw: &[usize]) -> Self {
        let mut map = BTreeMap::new();
        let assignment = raw
            .iter()
            .map(|c| {
                let next = map.len();
                *map.entry(*c).or_insert(next)
            })
            .collect();
        Membership {
            assignment,
            community_count: map.len(),
        }
    }

    pub fn compact(&self) -> Membership {
        Membership::compacted_from(&self.assignment)
    }

    pub fn is_dense(&self) -> bool {
        let mut seen = alloc::vec![false; self.community_count];
        for &c in &self.assignment {
            seen[c] = true;
        }
        seen.into_iter().all(|s| s)
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn into_assignment(self) -> Vec<usize> {
        self.assignment
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn community_count(&self) -> usize {
        self.community_count
    }

    pub fn community_of(&self, node: usize) -> usize {
        self.assignment[node]
    }

    pub fn members(&self, community: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&v| self.assignment[v] == community)
            .collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = alloc::vec![0; self.community_count];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }

    /// Moves `node` to `community` in place.
    pub fn reassign(&mut self, node: usize, community: usize) -> Result<()> {
        if node >= self.assignment.len() {
            return Err(Error::NodeNotFound(node));
        }
        if community >= self.community_count {
            return Err(Error::CommunityOutOfRange {
                id: community,
                count: self.community_count,
            });
        }
        self.assignment[node] = community;
        Ok(())
    }

    /// Copy with `node` reassigned.
    pub fn moved(&self, node: usize, community: usize) -> Result<Membership> {
        let mut m = self.clone();
        m.reassign(node, community)?;
        Ok(m)
    }

    /// True when both memberships describe the same partition, ignoring ids.
    pub fn same_partition(&self, other: &Membership) -> bool {
        self.len() == other.len() && self.compact() == other.compact()
    }

    pub(crate) fn check_len(&self, nodes: usize) -> Result<()> {
        if self.assignment.len() == nodes {
            Ok(())
        } else {
            Err(Error::InvalidMembership {
                expected: nodes,
                found: self.assignment.len(),
            })
        }
    }
}

/// Bijection between package names and community ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PackageTable {
    names: Vec<String>,
    ids: BTreeMap<String, usize>,
}

impl PackageTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id of `name`, inserting it with the next id if absent.
    pub fn intern(&mut self, name: &str) -> usize {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len();
        self.names.push(String::from(name));
        self.ids.insert(String::from(name), id);
        id
    }

    pub fn id(&self, name: &str) -> Option<usize> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: usize) -> Option<&str> {
        self.names.get(id).map(String::as_str)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Deterministic label for a node that arrived without one.
pub fn synthesized_label(index: usize) -> String {
    format!("anon{index}.C{index}")
}

/// Copy of `g` where every empty label is replaced by [`synthesized_label`].
pub fn ensure_labels(g: &DependencyGraph) -> DependencyGraph {
    let mut out = g.clone();
    for (i, node) in g.nodes().iter().enumerate() {
        if node.label.is_empty() {
            out.set_label(i, synthesized_label(i)).expect("index in range");
        }
    }
    out
}

/// Package part of a qualified name: everything before the last dot. A
/// label without dots is its own package.
pub fn package_name(label: &str) -> &str {
    label.rsplit_once('.').map_or(label, |(pkg, _)| pkg)
}

/// Class part of a qualified name: everything after the last dot.
pub fn class_name(label: &str) -> &str {
    label.rsplit_once('.').map_or(label, |(_, class)| class)
}

/// Derives the initial packaging from qualified class names.
///
/// Community ids follow first appearance of each package in node order. If
/// every node falls into one package the result is singleton communities,
/// each named after its node label.
pub fn membership_from_labels(g: &DependencyGraph) -> (Membership, PackageTable) {
    let labels: Vec<String> = g
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, n)| {
            if n.label.is_empty() {
                synthesized_label(i)
            } else {
                n.label.clone()
            }
        })
        .collect();

    let mut table = PackageTable::new();
    let assignment: Vec<usize> = labels.iter().map(|l| table.intern(package_name(l))).collect();

    if table.len() == 1 && assignment.len() > 1 {
        let mut singles = PackageTable::new();
        for (i, label) in labels.iter().enumerate() {
            let name = if singles.id(label).is_some() {
                format!("{label}#{i}")
            } else {
                label.clone()
            };
            singles.intern(&name);
        }
        return (Membership::singletons(labels.len()), singles);
    }

    let count = table.len();
    (
        Membership::with_count(assignment, count).expect("ids interned densely"),
        table,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{DependencyGraph, Node};
    use alloc::vec;

    #[test]
    fn package_of_trama_label() {
        assert_eq!(package_name("negocio.leitor.LeitorDeModelo"), "negocio.leitor");
        assert_eq!(class_name("negocio.leitor.LeitorDeModelo"), "LeitorDeModelo");
        assert_eq!(package_name("Main"), "Main");
        assert_eq!(class_name("Main"), "Main");
    }

    #[test]
    fn ids_follow_first_appearance() {
        let g = DependencyGraph::from_edge_list(&["z.A", "a.B", "z.C", "m.D"], &[], true).unwrap();
        let (m, t) = membership_from_labels(&g);
        assert_eq!(m.assignment(), &[0, 1, 0, 2]);
        assert_eq!(t.names(), &["z", "a", "m"]);
        assert!(m.is_dense());
    }

    #[test]
    fn single_package_falls_back_to_singletons() {
        let g = DependencyGraph::from_edge_list(&["p.A", "p.B", "p.C"], &[(0, 1)], true).unwrap();
        let (m, t) = membership_from_labels(&g);
        assert_eq!(m.assignment(), &[0, 1, 2]);
        assert_eq!(t.names(), &["p.A", "p.B", "p.C"]);
    }

    #[test]
    fn fallback_names_stay_unique() {
        let g = DependencyGraph::from_edge_list(&["p.A", "p.A"], &[], true).unwrap();
        let (_, t) = membership_from_labels(&g);
        assert_eq!(t.names(), &["p.A", "p.A#1"]);
    }

    #[test]
    fn unlabeled_nodes_get_synthesized_packages() {
        let mut g = DependencyGraph::new(true);
        g.add_node(Node::new(""));
        g.add_node(Node::new("q.X"));
        let (m, t) = membership_from_labels(&g);
        assert_eq!(t.names(), &["anon0", "q"]);
        assert_eq!(m.assignment(), &[0, 1]);
        assert_eq!(ensure_labels(&g).nodes()[0].label, "anon0.C0");
    }

    #[test]
    fn compact_and_partition_equality() {
        let m = Membership::new(vec![4, 4, 1, 3]);
        assert!(!m.is_dense());
        assert_eq!(m.compact().assignment(), &[0, 0, 1, 2]);
        assert!(m.same_partition(&Membership::new(vec![2, 2, 0, 1])));
        assert!(!m.same_partition(&Membership::new(vec![0, 1, 1, 2])));
    }

    #[test]
    fn reassign_checks_ranges() {
        let mut m = Membership::new(vec![0, 1]);
        assert!(m.reassign(0, 1).is_ok());
        assert_eq!(m.reassign(0, 2), Err(Error::CommunityOutOfRange { id: 2, count: 2 }));
        assert_eq!(m.reassign(9, 0), Err(Error::NodeNotFound(9)));
    }
}
