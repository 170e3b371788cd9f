//! Package metrics: instability, abstractness, distance from the main
//! sequence, package coupling, stable-dependency violations and border nodes.
//!
//! Afferent/efferent couplings count cross-package dependency edges, not
//! distinct classes.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::DependencyGraph;
use crate::membership::{Membership, PackageTable};

#[derive(Debug, Clone, PartialEq)]
pub struct PackageInstability {
    pub package: String,
    pub community: usize,
    /// Ca: incoming cross-package edges.
    pub afferent: usize,
    /// Ce: outgoing cross-package edges.
    pub efferent: usize,
    pub instability: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct InstabilityReport {
    pub rows: Vec<PackageInstability>,
}

impl InstabilityReport {
    pub fn get(&self, package: &str) -> Option<&PackageInstability> {
        self.rows.iter().find(|r| r.package == package)
    }

    pub fn by_community(&self, community: usize) -> Option<&PackageInstability> {
        self.rows.iter().find(|r| r.community == community)
    }

    pub fn total_afferent(&self) -> usize {
        self.rows.iter().map(|r| r.afferent).sum()
    }

    pub fn total_efferent(&self) -> usize {
        self.rows.iter().map(|r| r.efferent).sum()
    }
}

/// `Ce / (Ca + Ce)`, or 0 for a package with no cross dependencies.
pub fn instability(afferent: usize, efferent: usize) -> f64 {
    if afferent + efferent == 0 {
        0.0
    } else {
        efferent as f64 / (afferent + efferent) as f64
    }
}

fn check_table(m: &Membership, table: &PackageTable) -> Result<()> {
    match m.assignment().iter().find(|&&c| c >= table.len()) {
        Some(&c) => Err(Error::PackageNotFound(c)),
        None => Ok(()),
    }
}

/// One row per package that still has members, in package-id order.
pub fn instability_report(g: &DependencyGraph, m: &Membership, table: &PackageTable) -> Result<InstabilityReport> {
    m.check_len(g.node_count())?;
    check_table(m, table)?;
    let mut afferent = alloc::vec![0usize; table.len()];
    let mut efferent = alloc::vec![0usize; table.len()];
    for e in g.edges() {
        let (s, t) = (m.community_of(e.source), m.community_of(e.target));
        if s != t {
            efferent[s] += 1;
            afferent[t] += 1;
        }
    }
    let mut populated = alloc::vec![false; table.len()];
    for &c in m.assignment() {
        populated[c] = true;
    }
    let rows = (0..table.len())
        .filter(|&c| populated[c])
        .map(|c| PackageInstability {
            package: String::from(table.name(c).expect("checked above")),
            community: c,
            afferent: afferent[c],
            efferent: efferent[c],
            instability: instability(afferent[c], efferent[c]),
        })
        .collect();
    Ok(InstabilityReport { rows })
}

/// `A = Na / Nc`.
pub fn abstractness(abstract_count: usize, class_count: usize) -> Result<f64> {
    if class_count == 0 {
        return Err(Error::UndefinedAbstractness);
    }
    if abstract_count > class_count {
        return Err(Error::InvalidAbstractCount {
            abstract_count,
            class_count,
        });
    }
    Ok(abstract_count as f64 / class_count as f64)
}

/// Abstractness of each populated package; `None` when some member lacks the
/// abstract flag.
pub fn package_abstractness(
    g: &DependencyGraph,
    m: &Membership,
    table: &PackageTable,
) -> Result<Vec<(String, Option<f64>)>> {
    m.check_len(g.node_count())?;
    check_table(m, table)?;
    let mut out = Vec::new();
    for c in 0..table.len() {
        let members = m.members(c);
        if members.is_empty() {
            continue;
        }
        let flags: Option<Vec<bool>> = members.iter().map(|&v| g.nodes()[v].is_abstract).collect();
        let value = match flags {
            Some(flags) => Some(abstractness(flags.iter().filter(|f| **f).count(), flags.len())?),
            None => None,
        };
        out.push((String::from(table.name(c).expect("checked above")), value));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MainSequenceDistance {
    /// `D = |A + I - 1| / sqrt(2)`, the Euclidean distance to the line.
    pub distance: f64,
    /// `D' = |A + I - 1|`, in `[0, 1]`.
    pub normalized: f64,
}

/// Which side of the main sequence `A + I = 1` a package sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Zone {
    /// `A + I < 1`: stable and concrete, towards (0, 0).
    Pain,
    /// `A + I > 1`: abstract and unstable, towards (1, 1).
    Uselessness,
    MainSequence,
}

pub fn main_sequence_distance(abstractness: f64, instability: f64) -> MainSequenceDistance {
    let normalized = (abstractness + instability - 1.0).abs();
    MainSequenceDistance {
        distance: normalized / core::f64::consts::SQRT_2,
        normalized,
    }
}

pub fn zone(abstractness: f64, instability: f64) -> Zone {
    let s = abstractness + instability;
    if s < 1.0 {
        Zone::Pain
    } else if s > 1.0 {
        Zone::Uselessness
    } else {
        Zone::MainSequence
    }
}

/// Coupling between two packages: relations from `a` to `b` plus relations
/// from `b` to `a`, weighted by edge weight (unit weights count pairs).
pub fn coupling(g: &DependencyGraph, a: usize, b: usize, m: &Membership) -> Result<f64> {
    m.check_len(g.node_count())?;
    for p in [a, b] {
        if p >= m.community_count() {
            return Err(Error::PackageNotFound(p));
        }
    }
    Ok(g.edges()
        .iter()
        .filter(|e| {
            let (s, t) = (m.community_of(e.source), m.community_of(e.target));
            (s == a && t == b) || (s == b && t == a)
        })
        .map(|e| e.weight)
        .sum())
}

/// A dependency from a more stable package onto a less stable one.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpViolation {
    pub source: String,
    pub target: String,
    pub source_instability: f64,
    pub target_instability: f64,
    /// `(source class label, target class label)` for every offending edge.
    pub witnesses: Vec<(String, String)>,
}

pub fn sdp_violations(g: &DependencyGraph, m: &Membership, table: &PackageTable) -> Result<Vec<SdpViolation>> {
    let report = instability_report(g, m, table)?;
    let inst: BTreeMap<usize, f64> = report.rows.iter().map(|r| (r.community, r.instability)).collect();
    let mut grouped: BTreeMap<(usize, usize), Vec<(String, String)>> = BTreeMap::new();
    for e in g.edges() {
        let (s, t) = (m.community_of(e.source), m.community_of(e.target));
        if s != t && inst[&s] < inst[&t] {
            grouped
                .entry((s, t))
                .or_default()
                .push((g.nodes()[e.source].label.clone(), g.nodes()[e.target].label.clone()));
        }
    }
    let name = |c: usize| String::from(table.name(c).expect("checked by report"));
    let mut out: Vec<SdpViolation> = grouped
        .into_iter()
        .map(|((s, t), witnesses)| SdpViolation {
            source: name(s),
            target: name(t),
            source_instability: inst[&s],
            target_instability: inst[&t],
            witnesses,
        })
        .collect();
    out.sort_by(|a, b| (&a.source, &a.target).cmp(&(&b.source, &b.target)));
    Ok(out)
}

/// Nodes incident to at least one cross-community edge.
pub fn border_nodes(g: &DependencyGraph, m: &Membership) -> Result<BTreeSet<usize>> {
    m.check_len(g.node_count())?;
    let mut out = BTreeSet::new();
    for e in g.edges() {
        if m.community_of(e.source) != m.community_of(e.target) {
            out.insert(e.source);
            out.insert(e.target);
        }
    }
    Ok(out)
}
