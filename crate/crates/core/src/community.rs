//! Undirected community detection: greedy agglomerative modularity merging
//! and divisive edge-betweenness clustering, both recorded as dendrograms.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{DependencyGraph, Node};
use crate::membership::Membership;
use crate::modularity::modularity_undirected;

/// Hierarchy of partitions.
///
/// Leaves are nodes `0..n`; merge `k` joins two clusters and creates cluster
/// `n + k`. `q[k]` is the modularity after `k` merges.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub merges: Vec<(usize, usize)>,
    pub q: Vec<f64>,
    pub best_cut: usize,
    node_count: usize,
}

impl Dendrogram {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Partition after the first `step` merges, ids compacted.
    pub fn cut(&self, step: usize) -> Membership {
        let n = self.node_count;
        let mut parent: Vec<usize> = (0..n + self.merges.len()).collect();
        for (k, &(a, b)) in self.merges.iter().take(step).enumerate() {
            parent[a] = n + k;
            parent[b] = n + k;
        }
        let root = |mut x: usize| {
            while parent[x] != x {
                x = parent[x];
            }
            x
        };
        let raw: Vec<usize> = (0..n).map(root).collect();
        Membership::compacted_from(&raw)
    }

    pub fn best(&self) -> Membership {
        self.cut(self.best_cut)
    }
}

fn first_max(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn check_input(g: &DependencyGraph) -> Result<()> {
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    if g.edge_count() == 0 {
        return Err(Error::UndefinedModularity);
    }
    if !g.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    Ok(())
}

/// Greedy agglomerative modularity optimization.
///
/// Starts from singletons and at every step merges the pair of communities
/// with the largest modularity gain, until one community remains. Ties go to
/// the lowest pair of cluster ids. Returns the cut with the highest Q.
pub fn fast_greedy(g: &DependencyGraph) -> Result<(Dendrogram, Membership)> {
    check_input(g)?;
    let n = g.node_count();
    let total = g.total_weight();

    // slot-indexed: a merged community lives in the slot of its first member
    let mut between = vec![0.0; n * n];
    let mut strength = vec![0.0; n];
    let mut intra = 0.0;
    for e in g.edges() {
        if e.source == e.target {
            intra += e.weight;
        } else {
            between[e.source * n + e.target] += e.weight;
        }
        strength[e.source] += e.weight;
    }
    let mut null: f64 = strength.iter().map(|k| k * k).sum();
    let mut cluster_id: Vec<usize> = (0..n).collect();
    let mut active: Vec<usize> = (0..n).collect();

    let mut merges = Vec::with_capacity(n - 1);
    let mut q = Vec::with_capacity(n);
    q.push((total * intra - null) / (total * total));

    for step in 0..n - 1 {
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for (ai, &a) in active.iter().enumerate() {
            for &b in &active[ai + 1..] {
                // proportional to the modularity gain of merging a and b
                let gain = total * between[a * n + b] - strength[a] * strength[b];
                let ids = ordered(cluster_id[a], cluster_id[b]);
                let better = match best {
                    None => true,
                    Some((g0, ids0, _, _)) => gain > g0 || (gain == g0 && ids < ids0),
                };
                if better {
                    best = Some((gain, ids, a, b));
                }
            }
        }
        let (_, ids, a, b) = best.expect("at least two active communities");
        let (keep, gone) = (a.min(b), a.max(b));
        intra += 2.0 * between[keep * n + gone];
        null += 2.0 * strength[keep] * strength[gone];
        for c in 0..n {
            between[keep * n + c] += between[gone * n + c];
            between[c * n + keep] += between[c * n + gone];
        }
        between[keep * n + keep] = 0.0;
        strength[keep] += strength[gone];
        active.retain(|&s| s != gone);
        cluster_id[keep] = n + step;
        merges.push(ids);
        q.push((total * intra - null) / (total * total));
    }

    let best_cut = first_max(&q);
    let d = Dendrogram {
        merges,
        q,
        best_cut,
        node_count: n,
    };
    let m = d.best();
    Ok((d, m))
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Shortest-path edge betweenness with unit edge lengths.
///
/// Values are aligned with `g.edges()`. Directed graphs count ordered pairs
/// along directed paths; undirected graphs count each unordered pair once
/// and both stored directions of an edge carry the same value.
pub fn edge_betweenness(g: &DependencyGraph) -> Vec<f64> {
    let n = g.node_count();
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (idx, e) in g.edges().iter().enumerate() {
        if e.source != e.target {
            adjacency[e.source].push((e.target, idx));
        }
    }
    let mut credit = vec![0.0; g.edge_count()];

    let mut order = Vec::with_capacity(n);
    let mut preds: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0f64; n];
    let mut queue = VecDeque::new();

    for s in 0..n {
        order.clear();
        for v in 0..n {
            preds[v].clear();
            sigma[v] = 0.0;
            dist[v] = usize::MAX;
            delta[v] = 0.0;
        }
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &(w, idx) in &adjacency[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push((v, idx));
                }
            }
        }
        for &w in order.iter().rev() {
            for &(v, idx) in &preds[w] {
                let c = sigma[v] / sigma[w] * (1.0 + delta[w]);
                credit[idx] += c;
                delta[v] += c;
            }
        }
    }

    if g.is_directed() {
        return credit;
    }
    let mut index = alloc::collections::BTreeMap::new();
    for (idx, e) in g.edges().iter().enumerate() {
        index.insert((e.source, e.target), idx);
    }
    g.edges()
        .iter()
        .enumerate()
        .map(|(idx, e)| {
            let back = index.get(&(e.target, e.source)).map_or(0.0, |&r| credit[r]);
            (credit[idx] + back) / 2.0
        })
        .collect()
}

fn components(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut adjacency = vec![Vec::new(); n];
    for &(u, v) in edges {
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &w in &adjacency[v] {
                if comp[w] == usize::MAX {
                    comp[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    comp
}

/// Divisive clustering by repeatedly removing the edge of highest
/// betweenness.
///
/// Betweenness is recomputed after every removal. Values within a relative
/// `1e-9` of the maximum are treated as ties and the lowest `(source,
/// target)` pair is removed. Splits are recorded in reverse as merges.
pub fn girvan_newman(g: &DependencyGraph) -> Result<(Dendrogram, Membership)> {
    let (dendrogram, _removed) = girvan_newman_trace(g)?;
    let m = dendrogram.best();
    Ok((dendrogram, m))
}

/// Like [`girvan_newman`], also returning the removed edges in order.
pub fn girvan_newman_trace(g: &DependencyGraph) -> Result<(Dendrogram, Vec<(usize, usize)>)> {
    check_input(g)?;
    let n = g.node_count();
    let mut remaining: Vec<(usize, usize)> = g
        .simplify()
        .edges()
        .iter()
        .filter(|e| e.source < e.target)
        .map(|e| (e.source, e.target))
        .collect();

    let mut removed = Vec::with_capacity(remaining.len());
    // (component before the split, one side of the split)
    let mut splits: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    let mut comp = components(n, &remaining);

    while !remaining.is_empty() {
        let work = unit_graph(n, &remaining);
        let eb = edge_betweenness(&work);
        // stored edges of `work` are sorted, so index order is (source, target) order
        let max = eb.iter().cloned().fold(f64::MIN, f64::max);
        let tolerance = 1e-9 * max.abs().max(1.0);
        let pick = work
            .edges()
            .iter()
            .zip(&eb)
            .find(|(e, &b)| e.source < e.target && b >= max - tolerance)
            .map(|(e, _)| (e.source, e.target))
            .expect("non-empty edge set");
        remaining.retain(|&e| e != pick);
        removed.push(pick);

        let next = components(n, &remaining);
        if next[pick.0] != next[pick.1] {
            let whole: Vec<usize> = (0..n).filter(|&v| comp[v] == comp[pick.0]).collect();
            let side: Vec<usize> = whole.iter().copied().filter(|&v| next[v] == next[pick.0]).collect();
            let other: Vec<usize> = whole.iter().copied().filter(|&v| next[v] == next[pick.1]).collect();
            splits.push((side, other));
        }
        comp = next;
    }

    // replay the splits backwards as merges of the singleton leaves
    let mut cluster: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(splits.len());
    for (k, (side, other)) in splits.iter().rev().enumerate() {
        let ids = ordered(cluster[side[0]], cluster[other[0]]);
        for &v in side.iter().chain(other) {
            cluster[v] = n + k;
        }
        merges.push(ids);
    }

    let mut d = Dendrogram {
        merges,
        q: Vec::new(),
        best_cut: 0,
        node_count: n,
    };
    let q: Vec<f64> = (0..=d.merges.len())
        .map(|step| modularity_undirected(g, &d.cut(step)).map(|v| v.value))
        .collect::<Result<_>>()?;
    d.best_cut = first_max(&q);
    d.q = q;
    Ok((d, removed))
}

fn unit_graph(n: usize, pairs: &[(usize, usize)]) -> DependencyGraph {
    let mut g = DependencyGraph::new(false);
    for _ in 0..n {
        g.add_node(Node::default());
    }
    for &(u, v) in pairs {
        g.add_edge(u, v, 1.0).expect("valid endpoints");
    }
    g.simplify()
}
