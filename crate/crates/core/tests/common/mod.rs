//! Independent oracles and graph builders shared by the integration tests.
//!
//! Nothing here calls into the modularity or community code of the library;
//! the oracles recompute everything from plain edge lists.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use repkg_core::{DependencyGraph, Edge, Node};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Q = (1/T) sum_ij [A_ij - out_i in_j / T] delta(c_i, c_j), straight from
/// an edge list.
pub fn oracle_q(n: usize, edges: &[(usize, usize, f64)], membership: &[usize]) -> f64 {
    let total: f64 = edges.iter().map(|e| e.2).sum();
    let mut out = vec![0.0; n];
    let mut inc = vec![0.0; n];
    for &(u, v, w) in edges {
        out[u] += w;
        inc[v] += w;
    }
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if membership[i] != membership[j] {
                continue;
            }
            let a: f64 = edges.iter().filter(|e| e.0 == i && e.1 == j).map(|e| e.2).sum();
            q += a - out[i] * inc[j] / total;
        }
    }
    q / total
}

pub fn edge_list(g: &DependencyGraph) -> Vec<(usize, usize, f64)> {
    g.edges().iter().map(|e| (e.source, e.target, e.weight)).collect()
}

pub fn graph_q(g: &DependencyGraph, membership: &[usize]) -> f64 {
    oracle_q(g.node_count(), &edge_list(g), membership)
}

/// Every set partition of `0..n` as a restricted growth string.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, n: usize, cur: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for c in 0..=k {
            cur.push(c);
            rec(i + 1, n, cur, k.max(c + 1), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, &mut Vec::new(), 0, &mut out);
    out
}

pub fn exhaustive_max_q(g: &DependencyGraph) -> (f64, Vec<usize>) {
    let edges = edge_list(g);
    partitions(g.node_count())
        .into_iter()
        .map(|p| (oracle_q(g.node_count(), &edges, &p), p))
        .fold(
            (f64::MIN, Vec::new()),
            |best, cur| if cur.0 > best.0 { cur } else { best },
        )
}

/// Betweenness by explicit enumeration of every shortest path. Returns a
/// value per stored edge; for undirected graphs unordered pairs are counted
/// once.
pub fn brute_betweenness(g: &DependencyGraph) -> Vec<f64> {
    let n = g.node_count();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|u| g.edges().iter().filter(|e| e.source == u).map(|e| e.target).collect())
        .collect();
    let mut credit = vec![0.0; g.edge_count()];
    let index = |u: usize, v: usize| g.edges().iter().position(|e| e.source == u && e.target == v).unwrap();
    for s in 0..n {
        // BFS distances
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut frontier = vec![s];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &u in &frontier {
                for &v in &adj[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        next.push(v);
                    }
                }
            }
            frontier = next;
        }
        for t in 0..n {
            if t == s || dist[t] == usize::MAX {
                continue;
            }
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut stack = vec![vec![s]];
            while let Some(p) = stack.pop() {
                let last = *p.last().unwrap();
                if last == t {
                    paths.push(p);
                    continue;
                }
                for &v in &adj[last] {
                    if dist[v] == dist[last] + 1 && dist[v] <= dist[t] {
                        let mut q = p.clone();
                        q.push(v);
                        stack.push(q);
                    }
                }
            }
            let share = 1.0 / paths.len() as f64;
            for p in &paths {
                for w in p.windows(2) {
                    credit[index(w[0], w[1])] += share;
                }
            }
        }
    }
    if g.is_directed() {
        return credit;
    }
    g.edges()
        .iter()
        .enumerate()
        .map(|(i, e)| (credit[i] + credit[index(e.target, e.source)]) / 2.0)
        .collect()
}

/// Agglomerative reference: at every step try every merge of two current
/// communities, score it with a full oracle evaluation and keep the best;
/// values within 1e-12 count as ties and go to the lowest cluster-id pair.
/// Returns the Q sequence.
pub fn reference_agglomerative(g: &DependencyGraph) -> Vec<f64> {
    let n = g.node_count();
    let edges = edge_list(g);
    let mut cluster: Vec<usize> = (0..n).collect();
    let mut ids: Vec<usize> = (0..n).collect(); // cluster id per node
    let mut qs = vec![oracle_q(n, &edges, &cluster)];
    for step in 0..n - 1 {
        let mut reps: Vec<usize> = cluster.clone();
        reps.sort();
        reps.dedup();
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for (x, &a) in reps.iter().enumerate() {
            for &b in &reps[x + 1..] {
                let trial: Vec<usize> = cluster.iter().map(|&c| if c == b { a } else { c }).collect();
                let q = oracle_q(n, &edges, &trial);
                let ia = ids[cluster.iter().position(|&c| c == a).unwrap()];
                let ib = ids[cluster.iter().position(|&c| c == b).unwrap()];
                let pair = (ia.min(ib), ia.max(ib));
                let better = match best {
                    None => true,
                    Some((q0, p0, _, _)) => q > q0 + 1e-12 || ((q - q0).abs() <= 1e-12 && pair < p0),
                };
                if better {
                    best = Some((q, pair, a, b));
                }
            }
        }
        let (q, _, a, b) = best.unwrap();
        for v in 0..n {
            if cluster[v] == b {
                cluster[v] = a;
            }
            if cluster[v] == a {
                ids[v] = n + step;
            }
        }
        qs.push(q);
    }
    qs
}

pub fn two_triangles(labels: [&str; 6], directed: bool) -> DependencyGraph {
    DependencyGraph::from_edge_list(
        &labels,
        &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)],
        directed,
    )
    .unwrap()
}

pub const KARATE: [(usize, usize); 78] = [
    (0, 1),
    (0, 2),
    (0, 3),
    (0, 4),
    (0, 5),
    (0, 6),
    (0, 7),
    (0, 8),
    (0, 10),
    (0, 11),
    (0, 12),
    (0, 13),
    (0, 17),
    (0, 19),
    (0, 21),
    (0, 31),
    (1, 2),
    (1, 3),
    (1, 7),
    (1, 13),
    (1, 17),
    (1, 19),
    (1, 21),
    (1, 30),
    (2, 3),
    (2, 7),
    (2, 8),
    (2, 9),
    (2, 13),
    (2, 27),
    (2, 28),
    (2, 32),
    (3, 7),
    (3, 12),
    (3, 13),
    (4, 6),
    (4, 10),
    (5, 6),
    (5, 10),
    (5, 16),
    (6, 16),
    (8, 30),
    (8, 32),
    (8, 33),
    (9, 33),
    (13, 33),
    (14, 32),
    (14, 33),
    (15, 32),
    (15, 33),
    (18, 32),
    (18, 33),
    (19, 33),
    (20, 32),
    (20, 33),
    (22, 32),
    (22, 33),
    (23, 25),
    (23, 27),
    (23, 29),
    (23, 32),
    (23, 33),
    (24, 25),
    (24, 27),
    (24, 31),
    (25, 31),
    (26, 29),
    (26, 33),
    (27, 33),
    (28, 31),
    (28, 33),
    (29, 32),
    (29, 33),
    (30, 32),
    (30, 33),
    (31, 32),
    (31, 33),
    (32, 33),
];

pub fn karate() -> DependencyGraph {
    let labels: Vec<String> = (0..34).map(|i| format!("club.M{i}")).collect();
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    DependencyGraph::from_edge_list(&refs, &KARATE, false).unwrap()
}

/// Three sources depend on two middle classes which depend on three sinks,
/// packaged by column.
pub fn citation_motif() -> DependencyGraph {
    let labels = [
        "src.S0", "src.S1", "src.S2", "mid.M0", "mid.M1", "snk.T0", "snk.T1", "snk.T2",
    ];
    let mut edges = Vec::new();
    for s in 0..3 {
        for m in 3..5 {
            edges.push((s, m));
        }
    }
    for m in 3..5 {
        for t in 5..8 {
            edges.push((m, t));
        }
    }
    DependencyGraph::from_edge_list(&labels, &edges, true).unwrap()
}

/// Client package (bidirected 4-cycle) whose classes each depend on one
/// class of a stable package (bidirected 4-cycle).
pub fn bidirected_motif() -> DependencyGraph {
    let labels = [
        "client.C0",
        "client.C1",
        "client.C2",
        "client.C3",
        "stable.S0",
        "stable.S1",
        "stable.S2",
        "stable.S3",
    ];
    let mut edges = Vec::new();
    for base in [0, 4] {
        for k in 0..4 {
            let (u, v) = (base + k, base + (k + 1) % 4);
            edges.push((u, v));
            edges.push((v, u));
        }
    }
    for k in 0..4 {
        edges.push((k, k + 4));
    }
    DependencyGraph::from_edge_list(&labels, &edges, true).unwrap()
}

/// A pair of configurations around a border movement `(i, c_i, c_j)`.
pub struct PropositionPair {
    /// Remark-1 configuration: i has out > in, j has out < in.
    pub satisfied: DependencyGraph,
    /// Remark-2 configuration: i has out < in, j has out > in.
    pub violated: DependencyGraph,
    pub i: usize,
    pub j: usize,
    pub membership: Vec<usize>,
}

/// Builds the configuration pair for extra degrees `alpha > beta >= 1` and
/// `feeders` classes depending on the destination package.
///
/// Layout: destination package `dst` = {j, r0, r1, r2} with a cycle on the
/// r's and `j -> r0`; source package `src` = {i, s} with `s -> i` and the
/// border edge `i -> j`; `feeders` classes in `fed` each depend on two r's;
/// `alpha + beta` leaf classes each in their own package. Remark 1 wires
/// `i -> leaf` (alpha) and `leaf -> j` (beta); Remark 2 reverses exactly
/// those leaf edges.
pub fn proposition_pair(alpha: usize, beta: usize, feeders: usize) -> PropositionPair {
    assert!(alpha > beta && beta >= 1);
    let mut labels: Vec<String> = vec![
        "dst.J".into(),
        "dst.R0".into(),
        "dst.R1".into(),
        "dst.R2".into(),
        "src.I".into(),
        "src.S".into(),
    ];
    let (j, i, s) = (0, 4, 5);
    let mut base = vec![(1, 2), (2, 3), (3, 1), (j, 1), (s, i), (i, j)];
    for f in 0..feeders {
        labels.push(format!("fed.F{f}"));
        let node = labels.len() - 1;
        base.push((node, 1 + f % 3));
        base.push((node, 1 + (f + 1) % 3));
    }
    let first_leaf = labels.len();
    for l in 0..alpha + beta {
        labels.push(format!("leaf{l}.L"));
    }
    let alpha_leaves: Vec<usize> = (first_leaf..first_leaf + alpha).collect();
    let beta_leaves: Vec<usize> = (first_leaf + alpha..first_leaf + alpha + beta).collect();

    let mut satisfied = base.clone();
    satisfied.extend(alpha_leaves.iter().map(|&l| (i, l)));
    satisfied.extend(beta_leaves.iter().map(|&l| (l, j)));
    let mut violated = base;
    violated.extend(alpha_leaves.iter().map(|&l| (l, i)));
    violated.extend(beta_leaves.iter().map(|&l| (j, l)));

    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    let build = |edges: &[(usize, usize)]| DependencyGraph::from_edge_list(&refs, edges, true).unwrap();
    let g = build(&satisfied);
    let (m, _) = repkg_core::membership_from_labels(&g);
    PropositionPair {
        satisfied: g,
        violated: build(&violated),
        i,
        j,
        membership: m.assignment().to_vec(),
    }
}

/// Random labelled graph: `n` nodes spread over up to `packages` packages,
/// each ordered pair joined with probability `p`.
pub fn random_labeled_graph(rng: &mut impl Rng, n: usize, packages: usize, p: f64, directed: bool) -> DependencyGraph {
    let mut g = DependencyGraph::new(directed);
    for v in 0..n {
        let pkg = rng.gen_range(0..packages.max(1));
        g.add_node(Node::new(format!("p{pkg}.C{v}")));
    }
    for u in 0..n {
        let start = if directed { 0 } else { u + 1 };
        for v in start..n {
            if u != v && rng.gen_bool(p) {
                g.add_edge(u, v, 1.0).unwrap();
            }
        }
    }
    g.simplify()
}

/// Random weighted directed graph with at least one edge.
pub fn random_weighted_graph(rng: &mut impl Rng, n: usize, p: f64) -> DependencyGraph {
    loop {
        let nodes = (0..n).map(|v| Node::new(format!("w{}.C{v}", v % 3))).collect();
        let mut edges = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u != v && rng.gen_bool(p) {
                    edges.push(Edge::new(u, v, rng.gen_range(0.1..5.0)));
                }
            }
        }
        if !edges.is_empty() {
            return DependencyGraph::from_parts(nodes, edges, true).unwrap().simplify();
        }
    }
}

pub fn random_membership(rng: &mut impl Rng, n: usize, k: usize) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..k.max(1))).collect()
}
