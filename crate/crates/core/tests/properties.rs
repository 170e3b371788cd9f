mod common;

use common::*;
use proptest::prelude::*;
use repkg_core::metrics::{coupling, instability_report, sdp_violations};
use repkg_core::modularity::{modularity_directed, modularity_undirected};
use repkg_core::refactor::{naive_transform, refactor, refactor_from, replay, Mode};
use repkg_core::{membership_from_labels, DependencyGraph, Edge, Edit, Membership, Node};

fn arb_graph(max_nodes: usize) -> impl Strategy<Value = DependencyGraph> {
    (1..=max_nodes).prop_flat_map(|n| {
        (
            Just(n),
            proptest::collection::vec((0..n, 0..n, 1u8..4), 0..(n * n + 1)),
            proptest::collection::vec(0usize..3, n),
        )
            .prop_map(|(n, edges, pkgs)| {
                let nodes = (0..n).map(|v| Node::new(format!("p{}.C{v}", pkgs[v]))).collect();
                let edges = edges.into_iter().map(|(s, t, w)| Edge::new(s, t, w as f64)).collect();
                DependencyGraph::from_parts(nodes, edges, true).unwrap()
            })
    })
}

fn arb_graph_with_membership(max_nodes: usize) -> impl Strategy<Value = (DependencyGraph, Vec<usize>)> {
    arb_graph(max_nodes).prop_flat_map(|g| {
        let n = g.node_count();
        (Just(g.simplify()), proptest::collection::vec(0usize..4, n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn simplify_is_idempotent(g in arb_graph(8)) {
        let once = g.simplify();
        prop_assert_eq!(once.simplify(), once.clone());
        prop_assert!(once.is_simple());
        let loops: f64 = g.edges().iter().filter(|e| e.source == e.target).map(|e| e.weight).sum();
        prop_assert!((once.total_weight() - (g.total_weight() - loops)).abs() < 1e-9);
    }

    #[test]
    fn condense_preserves_cross_strength((g, raw) in arb_graph_with_membership(8)) {
        let m = Membership::new(raw);
        let c = g.condense(&m).unwrap();
        let cross: f64 = g.edges().iter()
            .filter(|e| m.community_of(e.source) != m.community_of(e.target))
            .map(|e| e.weight).sum();
        prop_assert!((c.total_weight() - cross).abs() < 1e-9);
        let cs = c.strengths();
        for (community, strength) in cs.iter().enumerate() {
            let out: f64 = g.edges().iter()
                .filter(|e| m.community_of(e.source) == community && m.community_of(e.target) != community)
                .map(|e| e.weight).sum();
            let inc: f64 = g.edges().iter()
                .filter(|e| m.community_of(e.target) == community && m.community_of(e.source) != community)
                .map(|e| e.weight).sum();
            prop_assert!((strength.out - out).abs() < 1e-9);
            prop_assert!((strength.incoming - inc).abs() < 1e-9);
        }
    }

    #[test]
    fn strengths_sum_to_total(g in arb_graph(8)) {
        let g = g.simplify();
        let s = g.strengths();
        let out: f64 = s.iter().map(|x| x.out).sum();
        let inc: f64 = s.iter().map(|x| x.incoming).sum();
        prop_assert!((out - g.total_weight()).abs() < 1e-9);
        prop_assert!((inc - g.total_weight()).abs() < 1e-9);
    }

    #[test]
    fn add_remove_edge_is_inverse(g in arb_graph(6), s in 0usize..6, t in 0usize..6) {
        let g = g.simplify();
        let n = g.node_count();
        let (s, t) = (s % n, t % n);
        prop_assume!(s != t && !g.has_edge(s, t));
        let added = g.apply_edit(&Edit::AddEdge { source: s, target: t }).unwrap();
        let back = added.apply_edit(&Edit::RemoveEdge { source: s, target: t }).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn add_remove_node_is_inverse(g in arb_graph(6)) {
        let g = g.simplify();
        let added = g.apply_edit(&Edit::AddNode { label: "x.New".into() }).unwrap();
        let back = added.apply_edit(&Edit::RemoveNode { index: g.node_count() }).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn modularity_invariant_under_relabeling((g, raw) in arb_graph_with_membership(8), shift in 1usize..5) {
        prop_assume!(g.edge_count() > 0);
        let relabeled: Vec<usize> = raw.iter().map(|c| (c + shift) % 4 + 10).collect();
        let a = modularity_directed(&g, &Membership::new(raw.clone())).unwrap().value;
        let b = modularity_directed(&g, &Membership::new(relabeled)).unwrap().value;
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn modularity_invariant_under_node_reordering((g, raw) in arb_graph_with_membership(7)) {
        prop_assume!(g.edge_count() > 0);
        let n = g.node_count();
        // reverse node order
        let perm = |v: usize| n - 1 - v;
        let nodes = (0..n).map(|v| g.nodes()[perm(v)].clone()).collect();
        let edges = g.edges().iter().map(|e| Edge::new(perm(e.source), perm(e.target), e.weight)).collect();
        let h = DependencyGraph::from_parts(nodes, edges, true).unwrap();
        let m2: Vec<usize> = (0..n).map(|v| raw[perm(v)]).collect();
        let a = modularity_directed(&g, &Membership::new(raw)).unwrap().value;
        let b = modularity_directed(&h, &Membership::new(m2)).unwrap().value;
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn modularity_invariant_under_weight_scaling((g, raw) in arb_graph_with_membership(8), scale in 0.1f64..20.0) {
        prop_assume!(g.edge_count() > 0);
        let edges = g.edges().iter().map(|e| Edge::new(e.source, e.target, e.weight * scale)).collect();
        let h = DependencyGraph::from_parts(g.nodes().to_vec(), edges, true).unwrap();
        let m = Membership::new(raw);
        let a = modularity_directed(&g, &m).unwrap().value;
        let b = modularity_directed(&h, &m).unwrap().value;
        prop_assert!((a - b).abs() < 1e-12);
        let (su, hu) = (naive_transform(&g), naive_transform(&h));
        let a = modularity_undirected(&su, &m).unwrap().value;
        let b = modularity_undirected(&hu, &m).unwrap().value;
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn coupling_is_symmetric((g, raw) in arb_graph_with_membership(8), a in 0usize..4, b in 0usize..4) {
        let m = Membership::with_count(raw, 4).unwrap();
        prop_assert_eq!(coupling(&g, a, b, &m).unwrap(), coupling(&g, b, a, &m).unwrap());
    }

    #[test]
    fn instability_sums_match_cross_edges(g in arb_graph(9)) {
        let g = g.simplify();
        let (m, t) = membership_from_labels(&g);
        let r = instability_report(&g, &m, &t).unwrap();
        let cross = g.edges().iter().filter(|e| m.community_of(e.source) != m.community_of(e.target)).count();
        prop_assert_eq!(r.total_afferent(), cross);
        prop_assert_eq!(r.total_efferent(), cross);
        for row in &r.rows {
            prop_assert!((0.0..=1.0).contains(&row.instability));
        }
    }

    #[test]
    fn instability_invariant_under_relabeling(g in arb_graph(9)) {
        let g = g.simplify();
        let (m, t) = membership_from_labels(&g);
        let r = instability_report(&g, &m, &t).unwrap();
        // swap package ids 0 and 1 (names follow)
        prop_assume!(t.len() >= 2);
        let mut swapped = repkg_core::PackageTable::new();
        swapped.intern(t.name(1).unwrap());
        swapped.intern(t.name(0).unwrap());
        for name in &t.names()[2..] {
            swapped.intern(name);
        }
        let m2 = Membership::new(m.assignment().iter().map(|&c| match c { 0 => 1, 1 => 0, c => c }).collect());
        let r2 = instability_report(&g, &m2, &swapped).unwrap();
        for row in &r.rows {
            let other = r2.get(&row.package).unwrap();
            prop_assert_eq!((row.afferent, row.efferent), (other.afferent, other.efferent));
        }
    }

    #[test]
    fn sdp_empty_iff_order_consistent(g in arb_graph(8)) {
        let g = g.simplify();
        let (m, t) = membership_from_labels(&g);
        let r = instability_report(&g, &m, &t).unwrap();
        let consistent = g.edges().iter().all(|e| {
            let (s, d) = (m.community_of(e.source), m.community_of(e.target));
            s == d || r.by_community(s).unwrap().instability >= r.by_community(d).unwrap().instability
        });
        prop_assert_eq!(sdp_violations(&g, &m, &t).unwrap().is_empty(), consistent);
    }

    #[test]
    fn undirected_equals_directed_on_symmetric_input(g in arb_graph(7)) {
        let s = naive_transform(&g);
        prop_assume!(s.edge_count() > 0);
        let (m, t) = membership_from_labels(&s);
        let und = refactor(&s, Mode::Undirected).unwrap();
        let dir = refactor_from(&s, m, t, Mode::Directed).unwrap();
        prop_assert_eq!(&und.movements, &dir.movements);
        prop_assert_eq!(&und.membership, &dir.membership);
    }

    #[test]
    fn refactor_replays_and_is_locally_optimal(g in arb_graph(7)) {
        let g = g.simplify();
        prop_assume!(g.edge_count() > 0);
        let r = refactor(&g, Mode::Directed).unwrap();
        prop_assert_eq!(replay(&r.initial_membership, &r.movements).unwrap(), r.membership.clone());
        prop_assert!(r.final_q >= r.initial_q);
        let edges = edge_list(&g);
        let n = g.node_count();
        let fin = graph_q(&g, r.membership.assignment());
        prop_assert!((fin - r.final_q).abs() < 1e-12);
        for v in 0..n {
            for u in 0..n {
                let mut trial = r.membership.assignment().to_vec();
                trial[v] = trial[u];
                prop_assert!(oracle_q(n, &edges, &trial) <= fin + 1e-12);
            }
        }
    }
}

#[test]
fn undirected_and_directed_agree_on_random_symmetric_graphs() {
    let mut r = rng(50);
    let mut checked = 0;
    while checked < 50 {
        let n = rand::Rng::gen_range(&mut r, 2..12);
        let g = random_labeled_graph(&mut r, n, 3, 0.4, false);
        if g.edge_count() == 0 {
            continue;
        }
        let m = Membership::new(random_membership(&mut r, n, 3));
        let u = modularity_undirected(&g, &m).unwrap();
        let d = modularity_directed(&g, &m).unwrap();
        assert_eq!(u.value, d.value);
        assert_eq!(u.total_weight, d.total_weight);
        checked += 1;
    }
}

#[test]
fn single_community_is_exactly_zero() {
    let mut r = rng(77);
    for _ in 0..100 {
        let n = rand::Rng::gen_range(&mut r, 2..15);
        let g = random_weighted_graph(&mut r, n, 0.3);
        let one = Membership::single(n);
        assert_eq!(modularity_directed(&g, &one).unwrap().value, 0.0);
        assert_eq!(modularity_undirected(&naive_transform(&g), &one).unwrap().value, 0.0);
    }
}

#[test]
fn removing_cross_edges_zeroes_instability() {
    let g = DependencyGraph::from_edge_list(&["a.X", "a.Y", "b.Z", "c.W"], &[(0, 2), (3, 1), (0, 1), (2, 3)], true)
        .unwrap();
    let g = g
        .apply_edit(&Edit::RemoveEdge { source: 0, target: 2 })
        .unwrap()
        .apply_edit(&Edit::RemoveEdge { source: 3, target: 1 })
        .unwrap();
    let (m, t) = membership_from_labels(&g);
    let r = instability_report(&g, &m, &t).unwrap();
    assert_eq!(r.get("a").unwrap().instability, 0.0);
}
