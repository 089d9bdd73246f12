mod common;

use netlearn::booster::{coverage_exact, CoverageTable};
use netlearn::engine::{build_tables_exact, build_tables_tabulated, simulate_sequence, EngineConfig, SignalProfile};
use netlearn::families::{fragile_low_q, guinea_boosted_complete, role, LowQLayout};
use netlearn::graph::{Graph, Modification};
use netlearn::ordering::{Ordering, OrientedView};
use netlearn::seed::rng_from_seed;
use proptest::prelude::*;

fn graph_and_order(max_n: usize) -> impl Strategy<Value = (Graph, Ordering)> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (
            proptest::collection::vec(any::<bool>(), pairs),
            Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
        )
            .prop_map(move |(bits, perm)| {
                let edges: Vec<_> = (0..n)
                    .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                    .zip(bits)
                    .filter_map(|(e, b)| b.then_some(e))
                    .collect();
                (Graph::from_edges(n, &edges).unwrap(), Ordering::from_sequence(perm).unwrap())
            })
    })
}

/// Vertices with a directed path to `v`, found by trying every vertex as
/// the start of a depth-first search that only moves forward in time.
fn cone_by_path_search(view: &OrientedView<'_>, v: usize) -> Vec<usize> {
    let n = view.n();
    let mut out = Vec::new();
    for start in (0..n).filter(|&s| s != v) {
        let mut stack = vec![start];
        let mut seen = vec![false; n];
        seen[start] = true;
        let mut hit = false;
        while let Some(x) = stack.pop() {
            if x == v {
                hit = true;
                break;
            }
            for &y in view.graph.neighbors(x) {
                if !seen[y] && view.ordering.precedes(x, y) {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        if hit {
            out.push(start);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn oriented_view_is_acyclic((g, o) in graph_and_order(7)) {
        let view = OrientedView::new(&g, &o);
        for v in 0..g.n() {
            for u in view.prior_neighbors(v) {
                prop_assert!(o.position(u) < o.position(v));
                prop_assert!(!view.prior_neighbors(u).contains(&v));
            }
        }
    }

    #[test]
    fn cone_is_closure_of_prior_neighbors((g, o) in graph_and_order(6)) {
        let view = OrientedView::new(&g, &o);
        for v in 0..g.n() {
            let cone = view.ancestor_cone(v);
            prop_assert_eq!(&cone, &cone_by_path_search(&view, v));
            // Fixed point: the cone's prior neighbors add nothing new.
            for &u in &cone {
                for w in view.prior_neighbors(u) {
                    prop_assert!(cone.contains(&w));
                }
            }
        }
    }

    #[test]
    fn reachability_is_monotone((g, o) in graph_and_order(6), s_bits in any::<u8>(), extra in any::<u8>()) {
        let n = g.n();
        let view = OrientedView::new(&g, &o);
        let s: Vec<usize> = (0..n).filter(|&v| s_bits >> v & 1 == 1).collect();
        let t: Vec<usize> = (0..n).filter(|&v| (s_bits | extra) >> v & 1 == 1).collect();
        let rs = view.reachable_mask(&s);
        let rt = view.reachable_mask(&t);
        for v in 0..n {
            prop_assert!(!rs[v] || rt[v]);
        }
        for &v in &s {
            prop_assert!(rs[v]);
        }
    }

    #[test]
    fn flipping_state_and_signals_flips_actions((g, o) in graph_and_order(5), q in 0.55f64..0.95, p in any::<u8>()) {
        let n = g.n();
        let view = OrientedView::new(&g, &o);
        let t = build_tables_exact(&view, &EngineConfig::exact(q)).unwrap();
        let prof = SignalProfile((0..n).map(|v| p >> v & 1).collect());
        let flipped = SignalProfile(prof.0.iter().map(|b| 1 - b).collect());
        let a = simulate_sequence(&view, &t, 1, &prof);
        let b = simulate_sequence(&view, &t, 0, &flipped);
        for v in 0..n {
            prop_assert_eq!(a.actions[v], 1 - b.actions[v]);
            prop_assert!((a.posteriors[v] + b.posteriors[v] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn exact_engine_agrees_with_brute_force((g, o) in graph_and_order(6), q in 0.51f64..0.99) {
        let view = OrientedView::new(&g, &o);
        let t = build_tables_exact(&view, &EngineConfig::exact(q)).unwrap();
        let bf = common::brute_force(&g, &o, q);
        let n = g.n();
        for p in 0..1usize << n {
            let prof = SignalProfile((0..n).map(|v| (p >> v & 1) as u8).collect());
            prop_assert_eq!(&simulate_sequence(&view, &t, 1, &prof).actions, &bf.actions[p]);
        }
    }

    #[test]
    fn tabulated_tables_are_seed_deterministic((g, o) in graph_and_order(6), seed in any::<u64>()) {
        let view = OrientedView::new(&g, &o);
        let cfg = EngineConfig::tabulated(0.7).with_forward_samples(300);
        let a = build_tables_tabulated(&view, &cfg, &mut rng_from_seed(seed));
        let b = build_tables_tabulated(&view, &cfg, &mut rng_from_seed(seed));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn coverage_table_matches_enumeration((g, _o) in graph_and_order(6), t_bits in any::<u8>(), s_bits in any::<u8>()) {
        let n = g.n();
        let target: Vec<usize> = (0..n).filter(|&v| t_bits >> v & 1 == 1).collect();
        let seeds: Vec<usize> = (0..n).filter(|&v| s_bits >> v & 1 == 1).collect();
        let table = CoverageTable::new(&g).unwrap();
        let exact = coverage_exact(&g, &target, &seeds).unwrap();
        prop_assert!((table.coverage(&target, &seeds) - exact).abs() < 1e-9);
    }

    #[test]
    fn graph_json_round_trips((g, o) in graph_and_order(8)) {
        let back = Graph::from_json_str(&g.to_json_string()).unwrap();
        prop_assert_eq!(&back, &g);
        let s = serde_json::to_string(&o).unwrap();
        prop_assert_eq!(serde_json::from_str::<Ordering>(&s).unwrap(), o);
    }

    #[test]
    fn deletion_map_is_consistent((g, _o) in graph_and_order(7), pick in any::<usize>()) {
        let n = g.n();
        let d = pick % n;
        let (h, map) = g.apply(&Modification::DeleteVertex(d)).unwrap();
        prop_assert_eq!(h.n(), n - 1);
        prop_assert!(map[d].is_none());
        for (u, v) in g.edges() {
            if u != d && v != d {
                prop_assert!(h.has_edge(map[u].unwrap(), map[v].unwrap()));
            }
        }
        prop_assert_eq!(h.edge_count(), g.edge_count() - g.degree(d));
    }
}

#[test]
fn guinea_core_is_complete() {
    for (n, g, h) in [(6, 2, 3), (10, 10, 1), (8, 0, 4)] {
        let inst = guinea_boosted_complete(n, g, h).unwrap();
        let graph = &inst.graph;
        let core: Vec<usize> = (0..graph.n()).filter(|&v| graph.degree(v) > 1).collect();
        if n > 2 {
            assert_eq!(core, (0..n).collect::<Vec<_>>());
        }
        for &u in &core {
            for &v in &core {
                assert_eq!(graph.has_edge(u, v), u != v);
            }
        }
        assert_eq!(inst.with_role(role::GUINEA).len(), g * h);
    }
}

#[test]
fn fragile_order_is_a_topological_basis() {
    for k in 1..=5 {
        let f = fragile_low_q(k, 2).unwrap();
        let l = LowQLayout { k_w: k, tail: 2 };
        let o = f.strategic_order.unwrap();
        for s in l.sources() {
            assert!(o.precedes(s, l.hub()));
        }
        for i in 0..k {
            assert!(o.precedes(l.hub(), l.w(i)));
            assert!(o.precedes(l.w_prime(i), l.w(i)));
            assert!(o.precedes(l.w(i), l.u0()));
        }
        assert!(o.precedes(l.u0(), l.chain(0)) && o.precedes(l.chain(0), l.chain(1)));
    }
}
