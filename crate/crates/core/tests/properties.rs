use std::sync::Arc;

use proptest::prelude::*;

use ckfock::carrier::{degrees_with_sum, Carrier};
use ckfock::fixtures;
use ckfock::fock::{eval_poly, Representation};
use ckfock::graph::DirectedGraph;
use ckfock::kgraph::KGraph;
use ckfock::norms::{dense_singular_values, op_norm, truncated_norm_profile, NormOptions};
use ckfock::path_space::{choose_tails, enumerate_paths, FockBasis, GammaBasis};
use ckfock::poly::random_family;
use ckfock::verify::{check_ck_defects, check_gauge, check_tck, Params};

/// Small random multigraphs; vertex names `a`, `b`, ..., edges `e0`, `e1`, ...
fn arb_graph() -> impl Strategy<Value = DirectedGraph> {
    (1usize..=3)
        .prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 1..=4)))
        .prop_map(|(n, edges)| {
            let names: Vec<String> = (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
            let mut text = format!("graph\nvertices: {}\n", names.join(" "));
            for (i, (s, r)) in edges.iter().enumerate() {
                text.push_str(&format!("edge e{i} : {} -> {}\n", names[*s], names[*r]));
            }
            DirectedGraph::parse(&text).expect("generated graph is well formed")
        })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 48,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn tails_feed_every_source(g in arb_graph(), depth in 1usize..=4) {
        let gs = g.add_tails(depth);
        for v in g.vertices() {
            prop_assert!(!gs.incoming(v).is_empty());
        }
        if !g.has_sources() {
            prop_assert_eq!(gs.to_text(), g.to_text());
        }
    }

    #[test]
    fn in_degrees_sum_to_edge_count(g in arb_graph()) {
        let total: usize = g.vertex_profiles().iter().map(|p| p.in_degree).sum();
        prop_assert_eq!(total, g.edge_count());
    }

    #[test]
    fn level_counts_follow_the_recursion(g in arb_graph(), n in 1usize..=5) {
        let big = enumerate_paths(&g, n);
        let small = enumerate_paths(&g, n - 1);
        let extensions: usize = (0..small.dim())
            .filter(|&i| small.level(i) == n - 1)
            .map(|i| g.incoming(small.label(i).source()).len())
            .sum();
        prop_assert_eq!(big.dim(), small.dim() + extensions);
    }

    #[test]
    fn relations_hold_on_random_graphs(g in arb_graph(), n in 1usize..=4) {
        let c = Carrier::from(g);
        for r in check_tck(&c, "G", Params::new(n)).unwrap() {
            prop_assert!(r.pass, "{}", r.line());
        }
        for r in check_gauge(&c, "G", Params::new(n), 5).unwrap() {
            prop_assert!(r.pass, "{}", r.line());
        }
    }

    #[test]
    fn defects_have_rank_one_after_tails(g in arb_graph(), n in 1usize..=4) {
        let c = Carrier::from(g);
        for r in check_ck_defects(&c, "G", Params::new(n)).unwrap() {
            prop_assert!(r.pass, "{}", r.line());
        }
    }

    #[test]
    fn power_iteration_is_a_lower_bound(seed in any::<u64>()) {
        let c = Carrier::from(fixtures::flag());
        let b = FockBasis::new(Arc::new(c.clone()), 5);
        for p in random_family(&c, 4, 3, seed) {
            let a = eval_poly(&p, &b).unwrap();
            let est = op_norm(&a, NormOptions::default());
            let dense = dense_singular_values(&a).first().copied().unwrap_or(0.0);
            prop_assert!(est.value <= dense + 1e-12);
            prop_assert!(dense - est.value <= 1e-8);
        }
    }

    #[test]
    fn compressions_do_not_grow_the_norm(seed in any::<u64>()) {
        let c = Carrier::from(fixtures::cuntz2());
        let levels = [1, 2, 3, 4, 5];
        for p in random_family(&c, 3, 3, seed) {
            let prof = truncated_norm_profile(&p, &c, &levels, NormOptions::default()).unwrap();
            for w in prof.windows(2) {
                prop_assert!(w[0].value <= w[1].value + 2e-10);
            }
        }
    }

    #[test]
    fn gamma_reduction_is_idempotent(m in 0usize..=3, n in 0usize..=3) {
        for (_, kg) in fixtures::kgraphs() {
            let tails = choose_tails(&kg, m);
            let gamma = GammaBasis::new(Arc::new(Carrier::from(kg)), tails, n, m).unwrap();
            for (i, c) in gamma.classes().iter().enumerate() {
                let again = gamma.reduce(c.numerator.clone(), c.vertex, c.index).unwrap();
                prop_assert_eq!(&again, c);
                let up = gamma.extend_to(c, m);
                prop_assert_eq!(gamma.reduce(up.numerator, up.vertex, up.index).unwrap(), c.clone());
                prop_assert_eq!(gamma.index_of(c), Some(i));
            }
        }
    }
}

#[test]
fn unique_factorization_counts() {
    for (name, kg) in fixtures::kgraphs() {
        let g = kg.skeleton();
        for total in 0..=3u32 {
            for m in degrees_with_sum(2, total) {
                for n in degrees_with_sum(2, 3 - total) {
                    let sum: Vec<u32> = m.iter().zip(&n).map(|(a, b)| a + b).collect();
                    for v in g.vertices() {
                        let via: usize =
                            kg.enumerate(&m, v).iter().map(|l| kg.enumerate(&n, l.source()).len()).sum();
                        assert_eq!(kg.enumerate(&sum, v).len(), via, "{name} {m:?}+{n:?}");
                    }
                }
            }
        }
    }
}

#[test]
fn one_graphs_enumerate_paths() {
    for (name, g) in fixtures::graphs().into_iter().filter(|(_, g)| !g.has_sources()) {
        let kg = KGraph::from_graph(&g).unwrap();
        let fock = enumerate_paths(&g, 4);
        let mut from_k = Vec::new();
        for len in 0..=4u32 {
            for v in g.vertices() {
                from_k.extend(kg.enumerate(&[len], v).into_iter().map(|m| m.word().to_vec()));
            }
        }
        let mut from_g: Vec<Vec<_>> = fock.labels().iter().map(|m| m.word().to_vec()).collect();
        from_k.sort();
        from_g.sort();
        assert_eq!(from_k.len(), fock.dim(), "{name}");
        assert_eq!(from_k, from_g, "{name}");
    }
}

#[test]
fn gamma_without_tails_matches_fock_labels() {
    let g = fixtures::cuntz2();
    let kg = KGraph::from_graph(&g).unwrap();
    let c = Arc::new(Carrier::from(kg.clone()));
    let gamma = GammaBasis::new(c.clone(), choose_tails(&kg, 0), 3, 0).unwrap();
    let fock = FockBasis::new(c, 3);
    assert_eq!(gamma.dim(), fock.dim());
    for i in 0..fock.dim() {
        assert_eq!(&gamma.class(i).numerator, fock.label(i));
        assert_eq!(gamma.basis_name(i), fock.basis_name(i));
    }
}
