use std::collections::HashSet;

use proptest::prelude::*;

use multicut::branching::{solve_decision, solve_decision_parallel, solve_max};
use multicut::enum_cluster::enumerate_cluster;
use multicut::enum_kernels::{compress_cocluster, compress_vc, enumerate_via_kernel, CoclusterOutcome, VcKernel};
use multicut::generators::{reduce_set_packing_to_mmc, verify_sp_reduction};
use multicut::io::{parse_graph, write_graph, GraphFormat};
use multicut::modulator::{approx_cluster_modulator, approx_cocluster_modulator, approx_vertex_cover};
use multicut::oracle::{max_parts, Oracle};
use multicut::subcubic::{kernelize_subcubic, KernelOutcome};
use multicut::treewidth::{heuristic_decomposition, max_parts_tw, max_parts_tw_witness, nicify};
use multicut::{canonicalize, max_parts_of_cut, validate_multicut, Graph, Multicut, SetPackingInstance};

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        proptest::collection::vec(any::<bool>(), pairs.len()).prop_map(move |keep| {
            let edges = pairs.iter().zip(keep).filter(|(_, k)| *k).map(|(e, _)| *e);
            Graph::from_edges(n, edges).unwrap()
        })
    })
}

fn subcubic_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    graph(max_n).prop_map(|g| {
        let mut edges = Vec::new();
        let mut deg = vec![0; g.n()];
        for (u, v) in g.edges() {
            if deg[u] < 3 && deg[v] < 3 {
                deg[u] += 1;
                deg[v] += 1;
                edges.push((u, v));
            }
        }
        Graph::from_edges(g.n(), edges).unwrap()
    })
}

fn oracle_set(g: &Graph, ell: usize) -> HashSet<Multicut> {
    Oracle::unbounded().enumerate_all_multicuts(g, ell).unwrap().into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn oracle_multicuts_are_valid_and_canonical(g in graph(7)) {
        for m in Oracle::unbounded().enumerate_all_multicuts(&g, 1).unwrap() {
            prop_assert!(validate_multicut(&g, m.part_of(), m.parts()).is_ok());
            prop_assert_eq!(&canonicalize(&g, m.part_of()).unwrap(), &m);
            prop_assert_eq!(&max_parts_of_cut(&g, m.cut_edges()).unwrap(), &m);
        }
    }

    #[test]
    fn engines_agree_on_the_optimum(g in graph(9)) {
        let best = max_parts(&g).unwrap();
        let (value, witness) = solve_max(&g);
        prop_assert_eq!(value, best);
        prop_assert!(validate_multicut(&g, witness.part_of(), best).is_ok());
        let ntd = nicify(&heuristic_decomposition(&g));
        prop_assert!(ntd.is_nice());
        prop_assert_eq!(max_parts_tw(&g, &ntd), best);
        let w = max_parts_tw_witness(&g, &ntd).unwrap();
        prop_assert!(validate_multicut(&g, w.part_of(), best).is_ok());
    }

    #[test]
    fn parallel_search_returns_the_sequential_witness(g in graph(10), ell in 1usize..6, jobs in 2usize..5) {
        prop_assert_eq!(solve_decision_parallel(&g, ell, jobs), solve_decision(&g, ell));
    }

    #[test]
    fn heuristic_decompositions_are_valid(g in graph(12)) {
        let td = heuristic_decomposition(&g);
        prop_assert!(td.validate(&g).is_ok());
        prop_assert!(nicify(&td).to_tree_decomposition().validate(&g).is_ok());
    }

    // An indivisible block hanging off a bridge must not change the answer.
    #[test]
    fn pendant_cliques_match_the_oracle(g in graph(6), at in 0usize..6, size in 3usize..5) {
        let n = g.n();
        let at = at % n;
        let clique = (n..n + size).flat_map(|u| (u + 1..n + size).map(move |v| (u, v)));
        let edges = g.edges().chain(clique).chain([(at, n)]);
        let h = Graph::from_edges(n + size, edges).unwrap();
        prop_assert_eq!(solve_max(&h).0, max_parts(&h).unwrap());
    }

    #[test]
    fn kernels_enumerate_exactly_the_oracle_solutions(g in graph(8), ell in 1usize..4) {
        let oracle = Oracle::unbounded();
        let expected = oracle_set(&g, ell);
        let cover = approx_vertex_cover(&g);
        let kernel = compress_vc(&g, &cover).unwrap();
        prop_assert!(kernel.graph.n() <= VcKernel::size_bound(cover.len()));
        let via_vc: HashSet<_> = enumerate_via_kernel(&g, &cover, ell, &oracle).unwrap().into_iter().collect();
        prop_assert_eq!(&via_vc, &expected);

        let coc = approx_cocluster_modulator(&g);
        if let CoclusterOutcome::Reduced(k) = compress_cocluster(&g, &coc, ell).unwrap() {
            prop_assert!(k.graph.n() <= g.n());
        }
        let via_coc: HashSet<_> = enumerate_via_kernel(&g, &coc, ell, &oracle).unwrap().into_iter().collect();
        prop_assert_eq!(&via_coc, &expected);

        let cluster = approx_cluster_modulator(&g);
        let listed = enumerate_cluster(&g, &cluster, ell).unwrap();
        let via_cluster: HashSet<_> = listed.iter().cloned().collect();
        prop_assert_eq!(via_cluster.len(), listed.len());
        prop_assert_eq!(&via_cluster, &expected);
    }

    #[test]
    fn subcubic_kernel_solves_or_stays_small(g in subcubic_graph(14), ell in 1usize..6) {
        match kernelize_subcubic(&g, ell).unwrap() {
            KernelOutcome::Solved(m) => prop_assert!(validate_multicut(&g, m.part_of(), ell).is_ok()),
            KernelOutcome::Kernel { graph, bound, .. } => {
                prop_assert_eq!(&graph, &g);
                prop_assert!((graph.n() as f64) < bound);
            }
        }
    }

    #[test]
    fn graph_formats_round_trip(g in graph(10)) {
        for format in [GraphFormat::PaceGr, GraphFormat::Dimacs] {
            prop_assert_eq!(&parse_graph(&write_graph(&g, format), format).unwrap(), &g);
        }
    }

    #[test]
    fn set_packing_reduction_preserves_answers(
        ground in 3usize..6,
        family in proptest::collection::vec(proptest::collection::btree_set(0usize..5, 1..4), 1..4),
        k in 1usize..3,
    ) {
        let family: Vec<Vec<usize>> = family
            .into_iter()
            .map(|s| s.into_iter().filter(|&x| x < ground).collect::<Vec<_>>())
            .filter(|s| !s.is_empty())
            .collect();
        prop_assume!(!family.is_empty());
        let red = reduce_set_packing_to_mmc(&SetPackingInstance::new(ground, family, k)).unwrap();
        prop_assert!(verify_sp_reduction(&red, &Oracle::unbounded()).unwrap().passed());
    }
}
