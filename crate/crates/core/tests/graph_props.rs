use proptest::prelude::*;
use qsym_core::game::{
    correlation_from_witness, deterministic_from_isomorphism, hom_profile_compare, is_perfect_strategy,
    is_valid_correlation, Correlation, GameInstance,
};
use qsym_core::graphs::{automorphism_search, find_isomorphism, random_tree, Graph};
use qsym_core::qaut::{
    complement_invariance_check, distance_orthogonality_check, is_quantum_automorphism, orthogonality_form_check,
};
use qsym_core::{Permutation, QuantumPermutation, TolerancePolicy};

fn tol() -> TolerancePolicy {
    TolerancePolicy::default()
}

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (2usize..=7).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for x in 0..n {
                for y in x + 1..n {
                    if bits[k] {
                        edges.push((x, y));
                    }
                    k += 1;
                }
            }
            Graph::from_edges(n, &edges).unwrap()
        })
    })
}

fn relabel_graph(x: &Graph, p: &Permutation) -> Graph {
    let edges: Vec<(usize, usize)> = x.edges().into_iter().map(|(a, b)| (p.apply(a), p.apply(b))).collect();
    Graph::from_edges(x.n(), &edges).unwrap()
}

fn shuffled(n: usize, seed: u64) -> Permutation {
    let mut v: Vec<usize> = (0..n).collect();
    let mut s = seed;
    for i in (1..n).rev() {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        v.swap(i, (s >> 33) as usize % (i + 1));
    }
    Permutation::new(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn formulations_agree_on_all_permutations(x in graph_strategy(), seed in any::<u64>()) {
        let p = shuffled(x.n(), seed);
        let q = QuantumPermutation::from_permutation(&p).unwrap();
        let adjacency = is_quantum_automorphism(&x, &q, &tol()).unwrap().is_qaut;
        let orthogonality = orthogonality_form_check(&x, &q, &tol()).unwrap().holds;
        prop_assert_eq!(adjacency, orthogonality);
        let c = complement_invariance_check(&x, &q, &tol()).unwrap();
        prop_assert!(c.consistent);
    }

    #[test]
    fn automorphisms_pass_every_check(x in graph_strategy()) {
        let autos = automorphism_search(&x, 64).unwrap();
        for a in &autos.maps {
            let q = QuantumPermutation::from_permutation(a).unwrap();
            prop_assert!(is_quantum_automorphism(&x, &q, &tol()).unwrap().is_qaut);
            prop_assert!(distance_orthogonality_check(&x, &q, &tol()).unwrap().holds);
        }
    }

    #[test]
    fn isomorphisms_give_perfect_deterministic_strategies(x in graph_strategy(), seed in any::<u64>()) {
        let p = shuffled(x.n(), seed);
        let y = relabel_graph(&x, &p);
        let game = GameInstance::new(x.clone(), y.clone());
        let sigma = find_isomorphism(&x, &y).unwrap().expect("relabelled copy");
        let corr = deterministic_from_isomorphism(&game, &sigma).unwrap();
        prop_assert!(is_valid_correlation(&corr));
        prop_assert!(is_perfect_strategy(&game, &corr).unwrap().perfect);
        // the d = 1 witness reproduces the deterministic table
        let witness = QuantumPermutation::from_permutation(&sigma).unwrap();
        let from_witness = correlation_from_witness(&game, &witness, &tol()).unwrap();
        prop_assert!(from_witness.max_difference(&corr) <= 1e-12);
    }

    #[test]
    fn isomorphic_graphs_share_hom_profiles(x in graph_strategy(), seed in any::<u64>()) {
        let y = relabel_graph(&x, &shuffled(x.n(), seed));
        prop_assert!(hom_profile_compare(&x, &y).unwrap().equal);
    }

    #[test]
    fn correlation_json_round_trip(n in 1usize..4, m in 1usize..4) {
        let c = Correlation::uniform(n, m);
        let back: Correlation = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn graph_json_round_trip(x in graph_strategy()) {
        let back: Graph = serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn random_trees_are_trees(n in 1usize..30, seed in any::<u64>()) {
        let t = random_tree(n, seed).unwrap();
        prop_assert_eq!(t.edge_count(), n - 1);
        prop_assert!(t.is_connected());
    }
}
