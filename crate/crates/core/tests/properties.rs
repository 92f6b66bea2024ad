use std::collections::BTreeMap;

use proptest::prelude::*;
use weldlab::advice::AdviceMap;
use weldlab::analysis::{bipartite_distance, exact_distance, packing_lower_bound, raw_census, two_color, DistanceMode, ReducedGraph, TwoColoring};
use weldlab::generators::{sample_instance, AdviceConvention, InstanceSpec, Variant};
use weldlab::graph;
use weldlab::seed;
use weldlab::stats;

fn small_graph() -> impl Strategy<Value = ReducedGraph> {
    (2usize..14).prop_flat_map(|n| {
        proptest::collection::btree_set((0..n, 0..n), 0..3 * n).prop_map(move |pairs| {
            let edges: Vec<_> = pairs.into_iter().filter(|(u, v)| u < v).collect();
            ReducedGraph::from_edges(n, &edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn serialization_round_trips(k in 2u32..5, g2 in any::<bool>(), s in any::<u64>()) {
        let inst = sample_instance(InstanceSpec::new(k, if g2 { Variant::G2 } else { Variant::G1 }, s)).unwrap();
        let text = graph::serialize(inst.graph(), inst.meta());
        let back = graph::deserialize(&text).unwrap();
        prop_assert_eq!(&back.graph, inst.graph());
        prop_assert_eq!(back.meta, inst.meta());
    }

    #[test]
    fn g1_census_identities_hold(k in 2u32..6, s in any::<u64>(), even in any::<bool>()) {
        let c = if even { AdviceConvention::EvenHosts } else { AdviceConvention::OddHosts };
        let inst = sample_instance(InstanceSpec::new(k, Variant::G1, s).with_convention(c)).unwrap();
        let census = raw_census(inst.graph(), k, c);
        prop_assert!(census.classes.is_some());
        prop_assert_eq!(census.check(1, c), Ok(()));
        prop_assert_eq!(inst.parity_flags(), inst.weld_flags());
    }

    #[test]
    fn g1_reduced_graph_is_bipartite(k in 2u32..6, s in any::<u64>()) {
        let inst = sample_instance(InstanceSpec::new(k, Variant::G1, s)).unwrap();
        let coloring = two_color(&ReducedGraph::from_multigraph(inst.graph()));
        prop_assert!(matches!(coloring, TwoColoring::Coloring(_)));
    }

    #[test]
    fn distance_bounds_bracket_the_exact_value(g in small_graph(), s in any::<u64>()) {
        let exact = exact_distance(&g).unwrap();
        prop_assert!(packing_lower_bound(&g) <= exact);
        for mode in [DistanceMode::Lb, DistanceMode::Ub, DistanceMode::Exact] {
            let r = bipartite_distance(&g, mode, s).unwrap();
            prop_assert!(r.lower_bound <= exact && exact <= r.upper_bound, "{:?} {:?} {}", mode, r, exact);
            prop_assert_eq!(r.is_bipartite, exact == 0);
            if let Some(w) = &r.odd_cycle_witness {
                prop_assert!(weldlab::analysis::is_odd_cycle(&g, w));
            }
        }
    }

    #[test]
    fn advice_text_round_trips(bits in proptest::collection::btree_map(any::<u64>(), any::<bool>(), 0..200)) {
        let mut m = AdviceMap::new();
        for (&l, &b) in &bits {
            m.insert(weldlab::graph::Label(l), b);
        }
        let back = AdviceMap::from_text(&m.to_text()).unwrap();
        prop_assert_eq!(back.sorted(), m.sorted());
    }

    #[test]
    fn wilson_interval_contains_the_estimate(n in 1u64..5000, frac in 0.0f64..=1.0) {
        let x = (frac * n as f64).round() as u64;
        let (lo, hi) = stats::wilson(x, n, stats::Z95);
        let p = x as f64 / n as f64;
        prop_assert!((0.0..=p).contains(&lo) && (p..=1.0).contains(&hi));
    }

    #[test]
    fn total_variation_is_a_metric_value(a in proptest::collection::btree_map(0u8..20, 1u64..50, 1..10), b in proptest::collection::btree_map(0u8..20, 1u64..50, 1..10)) {
        let (a, b): (BTreeMap<_, _>, BTreeMap<_, _>) = (a, b);
        let d = stats::total_variation(&a, &b);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&d));
        prop_assert!((d - stats::total_variation(&b, &a)).abs() < 1e-12);
        prop_assert!(stats::total_variation(&a, &a) < 1e-12);
    }

    #[test]
    fn seed_derivation_is_deterministic_and_role_sensitive(root in any::<u64>(), i in any::<u64>()) {
        prop_assert_eq!(seed::derive(root, "x", i), seed::derive(root, "x", i));
        prop_assert_ne!(seed::derive(root, "x", i), seed::derive(root, "y", i));
    }
}
