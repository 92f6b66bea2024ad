//! Results checked against independent computations: brute-force max cut,
//! closed-form sizes and hand-derived probabilities.

use weldlab::analysis::{bipartite_distance, exact_distance, two_color, weld_blocks, DistanceMode, ReducedGraph, TwoColoring};
use weldlab::generators::{sample_instance, InstanceSpec, RoleCensus, Variant};
use weldlab::quantum::{ColumnWalk, WalkSchedule};
use weldlab::seed;
use weldlab::stats;

fn brute_force_distance(g: &ReducedGraph) -> u64 {
    let n = g.vertex_count();
    (0u32..1 << n).map(|mask| g.edges().filter(|&(u, v)| (mask >> u & 1) == (mask >> v & 1)).count() as u64).min().unwrap_or(0)
}

#[test]
fn exact_distance_matches_brute_force_on_random_graphs() {
    use rand::Rng as _;
    let mut rng = seed::stream(11, "oracle/graphs", 0);
    for _ in 0..60 {
        let n = rng.random_range(3..=12);
        let p = rng.random_range(0.2..0.8);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        let g = ReducedGraph::from_edges(n, &edges).unwrap();
        let want = brute_force_distance(&g);
        assert_eq!(exact_distance(&g).unwrap(), want, "{edges:?}");
        let r = bipartite_distance(&g, DistanceMode::Exact, 3).unwrap();
        assert!(r.lower_bound <= want && want <= r.upper_bound);
        assert_eq!(r.is_bipartite, want == 0);
    }
}

#[test]
fn instance_sizes_follow_the_closed_forms() {
    for k in 2..=6u32 {
        let candy = (1u64 << (k + 3)) - 6;
        assert_eq!(RoleCensus::candy_size(k), candy);
        for variant in [Variant::G1, Variant::G2] {
            let inst = sample_instance(InstanceSpec::new(k, variant, 5)).unwrap();
            assert_eq!(inst.graph().vertex_count() as u64, 2 * ((1 << k) - 1) * candy);
        }
    }
}

#[test]
fn g2_weld_block_is_bipartite_three_times_in_thirty_five() {
    // at k = 3 a self-welded body tree leaves its weld block bipartite
    // with probability 3/35
    let (mut bip, mut total) = (0u64, 0u64);
    for s in 0..200 {
        let inst = sample_instance(InstanceSpec::new(3, Variant::G2, s)).unwrap();
        let r = ReducedGraph::from_multigraph(inst.graph());
        for b in weld_blocks(&inst.layout) {
            total += 1;
            bip += u64::from(matches!(two_color(&r.induced(&b)), TwoColoring::Coloring(_)));
        }
    }
    let (lo, hi) = stats::wilson(bip, total, 3.29);
    let p = 3.0 / 35.0;
    assert!(lo <= p && p <= hi, "{bip}/{total}");
}

#[test]
fn column_walk_conserves_probability_and_starts_at_entrance() {
    for k in 1..=8 {
        let w = ColumnWalk::new(k);
        assert_eq!(w.entrance_probability(0.0), 1.0);
        for i in 0..50 {
            let t = f64::from(i) * 0.37;
            let total: f64 = w.amplitudes(t).iter().map(|a| a.norm_sqr()).sum();
            assert!((total - 1.0).abs() < 1e-10, "k={k} t={t}");
        }
    }
}

#[test]
fn schedule_peak_is_the_sampled_maximum() {
    for k in 2..=6 {
        let s = WalkSchedule::new(k);
        let w = ColumnWalk::new(k);
        assert!((w.exit_probability(s.peak.t_star) - s.peak.p_star).abs() < 1e-12);
        assert!(s.run.p_star <= s.peak.p_star + 1e-12);
    }
}
