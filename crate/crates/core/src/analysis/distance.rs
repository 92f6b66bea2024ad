//! Edge-deletion distance to bipartiteness: odd-cycle packing from below,
//! annealed cuts from above, and exhaustive search on small components.

use rand::Rng as _;
use serde::Serialize;

use super::{two_color, violations, AnalysisError, ReducedGraph, TwoColoring};
use crate::seed;

/// Largest component handled by [`exact_distance`].
pub const EXACT_MAX_VERTICES: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMode {
    /// Greedy odd-cycle packing; the upper bound is the BFS coloring's count.
    Lb,
    /// Simulated annealing; the lower bound is 0 or 1.
    Ub,
    /// Both bounds plus exhaustive search on every component.
    Exact,
}

impl std::str::FromStr for DistanceMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lb" => Ok(DistanceMode::Lb),
            "ub" => Ok(DistanceMode::Ub),
            "exact" => Ok(DistanceMode::Exact),
            other => Err(format!("unknown distance mode `{other}` (expected lb, ub or exact)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistanceReport {
    pub is_bipartite: bool,
    pub odd_cycle_witness: Option<Vec<usize>>,
    pub lower_bound: u64,
    pub upper_bound: u64,
    pub exact: Option<u64>,
}

pub fn bipartite_distance(g: &ReducedGraph, mode: DistanceMode, seed: u64) -> Result<DistanceReport, AnalysisError> {
    let witness = match two_color(g) {
        TwoColoring::Coloring(_) => {
            return Ok(DistanceReport {
                is_bipartite: true,
                odd_cycle_witness: None,
                lower_bound: 0,
                upper_bound: 0,
                exact: (mode == DistanceMode::Exact).then_some(0),
            });
        }
        TwoColoring::OddCycle(w) => w,
    };
    let comps = g.components();
    if mode == DistanceMode::Exact {
        if let Some(c) = comps.iter().find(|c| c.len() > EXACT_MAX_VERTICES) {
            return Err(AnalysisError::ComponentTooLarge { size: c.len(), limit: EXACT_MAX_VERTICES });
        }
    }
    let (mut lb, mut ub, mut exact) = (0u64, 0u64, 0u64);
    for (i, comp) in comps.iter().enumerate() {
        let sub = g.induced(comp);
        let coloring = match two_color(&sub) {
            TwoColoring::Coloring(_) => continue,
            TwoColoring::OddCycle(_) => bfs_parity(&sub),
        };
        let greedy = violations(&sub, &coloring) as u64;
        match mode {
            DistanceMode::Lb => {
                lb += packing_lower_bound(&sub);
                ub += greedy;
            }
            DistanceMode::Ub | DistanceMode::Exact => {
                let annealed = anneal(&sub, coloring, seed::derive(seed, "distance/anneal", i as u64));
                ub += annealed;
                if mode == DistanceMode::Exact {
                    lb += packing_lower_bound(&sub);
                    exact += exact_distance(&sub)?;
                } else {
                    lb += 1;
                }
            }
        }
    }
    Ok(DistanceReport {
        is_bipartite: false,
        odd_cycle_witness: Some(witness),
        lower_bound: lb,
        upper_bound: ub,
        exact: (mode == DistanceMode::Exact).then_some(exact),
    })
}

/// Colors by BFS depth parity from the lowest vertex of each component.
fn bfs_parity(g: &ReducedGraph) -> Vec<bool> {
    let n = g.vertex_count();
    let mut depth = vec![u32::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for s in 0..n {
        if depth[s] != u32::MAX {
            continue;
        }
        depth[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for w in g.neighbors(v) {
                if depth[w] == u32::MAX {
                    depth[w] = depth[v] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    depth.iter().map(|d| d % 2 == 1).collect()
}

/// Number of edge-disjoint odd cycles found by repeatedly removing the
/// edges of a detected odd cycle.
pub fn packing_lower_bound(g: &ReducedGraph) -> u64 {
    let n = g.vertex_count();
    let mut edges: rustc_hash::FxHashSet<(usize, usize)> = g.edges().collect();
    let mut count = 0;
    loop {
        let list: Vec<_> = edges.iter().copied().collect();
        let cur = ReducedGraph::from_edges(n, &list).expect("subgraph of a simple graph");
        match two_color(&cur) {
            TwoColoring::Coloring(_) => return count,
            TwoColoring::OddCycle(c) => {
                count += 1;
                for i in 0..c.len() {
                    let (a, b) = (c[i], c[(i + 1) % c.len()]);
                    edges.remove(&(a.min(b), a.max(b)));
                }
            }
        }
    }
}

/// Single-flip annealing from `start`; returns the fewest violated edges
/// seen.
fn anneal(g: &ReducedGraph, start: Vec<bool>, seed: u64) -> u64 {
    let n = g.vertex_count();
    let mut color = start;
    let mut cost = violations(g, &color) as i64;
    let mut best = cost;
    if n == 0 || best == 0 {
        return best as u64;
    }
    let mut rng = seed::stream(seed, "anneal", 0);
    let steps = 400 * n as u64;
    let (t0, t1) = (2.0f64, 0.05f64);
    for step in 0..steps {
        let temp = t0 * (t1 / t0).powf(step as f64 / steps as f64);
        let v = rng.random_range(0..n);
        let same = g.neighbors(v).filter(|&w| color[w] == color[v]).count() as i64;
        let delta = g.degree(v) as i64 - 2 * same;
        if delta <= 0 || rng.random::<f64>() < (-(delta as f64) / temp).exp() {
            color[v] = !color[v];
            cost += delta;
            best = best.min(cost);
        }
    }
    best as u64
}

/// Peels vertices of degree at most one; they never force a violation.
fn two_core(g: &ReducedGraph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut alive = vec![true; n];
    let mut stack: Vec<usize> = (0..n).filter(|&v| deg[v] <= 1).collect();
    while let Some(v) = stack.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for w in g.neighbors(v) {
            if alive[w] {
                deg[w] -= 1;
                if deg[w] == 1 {
                    stack.push(w);
                }
            }
        }
    }
    (0..n).filter(|&v| alive[v]).collect()
}

/// Minimum number of edges whose removal leaves `g` bipartite, by branch
/// and bound over colorings. Every component must have at most
/// [`EXACT_MAX_VERTICES`] vertices.
pub fn exact_distance(g: &ReducedGraph) -> Result<u64, AnalysisError> {
    let mut total = 0;
    for comp in g.components() {
        if comp.len() > EXACT_MAX_VERTICES {
            return Err(AnalysisError::ComponentTooLarge { size: comp.len(), limit: EXACT_MAX_VERTICES });
        }
        let sub = g.induced(&comp);
        let core = two_core(&sub);
        if core.is_empty() {
            continue;
        }
        let core = sub.induced(&core);
        // BFS order so each vertex after the first meets a colored neighbor
        let order = bfs_order(&core);
        let mut pos = vec![0; order.len()];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let earlier: Vec<Vec<usize>> = order.iter().map(|&v| core.neighbors(v).filter(|&w| pos[w] < pos[v]).map(|w| pos[w]).collect()).collect();
        let mut best = violations(&core, &bfs_parity(&core)) as u64;
        let mut colors = vec![false; order.len()];
        branch(&earlier, 1, 0, &mut colors, &mut best);
        total += best;
    }
    Ok(total)
}

fn bfs_order(g: &ReducedGraph) -> Vec<usize> {
    let comps = g.components();
    let mut order = Vec::with_capacity(g.vertex_count());
    let mut seen = vec![false; g.vertex_count()];
    for c in comps {
        let s = c[0];
        seen[s] = true;
        let start = order.len();
        order.push(s);
        let mut i = start;
        while i < order.len() {
            let v = order[i];
            for w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    order.push(w);
                }
            }
            i += 1;
        }
    }
    order
}

fn branch(earlier: &[Vec<usize>], i: usize, cost: u64, colors: &mut [bool], best: &mut u64) {
    if cost >= *best {
        return;
    }
    if i == earlier.len() {
        *best = cost;
        return;
    }
    for c in [false, true] {
        let add = earlier[i].iter().filter(|&&j| colors[j] == c).count() as u64;
        colors[i] = c;
        branch(earlier, i + 1, cost + add, colors, best);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> ReducedGraph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        ReducedGraph::from_edges(n, &e).unwrap()
    }

    #[test]
    fn five_cycle_is_one_edge_from_bipartite() {
        let e: Vec<_> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        let g = ReducedGraph::from_edges(5, &e).unwrap();
        for mode in [DistanceMode::Lb, DistanceMode::Ub, DistanceMode::Exact] {
            let r = bipartite_distance(&g, mode, 1).unwrap();
            assert!(!r.is_bipartite);
            assert_eq!((r.lower_bound, r.upper_bound), (1, 1));
        }
        assert_eq!(bipartite_distance(&g, DistanceMode::Exact, 1).unwrap().exact, Some(1));
    }

    #[test]
    fn complete_graphs_match_max_cut() {
        // K_n keeps floor(n/2) * ceil(n/2) edges in its best cut
        for n in 3..=9 {
            let g = complete(n);
            let m = (n * (n - 1) / 2) as u64;
            let want = m - ((n / 2) * n.div_ceil(2)) as u64;
            let r = bipartite_distance(&g, DistanceMode::Exact, 2).unwrap();
            assert_eq!(r.exact, Some(want), "K_{n}");
            assert!(r.lower_bound <= want && want <= r.upper_bound);
            assert_eq!(r.upper_bound, want, "annealing on K_{n}");
        }
    }

    #[test]
    fn exact_rejects_large_components() {
        let e: Vec<_> = (0..31).map(|i| (i, (i + 1) % 31)).collect();
        let g = ReducedGraph::from_edges(31, &e).unwrap();
        assert_eq!(bipartite_distance(&g, DistanceMode::Exact, 0), Err(AnalysisError::ComponentTooLarge { size: 31, limit: 30 }));
        assert_eq!(bipartite_distance(&g, DistanceMode::Ub, 0).unwrap().upper_bound, 1);
    }
}
