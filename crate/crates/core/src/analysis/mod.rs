//! Bipartiteness and distance-to-bipartite of reduced graphs, and the
//! structural census of instances.

use std::collections::VecDeque;

use crate::generators::layout::heap_depth;
use crate::generators::{Layout, Node, Part};
use crate::graph::{EdgeKind, MultiGraph};

pub mod census;
pub mod distance;

pub use census::{raw_census, sibling_difference, CensusMismatch, RawCensus, SiblingDifference};
pub use distance::{bipartite_distance, exact_distance, packing_lower_bound, DistanceMode, DistanceReport, EXACT_MAX_VERTICES};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("component of {size} vertices is too large for exact search (limit {limit})")]
    ComponentTooLarge { size: usize, limit: usize },
    #[error("edge {0}-{1} is a loop or repeated")]
    NotSimple(usize, usize),
    #[error("vertex {vertex} out of range for {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
}

/// A simple undirected graph in CSR form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedGraph {
    offsets: Vec<usize>,
    adj: Vec<u32>,
}

impl ReducedGraph {
    /// Drops double edges and self-loops.
    pub fn from_multigraph(g: &MultiGraph) -> Self {
        let n = g.vertex_count();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut adj = Vec::new();
        offsets.push(0);
        for v in 0..n {
            adj.extend(g.neighbors(v).filter(|&(_, k)| k == EdgeKind::Single).map(|(w, _)| w as u32));
            offsets.push(adj.len());
        }
        ReducedGraph { offsets, adj }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, AnalysisError> {
        let mut rows = vec![Vec::new(); n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(AnalysisError::VertexOutOfRange { vertex: x, count: n });
                }
            }
            if u == v || rows[u].contains(&(v as u32)) {
                return Err(AnalysisError::NotSimple(u, v));
            }
            rows[u].push(v as u32);
            rows[v].push(u as u32);
        }
        let mut offsets = vec![0];
        let mut adj = Vec::new();
        for r in rows {
            adj.extend(r);
            offsets.push(adj.len());
        }
        Ok(ReducedGraph { offsets, adj })
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.adj.len() / 2
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[self.offsets[v]..self.offsets[v + 1]].iter().map(|&w| w as usize)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count()).flat_map(move |v| self.neighbors(v).filter(move |&w| w > v).map(move |w| (v, w)))
    }

    /// Connected components, each sorted.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                for w in self.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Subgraph induced by `vertices`, renumbered in the given order.
    pub fn induced(&self, vertices: &[usize]) -> ReducedGraph {
        let mut index = rustc_hash::FxHashMap::default();
        for (i, &v) in vertices.iter().enumerate() {
            index.insert(v, i as u32);
        }
        let mut offsets = vec![0];
        let mut adj = Vec::new();
        for &v in vertices {
            adj.extend(self.neighbors(v).filter_map(|w| index.get(&w).copied()));
            offsets.push(adj.len());
        }
        ReducedGraph { offsets, adj }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TwoColoring {
    Coloring(Vec<bool>),
    /// Vertices of an odd cycle in order; the last is adjacent to the first.
    OddCycle(Vec<usize>),
}

/// BFS layering per component. On the first edge inside a layer, returns
/// the odd cycle through the two BFS paths to their meeting point.
pub fn two_color(g: &ReducedGraph) -> TwoColoring {
    let n = g.vertex_count();
    const UNSEEN: usize = usize::MAX;
    let mut parent = vec![UNSEEN; n];
    let mut depth = vec![0u32; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        if parent[s] != UNSEEN {
            continue;
        }
        parent[s] = s;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for w in g.neighbors(v) {
                if parent[w] == UNSEEN {
                    parent[w] = v;
                    depth[w] = depth[v] + 1;
                    queue.push_back(w);
                } else if depth[w] % 2 == depth[v] % 2 {
                    return TwoColoring::OddCycle(cycle_through(&parent, &depth, v, w));
                }
            }
        }
    }
    TwoColoring::Coloring(depth.iter().map(|d| d % 2 == 1).collect())
}

fn cycle_through(parent: &[usize], depth: &[u32], v: usize, w: usize) -> Vec<usize> {
    let (mut a, mut b) = (v, w);
    let mut left = vec![a];
    let mut right = vec![b];
    while depth[a] > depth[b] {
        a = parent[a];
        left.push(a);
    }
    while depth[b] > depth[a] {
        b = parent[b];
        right.push(b);
    }
    while a != b {
        a = parent[a];
        b = parent[b];
        left.push(a);
        right.push(b);
    }
    right.pop();
    left.extend(right.into_iter().rev());
    left
}

/// Per body tree, its weld vertices and their parents: `3 * 2^{k-1}`
/// vertex ids each.
pub fn weld_blocks(layout: &Layout) -> Vec<Vec<usize>> {
    let k = layout.k;
    (0..layout.trees())
        .map(|tree| {
            let (pair, side) = (tree / 2, tree % 2);
            (1u64 << (k - 1)..1u64 << (k + 1))
                .filter(|&h| heap_depth(h) >= k - 1)
                .map(|h| layout.id(Node { pair, side, part: Part::Body(h) }) as usize)
                .collect()
        })
        .collect()
}

/// Checks that `cycle` is an odd closed walk on distinct vertices of `g`.
pub fn is_odd_cycle(g: &ReducedGraph, cycle: &[usize]) -> bool {
    let len = cycle.len();
    if len < 3 || len.is_multiple_of(2) {
        return false;
    }
    let mut seen = rustc_hash::FxHashSet::default();
    cycle.iter().all(|&v| v < g.vertex_count() && seen.insert(v)) && (0..len).all(|i| g.neighbors(cycle[i]).any(|w| w == cycle[(i + 1) % len]))
}

/// Edges with equal colors at both ends.
pub fn violations(g: &ReducedGraph, color: &[bool]) -> usize {
    g.edges().filter(|&(u, v)| color[u] == color[v]).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> ReducedGraph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        ReducedGraph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn even_cycle_colors_and_odd_cycle_is_witnessed() {
        let g = cycle(6);
        let TwoColoring::Coloring(c) = two_color(&g) else { panic!("even cycle is bipartite") };
        assert_eq!(violations(&g, &c), 0);
        let g = cycle(7);
        let TwoColoring::OddCycle(w) = two_color(&g) else { panic!("odd cycle") };
        assert!(is_odd_cycle(&g, &w));
        assert_eq!(w.len(), 7);
    }

    #[test]
    fn weld_blocks_have_three_half_leaves() {
        let lay = Layout::new(3, 14);
        let b = weld_blocks(&lay);
        assert_eq!(b.len(), 28);
        assert!(b.iter().all(|x| x.len() == 12));
        assert_eq!(b[0].iter().filter(|&&v| lay.is_weld(v as u64)).count(), 8);
    }

    #[test]
    fn single_edge_and_empty_graph() {
        let g = ReducedGraph::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(two_color(&g), TwoColoring::Coloring(vec![false, true]));
        let g = ReducedGraph::from_edges(0, &[]).unwrap();
        assert_eq!(two_color(&g), TwoColoring::Coloring(vec![]));
        assert!(ReducedGraph::from_edges(2, &[(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn witness_is_short_in_a_lollipop() {
        // triangle 0-1-2 hanging off a long path
        let mut edges = vec![(0, 1), (1, 2), (2, 0)];
        for i in 2..20 {
            edges.push((i, i + 1));
        }
        let g = ReducedGraph::from_edges(21, &edges).unwrap();
        let TwoColoring::OddCycle(w) = two_color(&g) else { panic!() };
        assert_eq!(w.len(), 3);
        assert_eq!(g.components().len(), 1);
    }
}
