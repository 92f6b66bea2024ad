//! The subgraph an adversary has seen so far.

use rustc_hash::FxHashSet;

use crate::graph::{EdgeKind, VertexRole};

pub type NodeId = u32;

/// How a node first entered the knowledge graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// Handed to the adversary at the start of a game.
    Start,
    /// Queried while unknown (Actions I and II).
    Fresh,
    /// Returned as a neighbor of a queried node of the given role.
    Via { from: VertexRole, kind: EdgeKind },
    /// Part of a revealed half-antenna.
    HalfAntenna,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KNode {
    pub role: VertexRole,
    pub provenance: Provenance,
    pub queried: bool,
    pub has_loop: Option<bool>,
    pub edges: Vec<(NodeId, EdgeKind)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeOutcome {
    /// Already known.
    Known,
    /// Joined two components (or attached a new node).
    Joined,
    /// Closed a cycle; `odd` is set when the cycle is odd in the single-edge
    /// subgraph.
    Cycle { odd: bool },
}

/// Union-find with parity, used for odd-cycle detection.
#[derive(Debug, Clone, Default)]
struct ParityDsu {
    parent: Vec<u32>,
    parity: Vec<bool>,
}

impl ParityDsu {
    fn push(&mut self) {
        self.parent.push(self.parent.len() as u32);
        self.parity.push(false);
    }

    /// Root and parity of `x` relative to it.
    fn find(&mut self, x: u32) -> (u32, bool) {
        let mut path = Vec::new();
        let mut r = x;
        while self.parent[r as usize] != r {
            path.push(r);
            r = self.parent[r as usize];
        }
        // compress from the top down so each parity is relative to r
        let mut acc = false;
        for &v in path.iter().rev() {
            acc ^= self.parity[v as usize];
            self.parity[v as usize] = acc;
            self.parent[v as usize] = r;
        }
        (r, if path.is_empty() { false } else { self.parity[x as usize] })
    }

    /// Adds an edge requiring opposite colors. Returns `None` when it joins
    /// two components, otherwise `Some(odd)`.
    fn union(&mut self, a: u32, b: u32) -> Option<bool> {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return Some(pa == pb);
        }
        self.parent[rb as usize] = ra;
        self.parity[rb as usize] = pa ^ pb ^ true;
        None
    }
}

#[derive(Debug, Clone, Default)]
pub struct KnowledgeGraph {
    nodes: Vec<KNode>,
    any: ParityDsu,
    singles: ParityDsu,
    edges: usize,
    cycle: bool,
    odd_cycle: bool,
    tapped: FxHashSet<u64>,
}

impl KnowledgeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn node(&self, n: NodeId) -> &KNode {
        &self.nodes[n as usize]
    }

    pub fn nodes(&self) -> &[KNode] {
        &self.nodes
    }

    pub fn add_node(&mut self, role: VertexRole, provenance: Provenance) -> NodeId {
        let id = self.nodes.len() as NodeId;
        self.nodes.push(KNode { role, provenance, queried: false, has_loop: None, edges: Vec::new() });
        self.any.push();
        self.singles.push();
        id
    }

    pub fn set_queried(&mut self, n: NodeId, has_loop: bool) {
        let node = &mut self.nodes[n as usize];
        node.queried = true;
        node.has_loop = Some(has_loop);
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId, kind: EdgeKind) -> bool {
        self.nodes[a as usize].edges.contains(&(b, kind))
    }

    pub fn add_edge(&mut self, a: NodeId, b: NodeId, kind: EdgeKind) -> EdgeOutcome {
        if self.has_edge(a, b, kind) {
            return EdgeOutcome::Known;
        }
        self.nodes[a as usize].edges.push((b, kind));
        self.nodes[b as usize].edges.push((a, kind));
        self.edges += 1;
        let odd = kind == EdgeKind::Single && self.singles.union(a, b) == Some(true);
        self.odd_cycle |= odd;
        match self.any.union(a, b) {
            None => EdgeOutcome::Joined,
            Some(_) => {
                self.cycle = true;
                EdgeOutcome::Cycle { odd }
            }
        }
    }

    pub fn has_cycle(&self) -> bool {
        self.cycle
    }

    /// Some single-edge cycle of odd length is known.
    pub fn has_odd_cycle(&self) -> bool {
        self.odd_cycle
    }

    pub fn same_component(&mut self, a: NodeId, b: NodeId) -> bool {
        self.any.find(a).0 == self.any.find(b).0
    }

    /// Records that a non-root vertex of base graph `base` is known. Returns
    /// whether the base graph was untapped before.
    pub fn tap(&mut self, base: u64) -> bool {
        self.tapped.insert(base)
    }

    pub fn is_tapped(&self, base: u64) -> bool {
        self.tapped.contains(&base)
    }

    pub fn tapped_count(&self) -> usize {
        self.tapped.len()
    }

    /// Every edge is stored at both endpoints and points at a known node.
    pub fn check_closure(&self) -> Result<(), String> {
        let n = self.nodes.len() as NodeId;
        let mut half_edges = 0;
        for (i, node) in self.nodes.iter().enumerate() {
            for &(w, kind) in &node.edges {
                if w >= n {
                    return Err(format!("edge {i}-{w} leaves the graph"));
                }
                if !self.nodes[w as usize].edges.contains(&(i as NodeId, kind)) {
                    return Err(format!("edge {i}-{w} is one-sided"));
                }
                half_edges += 1;
            }
        }
        if half_edges != 2 * self.edges {
            return Err("edge count out of sync".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_odd_and_even_cycles() {
        let mut g = KnowledgeGraph::new();
        let v: Vec<NodeId> = (0..5).map(|_| g.add_node(VertexRole::Body, Provenance::Fresh)).collect();
        for i in 0..3 {
            assert_eq!(g.add_edge(v[i], v[i + 1], EdgeKind::Single), EdgeOutcome::Joined);
        }
        // 4-cycle
        assert_eq!(g.add_edge(v[3], v[0], EdgeKind::Single), EdgeOutcome::Cycle { odd: false });
        assert!(g.has_cycle() && !g.has_odd_cycle());
        assert_eq!(g.add_edge(v[3], v[0], EdgeKind::Single), EdgeOutcome::Known);
        // chord 0-2 closes a triangle
        assert_eq!(g.add_edge(v[0], v[2], EdgeKind::Single), EdgeOutcome::Cycle { odd: true });
        // double edges close cycles but never odd single cycles
        assert_eq!(g.add_edge(v[4], v[1], EdgeKind::Double), EdgeOutcome::Joined);
        assert_eq!(g.add_edge(v[4], v[3], EdgeKind::Double), EdgeOutcome::Cycle { odd: false });
        g.check_closure().unwrap();
        assert_eq!(g.edge_count(), 7);
    }
}
