//! Structural addressing of an ensemble of root-joined tree pairs.
//!
//! Each depth-`k` root-joined tree has `2^(k+2) - 3` vertices numbered
//! locally as: `0` the root, `1..=half` the antenna nodes and
//! `half+1..=2*half` the body nodes, where `half = 2^(k+1) - 2`. Both binary
//! trees use heap positions (root = 1, children of `h` are `2h` and `2h+1`),
//! so antenna heap `h` is local `h - 1` and body heap `h` is local
//! `half + h - 1`. Tree `side` of pair `p` occupies ids
//! `[(2p + side) * T, (2p + side + 1) * T)`.

use crate::graph::VertexRole;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Part {
    Root,
    /// Antenna node at heap position `h >= 2`.
    Antenna(u64),
    /// Body node at heap position `h >= 2`.
    Body(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Node {
    pub pair: u64,
    pub side: u64,
    pub part: Part,
}

impl Node {
    pub fn tree(&self) -> u64 {
        2 * self.pair + self.side
    }
}

/// Depth of a heap position (root = 1 has depth 0).
#[inline]
pub fn heap_depth(h: u64) -> u32 {
    63 - h.leading_zeros()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub k: u32,
    pub pairs: u64,
}

impl Layout {
    pub fn new(k: u32, pairs: u64) -> Self {
        Layout { k, pairs }
    }

    /// `2^k`, the number of leaves of one binary tree.
    pub fn leaves(&self) -> u64 {
        1 << self.k
    }

    /// Non-root nodes of one binary tree.
    pub fn half(&self) -> u64 {
        (1 << (self.k + 1)) - 2
    }

    /// Body nodes strictly between root and leaves, per tree.
    pub fn interior_per_tree(&self) -> u64 {
        self.leaves() - 2
    }

    pub fn tree_size(&self) -> u64 {
        1 + 2 * self.half()
    }

    pub fn pair_size(&self) -> u64 {
        2 * self.tree_size()
    }

    pub fn vertex_count(&self) -> u64 {
        self.pairs * self.pair_size()
    }

    pub fn trees(&self) -> u64 {
        2 * self.pairs
    }

    pub fn node(&self, v: u64) -> Node {
        let t = self.tree_size();
        let tree = v / t;
        let local = v % t;
        let half = self.half();
        let part = if local == 0 {
            Part::Root
        } else if local <= half {
            Part::Antenna(local + 1)
        } else {
            Part::Body(local - half + 1)
        };
        Node { pair: tree / 2, side: tree % 2, part }
    }

    pub fn id(&self, n: Node) -> u64 {
        let base = n.tree() * self.tree_size();
        base + match n.part {
            Part::Root => 0,
            Part::Antenna(h) => h - 1,
            Part::Body(h) => self.half() + h - 1,
        }
    }

    pub fn root_of_tree(&self, tree: u64) -> u64 {
        tree * self.tree_size()
    }

    pub fn role(&self, v: u64) -> VertexRole {
        match self.node(v).part {
            Part::Root => VertexRole::Root,
            Part::Antenna(_) => VertexRole::Antenna,
            Part::Body(_) => VertexRole::Body,
        }
    }

    pub fn is_weld(&self, v: u64) -> bool {
        matches!(self.node(v).part, Part::Body(h) if heap_depth(h) == self.k)
    }

    /// Body leaf `i` of tree `(pair, side)`.
    pub fn weld_leaf(&self, pair: u64, side: u64, i: u64) -> u64 {
        self.id(Node { pair, side, part: Part::Body(self.leaves() + i) })
    }

    /// Tree neighbors (parent and children) of `v`.
    pub fn tree_neighbors(&self, v: u64) -> impl Iterator<Item = u64> {
        let n = self.node(v);
        let k = self.k;
        let lay = *self;
        let mut out = [u64::MAX; 4];
        match n.part {
            Part::Root => {
                for (slot, part) in [Part::Antenna(2), Part::Antenna(3), Part::Body(2), Part::Body(3)].into_iter().enumerate() {
                    out[slot] = lay.id(Node { part, ..n });
                }
            }
            Part::Antenna(h) | Part::Body(h) => {
                let wrap = |h: u64| match n.part {
                    Part::Antenna(_) => Part::Antenna(h),
                    _ => Part::Body(h),
                };
                out[0] = if h / 2 == 1 { lay.id(Node { part: Part::Root, ..n }) } else { lay.id(Node { part: wrap(h / 2), ..n }) };
                if heap_depth(h) < k {
                    out[1] = lay.id(Node { part: wrap(2 * h), ..n });
                    out[2] = lay.id(Node { part: wrap(2 * h + 1), ..n });
                }
            }
        }
        out.into_iter().filter(|&x| x != u64::MAX)
    }

    /// Global enumeration of weld vertices: `((2p + side) * 2^k + i)`.
    pub fn weld_index(&self, v: u64) -> Option<u64> {
        let n = self.node(v);
        match n.part {
            Part::Body(h) if heap_depth(h) == self.k => Some(n.tree() * self.leaves() + (h - self.leaves())),
            _ => None,
        }
    }

    pub fn weld_from_index(&self, w: u64) -> u64 {
        let tree = w / self.leaves();
        self.weld_leaf(tree / 2, tree % 2, w % self.leaves())
    }

    /// Global enumeration of body interior vertices.
    pub fn interior_index(&self, v: u64) -> Option<u64> {
        let n = self.node(v);
        match n.part {
            Part::Body(h) if heap_depth(h) < self.k => Some(n.tree() * self.interior_per_tree() + (h - 2)),
            _ => None,
        }
    }

    pub fn interior_from_index(&self, i: u64) -> u64 {
        let per = self.interior_per_tree();
        let tree = i / per;
        self.id(Node { pair: tree / 2, side: tree % 2, part: Part::Body(i % per + 2) })
    }

    /// Position of an antenna vertex among the antennas of pairs of one loop
    /// class, given the pair's rank inside that class.
    pub fn antenna_host_index(&self, rank: u64, side: u64, h: u64) -> u64 {
        (rank * 2 + side) * self.half() + (h - 2)
    }

    /// Inverse of [`Layout::antenna_host_index`]: `(rank, side, heap)`.
    pub fn antenna_host_decode(&self, idx: u64) -> (u64, u64, u64) {
        let half = self.half();
        let tree = idx / half;
        (tree / 2, tree % 2, idx % half + 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_id_roundtrip() {
        let lay = Layout::new(3, 3);
        for v in 0..lay.vertex_count() {
            assert_eq!(lay.id(lay.node(v)), v);
        }
    }

    #[test]
    fn tree_degrees() {
        let lay = Layout::new(3, 1);
        for v in 0..lay.vertex_count() {
            let d = lay.tree_neighbors(v).count();
            match lay.node(v).part {
                Part::Root => assert_eq!(d, 4),
                Part::Antenna(h) | Part::Body(h) => assert_eq!(d, if heap_depth(h) == 3 { 1 } else { 3 }),
            }
            for w in lay.tree_neighbors(v) {
                assert!(lay.tree_neighbors(w).any(|x| x == v));
            }
        }
    }

    #[test]
    fn index_enumerations_are_bijective() {
        let lay = Layout::new(3, 2);
        let welds: Vec<u64> = (0..lay.vertex_count()).filter_map(|v| lay.weld_index(v)).collect();
        assert_eq!(welds.len() as u64, lay.trees() * lay.leaves());
        for (i, &w) in welds.iter().enumerate() {
            assert_eq!(w, i as u64);
            assert_eq!(lay.weld_index(lay.weld_from_index(w)), Some(w));
        }
        let interior: Vec<u64> = (0..lay.vertex_count()).filter_map(|v| lay.interior_index(v)).collect();
        assert_eq!(interior.len() as u64, lay.trees() * (lay.leaves() - 2));
        for &i in &interior {
            assert_eq!(lay.interior_index(lay.interior_from_index(i)), Some(i));
        }
        for idx in 0..4 * lay.half() {
            let (r, s, h) = lay.antenna_host_decode(idx);
            assert_eq!(lay.antenna_host_index(r, s, h), idx);
        }
    }
}
