//! On-demand instances: every random choice is revealed only when a query
//! touches it, so instances far too large to materialize (k up to 16) can be
//! explored by a few thousand queries with the same distribution as
//! [`super::sample_instance`].

use rand::seq::SliceRandom;

use super::blueprint::{Blueprint, Lazy};
use super::{blueprint_for, weld_seed, GenError, InstanceSpec, Layout, LoopClass, Node, MIN_K};
use crate::graph::{EdgeKind, Label, VertexRole};
use crate::perm::{LazyPerm, Permutation};
use crate::seed;

/// Adjacency of one vertex in vertex ids (self-loop excluded).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexAnswer {
    pub role: VertexRole,
    pub has_loop: bool,
    pub neighbors: Vec<(u64, EdgeKind)>,
}

pub struct LazyInstance {
    pub spec: InstanceSpec,
    pub layout: Layout,
    bp: Blueprint<Lazy>,
    labels: LazyPerm,
    order_seed: u64,
}

impl LazyInstance {
    pub fn new(spec: InstanceSpec) -> Result<Self, GenError> {
        if spec.k < MIN_K {
            return Err(GenError::DepthTooSmall(spec.k, MIN_K));
        }
        if spec.blocks() == 0 {
            return Err(GenError::ZeroBlocks);
        }
        if spec.k > 24 {
            return Err(GenError::TooLarge(spec.layout().vertex_count()));
        }
        let bp = blueprint_for(&spec, Lazy(spec.seed), Lazy(weld_seed(&spec)));
        let layout = spec.layout();
        let labels = LazyPerm::new(layout.vertex_count(), seed::derive(spec.seed, "lazy/labels", 0));
        Ok(LazyInstance { spec, layout, bp, labels, order_seed: seed::derive(spec.seed, "lazy/order", 0) })
    }

    pub fn vertex_count(&self) -> u64 {
        self.layout.vertex_count()
    }

    pub fn label_of(&mut self, v: u64) -> Label {
        Label(self.labels.forward(v))
    }

    pub fn vertex_of(&mut self, label: Label) -> u64 {
        self.labels.inverse(label.0)
    }

    pub fn node(&self, v: u64) -> Node {
        self.layout.node(v)
    }

    pub fn class(&mut self, pair: u64) -> LoopClass {
        self.bp.class(pair)
    }

    /// Vertex id of the advice partner, without revealing anything else.
    pub fn advice_partner(&mut self, v: u64) -> Option<u64> {
        self.bp.advice_partner(v)
    }

    /// Neighbors of `v` in vertex ids, in the instance-fixed order.
    pub fn answer_vertex(&mut self, v: u64) -> VertexAnswer {
        let mut row = Vec::with_capacity(5);
        let has_loop = self.bp.row(v, &mut row);
        row.shuffle(&mut seed::stream(self.order_seed, "row", v));
        VertexAnswer { role: self.layout.role(v), has_loop, neighbors: row }
    }

    /// Neighbors of the vertex behind `label`, as labels.
    pub fn query(&mut self, label: Label) -> crate::graph::Answer {
        let v = self.vertex_of(label);
        let a = self.answer_vertex(v);
        let mut neighbors: Vec<(Label, EdgeKind)> = a.neighbors.iter().map(|&(w, kind)| (self.label_of(w), kind)).collect();
        if a.has_loop {
            neighbors.push((label, EdgeKind::Single));
        }
        crate::graph::Answer { role: a.role, has_loop: a.has_loop, neighbors }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{sample_instance, Variant};

    #[test]
    fn lazy_rows_are_symmetric_and_complete() {
        for variant in [Variant::G1, Variant::G2] {
            let spec = InstanceSpec::new(3, variant, 5);
            let mut lazy = LazyInstance::new(spec).unwrap();
            let n = lazy.vertex_count();
            let rows: Vec<VertexAnswer> = (0..n).map(|v| lazy.answer_vertex(v)).collect();
            let eager = sample_instance(spec).unwrap();
            for (v, r) in rows.iter().enumerate() {
                for &(w, kind) in &r.neighbors {
                    let back = rows[w as usize].neighbors.iter().filter(|&&x| x == (v as u64, kind)).count();
                    let fwd = r.neighbors.iter().filter(|&&x| x == (w, kind)).count();
                    assert_eq!(back, fwd);
                }
            }
            let mut b = crate::graph::GraphBuilder::new(n as usize);
            for (v, r) in rows.iter().enumerate() {
                b.set_role(v, r.role).set_loop(v, r.has_loop);
                for &(w, kind) in &r.neighbors {
                    if w as usize > v {
                        b.add_edge(v, w as usize, kind);
                    }
                }
            }
            let g = b.build().unwrap();
            assert_eq!(g.edge_counts(), eager.graph().edge_counts());
            assert_eq!(g.roles(), eager.graph().roles());
        }
    }
}
