//! Query-counted, label-obfuscated adjacency-list access.

use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{pack, unpack, EdgeKind, MultiGraph, VertexRole};
use crate::seed;

/// A public vertex label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Label(pub u64);

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("unknown label {0}")]
    UnknownLabel(Label),
}

/// The answer to one neighbor-list query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    pub role: VertexRole,
    pub has_loop: bool,
    /// All neighbors in the instance-fixed order. A self-loop appears as the
    /// queried label itself with kind `Single`.
    pub neighbors: Vec<(Label, EdgeKind)>,
}

impl Answer {
    pub fn degree(&self) -> usize {
        self.neighbors.iter().map(|&(_, k)| k.weight()).sum()
    }

    pub fn doubles(&self) -> impl Iterator<Item = Label> + '_ {
        self.neighbors.iter().filter(|&&(_, k)| k == EdgeKind::Double).map(|&(l, _)| l)
    }
}

/// Adjacency-list access as seen by a tester.
pub trait AdjacencyOracle {
    fn vertex_count(&self) -> u64;

    /// Counted neighbor-list query.
    fn query(&self, label: Label) -> Result<Answer, OracleError>;

    /// Uncounted read used only by the exact state-vector simulation, whose
    /// query cost is charged through an analytic model instead.
    fn peek(&self, label: Label) -> Result<Answer, OracleError>;

    fn queries(&self) -> u64;

    /// Uniform label; free of charge.
    fn random_vertex(&self, rng: &mut seed::Rng) -> Option<Label> {
        let n = self.vertex_count();
        (n > 0).then(|| Label(rng.random_range(0..n)))
    }
}

#[derive(Debug)]
struct Tables {
    to_label: Vec<u32>,
    from_label: Vec<u32>,
    roles: Vec<VertexRole>,
    loops: Vec<bool>,
    // answers indexed by label, entries are packed labels
    offsets: Vec<u32>,
    entries: Vec<u32>,
}

/// Oracle over a materialized [`MultiGraph`].
///
/// The label permutation and every neighbor order are drawn once from the
/// seed; [`OracleHandle::fork`] yields a handle over the same tables with a
/// fresh counter.
#[derive(Debug)]
pub struct OracleHandle {
    graph: Arc<MultiGraph>,
    tables: Arc<Tables>,
    seed: u64,
    counter: Cell<u64>,
}

impl OracleHandle {
    pub fn new(graph: Arc<MultiGraph>, seed: u64) -> Self {
        let n = graph.vertex_count();
        let mut to_label: Vec<u32> = (0..n as u32).collect();
        to_label.shuffle(&mut seed::stream(seed, "oracle/labels", 0));
        let mut from_label = vec![0u32; n];
        for (v, &l) in to_label.iter().enumerate() {
            from_label[l as usize] = v as u32;
        }
        let mut order_rng = seed::stream(seed, "oracle/order", 0);
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0u32);
        let mut entries = Vec::with_capacity(n * 5);
        let mut roles = Vec::with_capacity(n);
        let mut loops = Vec::with_capacity(n);
        for l in 0..n {
            let v = from_label[l] as usize;
            let start = entries.len();
            for (w, kind) in graph.neighbors(v) {
                entries.push(pack(to_label[w] as usize, kind));
            }
            if graph.has_loop(v) {
                entries.push(l as u32);
            }
            entries[start..].shuffle(&mut order_rng);
            offsets.push(entries.len() as u32);
            roles.push(graph.role(v));
            loops.push(graph.has_loop(v));
        }
        let tables = Tables { to_label, from_label, roles, loops, offsets, entries };
        OracleHandle { graph, tables: Arc::new(tables), seed, counter: Cell::new(0) }
    }

    /// A handle on the same instance and labeling with its own counter.
    pub fn fork(&self) -> Self {
        OracleHandle { graph: Arc::clone(&self.graph), tables: Arc::clone(&self.tables), seed: self.seed, counter: Cell::new(0) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn graph(&self) -> &MultiGraph {
        &self.graph
    }

    pub fn label_of(&self, vertex: usize) -> Label {
        Label(u64::from(self.tables.to_label[vertex]))
    }

    pub fn vertex_of(&self, label: Label) -> Option<usize> {
        usize::try_from(label.0).ok().and_then(|l| self.tables.from_label.get(l)).map(|&v| v as usize)
    }

    fn answer(&self, label: Label) -> Result<Answer, OracleError> {
        let l = usize::try_from(label.0).ok().filter(|&l| l < self.tables.roles.len()).ok_or(OracleError::UnknownLabel(label))?;
        let t = &self.tables;
        let neighbors = t.entries[t.offsets[l] as usize..t.offsets[l + 1] as usize]
            .iter()
            .map(|&e| {
                let (w, kind) = unpack(e);
                (Label(w as u64), kind)
            })
            .collect();
        Ok(Answer { role: t.roles[l], has_loop: t.loops[l], neighbors })
    }
}

impl AdjacencyOracle for OracleHandle {
    fn vertex_count(&self) -> u64 {
        self.tables.roles.len() as u64
    }

    fn query(&self, label: Label) -> Result<Answer, OracleError> {
        let a = self.answer(label)?;
        self.counter.set(self.counter.get() + 1);
        Ok(a)
    }

    fn peek(&self, label: Label) -> Result<Answer, OracleError> {
        self.answer(label)
    }

    fn queries(&self) -> u64 {
        self.counter.get()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    fn star() -> Arc<MultiGraph> {
        let mut b = GraphBuilder::new(7);
        b.set_role(0, VertexRole::Root).set_loop(0, true);
        for c in 1..=4 {
            b.add_single(0, c);
        }
        b.add_double(1, 5).set_role(5, VertexRole::Antenna).add_single(5, 6).set_role(6, VertexRole::Antenna);
        Arc::new(b.build().unwrap())
    }

    #[test]
    fn answers_are_fixed_and_counted() {
        let o = OracleHandle::new(star(), 11);
        let root = o.label_of(0);
        let a = o.query(root).unwrap();
        let b = o.query(root).unwrap();
        assert_eq!(a, b);
        assert_eq!(o.queries(), 2);
        assert_eq!(a.role, VertexRole::Root);
        assert!(a.has_loop);
        // four tree edges plus the loop reported as own label
        assert_eq!(a.neighbors.len(), 5);
        assert!(a.neighbors.contains(&(root, EdgeKind::Single)));
        assert_eq!(a.degree(), 5);
    }

    #[test]
    fn fork_shares_labels_but_not_counter() {
        let o = OracleHandle::new(star(), 3);
        o.query(o.label_of(1)).unwrap();
        let f = o.fork();
        assert_eq!(f.queries(), 0);
        assert_eq!(f.label_of(4), o.label_of(4));
        assert_eq!(f.peek(o.label_of(1)).unwrap(), o.peek(o.label_of(1)).unwrap());
        assert_eq!(o.queries(), 1);
    }

    #[test]
    fn unknown_label_is_an_error() {
        let o = OracleHandle::new(star(), 3);
        assert_eq!(o.query(Label(99)), Err(OracleError::UnknownLabel(Label(99))));
        assert_eq!(o.queries(), 0);
    }

    #[test]
    fn random_vertex_is_free() {
        let o = OracleHandle::new(star(), 3);
        let mut rng = seed::stream(0, "t", 0);
        for _ in 0..10 {
            let l = o.random_vertex(&mut rng).unwrap();
            assert!(l.0 < 7);
        }
        assert_eq!(o.queries(), 0);
        let single = OracleHandle::new(Arc::new(GraphBuilder::new(1).build().unwrap()), 0);
        assert_eq!(single.random_vertex(&mut rng), Some(Label(0)));
    }
}
