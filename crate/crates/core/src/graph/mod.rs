//! Bounded-degree multigraphs with self-loops and double edges.
//!
//! Adjacency is stored in compressed sparse rows. Self-loops are not stored in
//! the rows; they live in a per-vertex flag and count 1 toward the degree. A
//! double edge is one row entry per endpoint and counts 2.

mod format;
mod oracle;

pub use format::{deserialize, serialize, GraphFile, GraphMeta, ParseError, VariantTag};
pub use oracle::{AdjacencyOracle, Answer, Label, OracleError, OracleHandle};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Maximum degree, counted with multiplicity.
pub const MAX_DEGREE: usize = 5;

pub(crate) const DOUBLE_BIT: u32 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    Single,
    Double,
}

impl EdgeKind {
    /// Contribution to the degree bound.
    pub fn weight(self) -> usize {
        match self {
            EdgeKind::Single => 1,
            EdgeKind::Double => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexRole {
    Body,
    Antenna,
    Root,
}

impl VertexRole {
    pub fn as_str(self) -> &'static str {
        match self {
            VertexRole::Body => "body",
            VertexRole::Antenna => "antenna",
            VertexRole::Root => "root",
        }
    }
}

impl std::str::FromStr for VertexRole {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "body" => Ok(VertexRole::Body),
            "antenna" => Ok(VertexRole::Antenna),
            "root" => Ok(VertexRole::Root),
            other => Err(format!("unknown role `{other}`")),
        }
    }
}

/// Which edges a degree count or neighbor scan ignores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EdgeFilter {
    pub doubles: bool,
    pub loops: bool,
}

impl EdgeFilter {
    pub const NONE: EdgeFilter = EdgeFilter { doubles: false, loops: false };
    pub const DOUBLES: EdgeFilter = EdgeFilter { doubles: true, loops: false };
    pub const DOUBLES_AND_LOOPS: EdgeFilter = EdgeFilter { doubles: true, loops: true };

    /// True if every edge ignored by `self` is also ignored by `other`.
    pub fn subset_of(self, other: EdgeFilter) -> bool {
        (!self.doubles || other.doubles) && (!self.loops || other.loops)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range (graph has {count} vertices)")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("vertex {vertex} has degree {degree}, above the bound {MAX_DEGREE}")]
    DegreeBound { vertex: usize, degree: usize },
    #[error("edge {from} -> {to} ({kind:?}) has multiplicity {forward} but the reverse has {backward}")]
    Asymmetric { from: usize, to: usize, kind: EdgeKind, forward: usize, backward: usize },
    #[error("self-loop at {vertex} stored as a row entry")]
    LoopInRow { vertex: usize },
    #[error("root {vertex} must have exactly 4 single edges and no double edge")]
    RootShape { vertex: usize },
    #[error("malformed adjacency arrays: {0}")]
    Layout(String),
    #[error("graph too large for 31-bit vertex ids: {0}")]
    TooLarge(usize),
}

/// An undirected multigraph of maximum degree 5 with per-vertex role tags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    offsets: Vec<u32>,
    entries: Vec<u32>,
    roles: Vec<VertexRole>,
    loops: Vec<bool>,
}

impl MultiGraph {
    pub fn empty() -> Self {
        MultiGraph { offsets: vec![0], entries: Vec::new(), roles: Vec::new(), loops: Vec::new() }
    }

    /// Assemble from CSR rows. Each row is sorted into canonical order and the
    /// whole graph is validated.
    pub fn from_rows(offsets: Vec<u32>, mut entries: Vec<u32>, roles: Vec<VertexRole>, loops: Vec<bool>) -> Result<Self, GraphError> {
        let n = roles.len();
        if n >= DOUBLE_BIT as usize {
            return Err(GraphError::TooLarge(n));
        }
        if offsets.len() != n + 1 || loops.len() != n {
            return Err(GraphError::Layout(format!("{} offsets and {} loop flags for {n} vertices", offsets.len(), loops.len())));
        }
        if offsets[0] != 0 || offsets[n] as usize != entries.len() || offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(GraphError::Layout("offsets are not a monotone cover of the entries".into()));
        }
        for v in 0..n {
            entries[offsets[v] as usize..offsets[v + 1] as usize].sort_unstable();
        }
        let g = MultiGraph { offsets, entries, roles, loops };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<(), GraphError> {
        let n = self.vertex_count();
        for v in 0..n {
            let row = self.row(v);
            let mut degree = usize::from(self.loops[v]);
            let mut singles = 0;
            for &e in row {
                let (w, kind) = unpack(e);
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, count: n });
                }
                if w == v {
                    return Err(GraphError::LoopInRow { vertex: v });
                }
                degree += kind.weight();
                if kind == EdgeKind::Single {
                    singles += 1;
                }
            }
            if degree > MAX_DEGREE {
                return Err(GraphError::DegreeBound { vertex: v, degree });
            }
            if self.roles[v] == VertexRole::Root && (singles != 4 || row.len() != 4) {
                return Err(GraphError::RootShape { vertex: v });
            }
            // rows are sorted, so equal entries are adjacent
            let mut i = 0;
            while i < row.len() {
                let mut j = i;
                while j < row.len() && row[j] == row[i] {
                    j += 1;
                }
                let (w, kind) = unpack(row[i]);
                let back = self.row(w).iter().filter(|&&x| x == pack(v, kind)).count();
                if back != j - i {
                    return Err(GraphError::Asymmetric { from: v, to: w, kind, forward: j - i, backward: back });
                }
                i = j;
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.roles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roles.is_empty()
    }

    fn row(&self, v: usize) -> &[u32] {
        &self.entries[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    fn check(&self, v: usize) -> Result<(), GraphError> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { vertex: v, count: self.vertex_count() })
        }
    }

    pub fn role(&self, v: usize) -> VertexRole {
        self.roles[v]
    }

    pub fn roles(&self) -> &[VertexRole] {
        &self.roles
    }

    pub fn has_loop(&self, v: usize) -> bool {
        self.loops[v]
    }

    /// Row entries of `v` in canonical order (self-loop excluded).
    pub fn neighbors(&self, v: usize) -> impl ExactSizeIterator<Item = (usize, EdgeKind)> + '_ {
        self.row(v).iter().map(|&e| unpack(e))
    }

    pub fn single_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.neighbors(v).filter(|&(_, k)| k == EdgeKind::Single).map(|(w, _)| w)
    }

    pub fn double_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.neighbors(v).filter(|&(_, k)| k == EdgeKind::Double).map(|(w, _)| w)
    }

    /// Degree with multiplicity, skipping the edge classes in `ignore`.
    pub fn degree(&self, v: usize, ignore: EdgeFilter) -> Result<usize, GraphError> {
        self.check(v)?;
        let mut d = if ignore.loops { 0 } else { usize::from(self.loops[v]) };
        for (_, kind) in self.neighbors(v) {
            if !(ignore.doubles && kind == EdgeKind::Double) {
                d += kind.weight();
            }
        }
        Ok(d)
    }

    /// Number of (undirected) edges of each kind, and the number of loops.
    pub fn edge_counts(&self) -> (usize, usize, usize) {
        let mut singles = 0;
        let mut doubles = 0;
        for &e in &self.entries {
            match unpack(e).1 {
                EdgeKind::Single => singles += 1,
                EdgeKind::Double => doubles += 1,
            }
        }
        (singles / 2, doubles / 2, self.loops.iter().filter(|&&l| l).count())
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count()).map(|v| self.degree(v, EdgeFilter::NONE).unwrap_or(0)).max().unwrap_or(0)
    }
}

#[inline]
pub(crate) fn pack(v: usize, kind: EdgeKind) -> u32 {
    let id = v as u32;
    match kind {
        EdgeKind::Single => id,
        EdgeKind::Double => id | DOUBLE_BIT,
    }
}

#[inline]
pub(crate) fn unpack(e: u32) -> (usize, EdgeKind) {
    if e & DOUBLE_BIT != 0 {
        ((e & !DOUBLE_BIT) as usize, EdgeKind::Double)
    } else {
        (e as usize, EdgeKind::Single)
    }
}

/// Incremental construction for small or hand-written graphs.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    rows: Vec<Vec<u32>>,
    roles: Vec<VertexRole>,
    loops: Vec<bool>,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Self {
        GraphBuilder { rows: vec![Vec::new(); n], roles: vec![VertexRole::Body; n], loops: vec![false; n] }
    }

    pub fn add_vertex(&mut self, role: VertexRole) -> usize {
        self.rows.push(Vec::new());
        self.roles.push(role);
        self.loops.push(false);
        self.rows.len() - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.rows.len()
    }

    pub fn set_role(&mut self, v: usize, role: VertexRole) -> &mut Self {
        self.roles[v] = role;
        self
    }

    pub fn set_loop(&mut self, v: usize, on: bool) -> &mut Self {
        self.loops[v] = on;
        self
    }

    pub fn add_edge(&mut self, u: usize, v: usize, kind: EdgeKind) -> &mut Self {
        if u == v {
            self.loops[u] = true;
        } else {
            self.rows[u].push(pack(v, kind));
            self.rows[v].push(pack(u, kind));
        }
        self
    }

    pub fn add_single(&mut self, u: usize, v: usize) -> &mut Self {
        self.add_edge(u, v, EdgeKind::Single)
    }

    pub fn add_double(&mut self, u: usize, v: usize) -> &mut Self {
        self.add_edge(u, v, EdgeKind::Double)
    }

    /// Remove one copy of the edge `{u, v}` of the given kind.
    pub fn remove_edge(&mut self, u: usize, v: usize, kind: EdgeKind) -> bool {
        let remove = |row: &mut Vec<u32>, x: u32| match row.iter().position(|&e| e == x) {
            Some(i) => {
                row.swap_remove(i);
                true
            }
            None => false,
        };
        let a = remove(&mut self.rows[u], pack(v, kind));
        let b = remove(&mut self.rows[v], pack(u, kind));
        a && b
    }

    pub fn build(self) -> Result<MultiGraph, GraphError> {
        let mut offsets = Vec::with_capacity(self.rows.len() + 1);
        offsets.push(0u32);
        let mut entries = Vec::new();
        for row in &self.rows {
            entries.extend_from_slice(row);
            offsets.push(entries.len() as u32);
        }
        MultiGraph::from_rows(offsets, entries, self.roles, self.loops)
    }
}

impl From<&MultiGraph> for GraphBuilder {
    fn from(g: &MultiGraph) -> Self {
        GraphBuilder { rows: (0..g.vertex_count()).map(|v| g.row(v).to_vec()).collect(), roles: g.roles.clone(), loops: g.loops.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Root with self-loop and 4 tree edges, an interior vertex with a double edge.
    fn sample() -> MultiGraph {
        let mut b = GraphBuilder::new(7);
        b.set_role(0, VertexRole::Root).set_loop(0, true);
        for c in 1..=4 {
            b.add_single(0, c);
        }
        b.set_role(1, VertexRole::Body).add_single(1, 5).add_single(1, 6);
        b.set_role(2, VertexRole::Antenna).add_double(1, 2);
        b.build().unwrap()
    }

    #[test]
    fn degree_counts_loops_once_and_doubles_twice() {
        let g = sample();
        assert_eq!(g.degree(0, EdgeFilter::NONE).unwrap(), 5);
        assert_eq!(g.degree(0, EdgeFilter::DOUBLES_AND_LOOPS).unwrap(), 4);
        assert_eq!(g.degree(1, EdgeFilter::NONE).unwrap(), 5);
        assert_eq!(g.degree(1, EdgeFilter::DOUBLES).unwrap(), 3);
        assert!(matches!(g.degree(9, EdgeFilter::NONE), Err(GraphError::VertexOutOfRange { .. })));
    }

    #[test]
    fn degree_bound_is_enforced() {
        let mut b = GraphBuilder::new(7);
        for w in 1..7 {
            b.add_single(0, w);
        }
        assert!(matches!(b.build(), Err(GraphError::DegreeBound { vertex: 0, degree: 6 })));
    }

    #[test]
    fn asymmetric_rows_are_rejected() {
        let offsets = vec![0, 1, 1];
        let entries = vec![1];
        let err = MultiGraph::from_rows(offsets, entries, vec![VertexRole::Body; 2], vec![false; 2]).unwrap_err();
        assert!(matches!(err, GraphError::Asymmetric { from: 0, to: 1, .. }));
    }

    #[test]
    fn root_shape_is_enforced() {
        let mut b = GraphBuilder::new(3);
        b.set_role(0, VertexRole::Root).add_single(0, 1).add_single(0, 2);
        assert!(matches!(b.build(), Err(GraphError::RootShape { vertex: 0 })));
    }

    #[test]
    fn filters_only_shrink_degrees() {
        let g = sample();
        let filters = [EdgeFilter::NONE, EdgeFilter::DOUBLES, EdgeFilter { doubles: false, loops: true }, EdgeFilter::DOUBLES_AND_LOOPS];
        for v in 0..g.vertex_count() {
            for &a in &filters {
                for &b in &filters {
                    if a.subset_of(b) {
                        assert!(g.degree(v, b).unwrap() <= g.degree(v, a).unwrap());
                    }
                }
            }
        }
    }
}
