//! Weld membership for any vertex, decided by finding the root pair that
//! the vertex's advice edge lands in.

use std::cell::{Cell, RefCell};
use std::collections::VecDeque;

use num_complex::Complex64;
use rustc_hash::FxHashMap;
use thiserror::Error;

use super::column::{sweep_t_max, ColumnWalk, SweepResult, SWEEP_DT};
use super::evolve::{chebyshev_evolve, EvolveError, SparseSym};
use crate::advice::{AdviceMap, AdviceSource};
use crate::generators::AdviceConvention;
use crate::graph::{AdjacencyOracle, Answer, EdgeKind, Label, VertexRole};
use crate::seed;
use crate::tester::{Explorer, Filter, Reject};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MarkError {
    #[error("malformed instance: {0}")]
    Malformed(String),
    #[error("walk failed: {0}")]
    Walk(#[from] EvolveError),
}

impl From<Reject> for MarkError {
    fn from(r: Reject) -> Self {
        MarkError::Malformed(format!("root path: {}", r.name()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafScan {
    NotInW,
    BodyNonRoot,
}

/// Marker output for one vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub bit: bool,
    /// Set when the input is not a well-formed instance; the bit is then 0.
    pub diagnostic: Option<MarkError>,
}

/// The root-pair component with antenna edges cut and doubles dropped.
#[derive(Debug, Clone)]
pub struct Component {
    pub labels: Vec<Label>,
    pub adj: SparseSym,
    pub roots: Vec<usize>,
}

/// Timing of the modeled walk for one depth.
///
/// `peak` is the best exit probability on the sweep grid. The marker runs
/// the walk at `run`, the grid time with the lowest amplified cost; the
/// global peak often sits on a late revival and costs far more.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkSchedule {
    pub k: u32,
    pub peak: SweepResult,
    pub run: SweepResult,
}

impl WalkSchedule {
    pub fn new(k: u32) -> Self {
        Self::with_grid(k, sweep_t_max(k), SWEEP_DT)
    }

    pub fn with_grid(k: u32, t_max: f64, dt: f64) -> Self {
        let w = ColumnWalk::new(k);
        WalkSchedule { k, peak: w.sweep(t_max, dt), run: w.cheapest(t_max, dt) }
    }

    fn charge(&self, s: SweepResult) -> u64 {
        let reps = (1.0 / s.p_star.sqrt()).ceil() as u64;
        s.t_star.ceil() as u64 * reps + 4 * u64::from(self.k)
    }

    /// Walk length times amplification repetitions at the run time, plus
    /// four root probes of length k.
    pub fn modeled_queries(&self) -> u64 {
        self.charge(self.run)
    }

    /// The same charge if the walk were run at the peak time.
    pub fn peak_queries(&self) -> u64 {
        self.charge(self.peak)
    }
}

fn peek(oracle: &dyn AdjacencyOracle, l: Label) -> Result<Answer, MarkError> {
    oracle.peek(l).map_err(|e| MarkError::Malformed(e.to_string()))
}

fn peek_singles(oracle: &dyn AdjacencyOracle, l: Label) -> Result<Vec<Label>, MarkError> {
    Ok(peek(oracle, l)?.neighbors.iter().filter(|&&(w, kind)| kind == EdgeKind::Single && w != l).map(|&(w, _)| w).collect())
}

/// Non-backtracking probe of length k from `root` through `first`:
/// `Some(true)` for an antenna edge (a leaf exactly at step k), `Some(false)`
/// for a body edge (a degree-3 vertex at step k).
fn probe(oracle: &dyn AdjacencyOracle, root: Label, first: Label, k: u32) -> Result<Option<bool>, MarkError> {
    let (mut prev, mut cur) = (root, first);
    for _ in 1..k {
        let n = peek_singles(oracle, cur)?;
        if n.len() != 3 {
            return Ok(None);
        }
        let next = n.into_iter().find(|&w| w != prev).expect("three neighbors");
        prev = cur;
        cur = next;
    }
    Ok(match peek_singles(oracle, cur)?.len() {
        1 => Some(true),
        3 => Some(false),
        _ => None,
    })
}

/// Body edges of a root.
fn body_edges(oracle: &dyn AdjacencyOracle, root: Label, k: u32) -> Result<Vec<Label>, MarkError> {
    let mut out = Vec::with_capacity(2);
    for w in peek_singles(oracle, root)? {
        match probe(oracle, root, w, k)? {
            Some(true) => {}
            Some(false) => out.push(w),
            None => return Err(MarkError::Malformed(format!("root {root}: edge to {w} is neither antenna nor body"))),
        }
    }
    Ok(out)
}

/// Body welded tree containing `root`: single edges only, antenna edges of
/// every root reached are cut. Reads are uncounted.
pub fn build_modified_component(oracle: &dyn AdjacencyOracle, root: Label, k: u32) -> Result<Component, MarkError> {
    if peek(oracle, root)?.role != VertexRole::Root {
        return Err(MarkError::Malformed(format!("{root} is not a root")));
    }
    let mut index: FxHashMap<Label, usize> = FxHashMap::default();
    let mut labels = vec![root];
    index.insert(root, 0);
    let mut roots = Vec::new();
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        let iu = index[&u];
        let nbrs = if peek(oracle, u)?.role == VertexRole::Root {
            roots.push(iu);
            body_edges(oracle, u, k)?
        } else {
            peek_singles(oracle, u)?
        };
        for w in nbrs {
            let iw = match index.get(&w) {
                Some(&i) => i,
                None => {
                    let i = labels.len();
                    labels.push(w);
                    index.insert(w, i);
                    queue.push_back(w);
                    i
                }
            };
            if iu < iw {
                edges.push((iu, iw));
            }
        }
    }
    let adj = SparseSym::from_edges(labels.len(), &edges);
    Ok(Component { labels, adj, roots })
}

/// Runs the walk on the component from `root` and returns the other root,
/// read off the exact output distribution.
pub fn find_exit(c: &Component, root: Label, schedule: &WalkSchedule) -> Result<Label, MarkError> {
    if c.roots.len() != 2 {
        return Err(MarkError::Malformed(format!("component of {root} has {} roots", c.roots.len())));
    }
    let start = c.labels.iter().position(|&l| l == root).expect("root in its component");
    let mut psi = vec![Complex64::new(0.0, 0.0); c.adj.dim()];
    psi[start] = Complex64::new(1.0, 0.0);
    let out = chebyshev_evolve(&c.adj, schedule.run.t_star, &psi, c.adj.max_degree().max(1) as f64)?;
    let best = c.roots.iter().copied().filter(|&i| i != start).max_by(|&a, &b| out[a].norm_sqr().total_cmp(&out[b].norm_sqr())).expect("two roots");
    if out[best].norm_sqr() < 1e-12 {
        return Err(MarkError::Malformed(format!("no amplitude reaches a second root from {root}")));
    }
    Ok(c.labels[best])
}

/// Classifies vertices of one instance. Counted queries go through an
/// explorer; the walk simulation reads the graph through `peek`.
pub struct Marker<'a> {
    oracle: &'a dyn AdjacencyOracle,
    explorer: Explorer<'a>,
    convention: AdviceConvention,
    schedule: WalkSchedule,
    exits: FxHashMap<Label, Result<Label, MarkError>>,
    /// Modeled quantum queries, charged per walk run.
    pub modeled_quantum_queries: u64,
    pub walks: u64,
}

impl<'a> Marker<'a> {
    pub fn new(oracle: &'a dyn AdjacencyOracle, k: u32, convention: AdviceConvention, seed: u64) -> Self {
        Self::with_schedule(oracle, WalkSchedule::new(k), convention, seed)
    }

    pub fn with_schedule(oracle: &'a dyn AdjacencyOracle, schedule: WalkSchedule, convention: AdviceConvention, seed: u64) -> Self {
        let mut explorer = Explorer::new(oracle, None, schedule.k, seed::stream(seed, "marker", 0));
        explorer.lenient_leaf = true;
        Marker { oracle, explorer, convention, schedule, exits: FxHashMap::default(), modeled_quantum_queries: 0, walks: 0 }
    }

    pub fn schedule(&self) -> &WalkSchedule {
        &self.schedule
    }

    pub fn oracle(&self) -> &'a dyn AdjacencyOracle {
        self.oracle
    }

    /// Non-backtracking single-edge walks of up to k steps along every
    /// single edge of `v`, looking for an antenna leaf.
    pub fn leaf_scan(&mut self, v: Label) -> Result<LeafScan, MarkError> {
        let a = self.explorer.answer(v)?;
        if a.role == VertexRole::Root || a.degree() == 3 {
            return Ok(LeafScan::NotInW);
        }
        let k = self.explorer.k as usize;
        for &w in self.explorer.singles(v)?.as_slice() {
            let path = self.explorer.walk(v, w, k, Filter::Singles)?;
            for &u in &path[1..] {
                if self.explorer.answer(u)?.degree() == 3 {
                    return Ok(LeafScan::NotInW);
                }
            }
        }
        Ok(LeafScan::BodyNonRoot)
    }

    fn exit_of(&mut self, root: Label) -> Result<Label, MarkError> {
        if let Some(r) = self.exits.get(&root) {
            return r.clone();
        }
        let r = build_modified_component(self.oracle, root, self.schedule.k).and_then(|c| find_exit(&c, root, &self.schedule));
        if let Ok(other) = r {
            self.exits.insert(other, Ok(root));
        }
        self.exits.insert(root, r.clone());
        r
    }

    fn try_classify(&mut self, v: Label) -> Result<bool, MarkError> {
        if self.leaf_scan(v)? == LeafScan::NotInW {
            return Ok(false);
        }
        let doubles = self.explorer.doubles(v)?;
        let [a] = doubles[..] else {
            return Err(MarkError::Malformed(format!("{v} has {} double edges", doubles.len())));
        };
        let path = self.explorer.find_root_path(a, Filter::Singles)?;
        let ra = *path.last().expect("non-empty");
        self.modeled_quantum_queries += self.schedule.modeled_queries();
        self.walks += 1;
        let rb = self.exit_of(ra)?;
        let loops = u32::from(self.explorer.has_loop(ra)?) + u32::from(self.explorer.has_loop(rb)?);
        Ok(self.convention.marking_for_parity(loops))
    }

    pub fn classify_vertex(&mut self, v: Label) -> Classification {
        match self.try_classify(v) {
            Ok(bit) => Classification { bit, diagnostic: None },
            Err(e) => Classification { bit: false, diagnostic: Some(e) },
        }
    }

    /// Classical queries spent so far.
    pub fn queries(&self) -> u64 {
        self.oracle.queries()
    }

    /// Classify every label and collect the bits.
    pub fn mark_all(&mut self) -> (AdviceMap, u64) {
        let mut map = AdviceMap::new();
        let mut malformed = 0;
        for l in 0..self.oracle.vertex_count() {
            let c = self.classify_vertex(Label(l));
            malformed += u64::from(c.diagnostic.is_some());
            map.insert(Label(l), c.bit);
        }
        map.modeled_quantum_queries = self.modeled_quantum_queries;
        (map, malformed)
    }
}

/// Advice produced on demand by the marker, memoized per label.
pub struct QuantumAdvice<'a> {
    marker: RefCell<Marker<'a>>,
    memo: RefCell<FxHashMap<Label, bool>>,
    evaluations: Cell<u64>,
    malformed: Cell<u64>,
}

impl<'a> QuantumAdvice<'a> {
    pub fn new(marker: Marker<'a>) -> Self {
        QuantumAdvice { marker: RefCell::new(marker), memo: RefCell::default(), evaluations: Cell::new(0), malformed: Cell::new(0) }
    }

    pub fn modeled_quantum_queries(&self) -> u64 {
        self.marker.borrow().modeled_quantum_queries
    }

    pub fn malformed(&self) -> u64 {
        self.malformed.get()
    }

    /// Labels marked so far.
    pub fn to_map(&self) -> AdviceMap {
        let mut m = AdviceMap::new();
        for (&l, &b) in self.memo.borrow().iter() {
            m.insert(l, b);
        }
        m.modeled_quantum_queries = self.modeled_quantum_queries();
        m
    }
}

impl AdviceSource for QuantumAdvice<'_> {
    fn mark(&self, label: Label) -> bool {
        self.evaluations.set(self.evaluations.get() + 1);
        if let Some(&b) = self.memo.borrow().get(&label) {
            return b;
        }
        let c = self.marker.borrow_mut().classify_vertex(label);
        if c.diagnostic.is_some() {
            self.malformed.set(self.malformed.get() + 1);
        }
        self.memo.borrow_mut().insert(label, c.bit);
        c.bit
    }

    fn evaluations(&self) -> u64 {
        self.evaluations.get()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{sample_instance, InstanceSpec, Variant};

    #[test]
    fn marks_match_ground_truth_small() {
        for k in [2, 3] {
            let inst = sample_instance(InstanceSpec::new(k, Variant::G1, 11)).unwrap();
            let o = inst.oracle();
            let truth = inst.weld_flags();
            let mut m = Marker::new(&o, k, AdviceConvention::OddHosts, 1);
            for (v, &t) in truth.iter().enumerate() {
                let c = m.classify_vertex(o.label_of(v));
                assert_eq!(c.diagnostic, None);
                assert_eq!(c.bit, t, "k={k} v={v}");
            }
        }
    }

    #[test]
    fn component_size_and_g2_malformed() {
        let k = 3;
        let inst = sample_instance(InstanceSpec::new(k, Variant::G1, 2)).unwrap();
        let o = inst.oracle();
        let root = o.label_of(inst.layout.root_of_tree(0) as usize);
        let c = build_modified_component(&o, root, k).unwrap();
        assert_eq!(c.labels.len(), 30);
        assert_eq!(c.roots.len(), 2);
        assert_eq!(o.queries(), 0);

        let inst = sample_instance(InstanceSpec::new(k, Variant::G2, 2)).unwrap();
        let o = inst.oracle();
        let root = o.label_of(inst.layout.root_of_tree(0) as usize);
        let c = build_modified_component(&o, root, k).unwrap();
        assert_eq!(c.roots.len(), 1);
        assert!(matches!(find_exit(&c, root, &WalkSchedule::new(k)), Err(MarkError::Malformed(_))));
    }
}
