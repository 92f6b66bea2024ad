//! Yes-instances (candy ensembles) and the hard no-instances (double-bow-tie
//! ensembles).
//!
//! An instance is a sequence of pairs of depth-`k` root-joined trees. Each
//! pair is welded at its body leaves, each pair falls in a self-loop class
//! (zero, one or two loops on its roots) and every non-root vertex carries one
//! advice double edge whose far end sits in a pair of the matching class.

mod blueprint;
pub mod layout;
pub mod lazy;

use std::cell::OnceCell;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeKind, GraphBuilder, GraphError, GraphMeta, MultiGraph, OracleHandle, VariantTag, VertexRole, DOUBLE_BIT};
use crate::seed;
use blueprint::{Blueprint, Eager};
pub use layout::{Layout, Node, Part};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Candy ensemble welded along single alternating cycles.
    G1,
    /// Double-bow-tie ensemble: each body tree welded to itself.
    G2,
    /// General yes-instance with `j` blocks of pairs.
    #[serde(rename = "yes")]
    YesGeneral,
}

impl Variant {
    pub fn tag(self) -> VariantTag {
        match self {
            Variant::G1 => VariantTag::G1,
            Variant::G2 => VariantTag::G2,
            Variant::YesGeneral => VariantTag::Yes,
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "g1" => Ok(Variant::G1),
            "g2" => Ok(Variant::G2),
            "yes" => Ok(Variant::YesGeneral),
            other => Err(format!("unknown variant `{other}` (expected g1, g2 or yes)")),
        }
    }
}

/// Which loop class hosts the advice edges of weld vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdviceConvention {
    /// Welds point into one-loop pairs; odd parity marks a weld.
    #[default]
    #[serde(rename = "odd")]
    OddHosts,
    /// Welds point into even pairs; even parity marks a weld.
    #[serde(rename = "even")]
    EvenHosts,
}

impl AdviceConvention {
    /// The marking implied by the loop count of the pair an advice edge
    /// lands in.
    pub fn marking_for_parity(self, loops: u32) -> bool {
        match self {
            AdviceConvention::OddHosts => loops % 2 == 1,
            AdviceConvention::EvenHosts => loops.is_multiple_of(2),
        }
    }
}

impl std::str::FromStr for AdviceConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "odd" => Ok(AdviceConvention::OddHosts),
            "even" => Ok(AdviceConvention::EvenHosts),
            other => Err(format!("unknown advice convention `{other}` (expected odd or even)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub k: u32,
    pub variant: Variant,
    pub j: u64,
    pub seed: u64,
    pub single_long_weld: bool,
    #[serde(default)]
    pub convention: AdviceConvention,
}

impl InstanceSpec {
    pub fn new(k: u32, variant: Variant, seed: u64) -> Self {
        InstanceSpec { k, variant, j: 1, seed, single_long_weld: true, convention: AdviceConvention::OddHosts }
    }

    pub fn with_j(mut self, j: u64) -> Self {
        self.j = j;
        self
    }

    pub fn with_convention(mut self, c: AdviceConvention) -> Self {
        self.convention = c;
        self
    }

    pub fn with_single_long_weld(mut self, on: bool) -> Self {
        self.single_long_weld = on;
        self
    }

    /// `j` as used for sizing: G1 and G2 always use one block.
    pub fn blocks(&self) -> u64 {
        match self.variant {
            Variant::YesGeneral => self.j,
            _ => 1,
        }
    }

    pub fn pairs(&self) -> u64 {
        2 * self.blocks() * ((1u64 << self.k) - 1)
    }

    pub fn layout(&self) -> Layout {
        Layout::new(self.k, self.pairs())
    }

    pub fn mode(&self) -> WeldMode {
        match self.variant {
            Variant::G2 => WeldMode::SelfWeld,
            _ => WeldMode::Alternating,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WeldMode {
    Alternating,
    SelfWeld,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LoopClass {
    Zero,
    One,
    Two,
}

impl LoopClass {
    pub fn loops(self) -> u32 {
        match self {
            LoopClass::Zero => 0,
            LoopClass::One => 1,
            LoopClass::Two => 2,
        }
    }
}

/// Number of pairs in each loop class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub zero: u64,
    pub one: u64,
    pub two: u64,
}

impl ClassCounts {
    pub fn for_instance(k: u32, blocks: u64, convention: AdviceConvention) -> Self {
        let half = 1u64 << (k - 1);
        match convention {
            AdviceConvention::OddHosts => ClassCounts { one: blocks * 2 * half, two: blocks * (half - 1), zero: blocks * (half - 1) },
            AdviceConvention::EvenHosts => ClassCounts { one: blocks * (2 * half - 2), two: blocks * half, zero: blocks * half },
        }
    }

    pub fn total(&self) -> u64 {
        self.zero + self.one + self.two
    }

    pub fn even(&self) -> u64 {
        self.zero + self.two
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("depth k={0} is below the minimum {1}")]
    DepthTooSmall(u32, u32),
    #[error("weld sides have {0} and {1} leaves")]
    LeafCountMismatch(usize, usize),
    #[error("a self-weld on {0} leaves would be a doubled edge")]
    DegenerateWeld(usize),
    #[error("expected a multiple of {expected} pairs, found {found}")]
    PairCount { expected: u64, found: u64 },
    #[error("j must be positive")]
    ZeroBlocks,
    #[error("instance with {0} vertices is too large to materialize")]
    TooLarge(u64),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// The smallest depth at which welds are simple cycles.
pub const MIN_K: u32 = 2;

/// A depth-`k` root-joined binary tree: vertex 0 is the root, antenna and
/// body nodes follow in heap order.
#[derive(Debug, Clone)]
pub struct TreeFragment {
    pub k: u32,
    pub graph: MultiGraph,
    /// Body leaves in heap order.
    pub weld_candidates: Vec<usize>,
}

pub fn make_root_joined_tree(k: u32) -> Result<TreeFragment, GenError> {
    if k == 0 {
        return Err(GenError::DepthTooSmall(k, 1));
    }
    let lay = Layout::new(k, 1);
    let t = lay.tree_size() as usize;
    let mut b = GraphBuilder::new(t);
    for v in 0..t {
        b.set_role(v, lay.role(v as u64));
        for w in lay.tree_neighbors(v as u64) {
            if (w as usize) > v {
                b.add_single(v, w as usize);
            }
        }
    }
    let weld_candidates = (0..lay.leaves()).map(|i| lay.weld_leaf(0, 0, i) as usize).collect();
    Ok(TreeFragment { k, graph: b.build()?, weld_candidates })
}

/// Two trees side by side plus their weld cycle(s).
#[derive(Debug, Clone)]
pub struct WeldFragment {
    pub graph: MultiGraph,
    /// Each weld cycle as a vertex sequence, ids in the combined graph
    /// (second tree offset by the first tree's size).
    pub cycles: Vec<Vec<usize>>,
}

pub fn weld_pair(t1: &TreeFragment, t2: &TreeFragment, mode: WeldMode, rng: &mut seed::Rng) -> Result<WeldFragment, GenError> {
    use rand::seq::SliceRandom;
    let (n1, n2) = (t1.weld_candidates.len(), t2.weld_candidates.len());
    if n1 != n2 {
        return Err(GenError::LeafCountMismatch(n1, n2));
    }
    if mode == WeldMode::SelfWeld && n1 <= 2 {
        return Err(GenError::DegenerateWeld(n1));
    }
    let off = t1.graph.vertex_count();
    let mut b = GraphBuilder::new(off + t2.graph.vertex_count());
    for (base, g) in [(0, &t1.graph), (off, &t2.graph)] {
        for v in 0..g.vertex_count() {
            b.set_role(base + v, g.role(v));
            for (w, kind) in g.neighbors(v) {
                if w > v {
                    b.add_edge(base + v, base + w, kind);
                }
            }
        }
    }
    let left: Vec<usize> = t1.weld_candidates.clone();
    let right: Vec<usize> = t2.weld_candidates.iter().map(|&x| x + off).collect();
    let cycles = match mode {
        WeldMode::Alternating => {
            let mut sigma = left;
            let mut tau = right;
            sigma.shuffle(rng);
            tau.shuffle(rng);
            vec![sigma.iter().zip(&tau).flat_map(|(&a, &b)| [a, b]).collect::<Vec<_>>()]
        }
        WeldMode::SelfWeld => {
            let mut a = left;
            let mut c = right;
            a.shuffle(rng);
            c.shuffle(rng);
            vec![a, c]
        }
    };
    for cyc in &cycles {
        for i in 0..cyc.len() {
            b.add_single(cyc[i], cyc[(i + 1) % cyc.len()]);
        }
    }
    Ok(WeldFragment { graph: b.build()?, cycles })
}

/// Loop classes of all pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopAssignment {
    pub classes: Vec<LoopClass>,
    /// `loops[p][side]`: whether the root on `side` of pair `p` has a loop.
    pub loops: Vec<[bool; 2]>,
}

impl LoopAssignment {
    pub fn counts(&self) -> ClassCounts {
        let mut c = ClassCounts { zero: 0, one: 0, two: 0 };
        for cl in &self.classes {
            match cl {
                LoopClass::Zero => c.zero += 1,
                LoopClass::One => c.one += 1,
                LoopClass::Two => c.two += 1,
            }
        }
        c
    }

    pub fn total_loops(&self) -> u64 {
        self.loops.iter().map(|l| u64::from(l[0]) + u64::from(l[1])).sum()
    }
}

fn check_pairs(k: u32, pairs: u64) -> Result<u64, GenError> {
    if k < MIN_K {
        return Err(GenError::DepthTooSmall(k, MIN_K));
    }
    let unit = 2 * ((1u64 << k) - 1);
    if pairs == 0 || !pairs.is_multiple_of(unit) {
        return Err(GenError::PairCount { expected: unit, found: pairs });
    }
    Ok(pairs / unit)
}

/// Uniformly random assignment of pairs to loop classes with the sizes of
/// [`ClassCounts::for_instance`]; one-loop pairs put the loop on a uniform
/// root.
pub fn assign_self_loops(k: u32, pairs: u64, convention: AdviceConvention, seed: u64) -> Result<LoopAssignment, GenError> {
    let blocks = check_pairs(k, pairs)?;
    let lay = Layout::new(k, pairs);
    let counts = ClassCounts::for_instance(k, blocks, convention);
    let mut bp = Blueprint::new(lay, WeldMode::Alternating, convention, counts, Eager(seed), Eager(seed), seed::derive(seed, "gen/loop-side", 0), None);
    Ok(loops_of(&mut bp))
}

fn loops_of(bp: &mut Blueprint<Eager>) -> LoopAssignment {
    let pairs = bp.layout.pairs;
    let mut classes = Vec::with_capacity(pairs as usize);
    let mut loops = Vec::with_capacity(pairs as usize);
    for p in 0..pairs {
        classes.push(bp.class(p));
        loops.push([bp.root_has_loop(p, 0), bp.root_has_loop(p, 1)]);
    }
    LoopAssignment { classes, loops }
}

/// The advice double edges `(body, antenna)` of an instance layout, wired by
/// uniformly random bijections into the pairs of the matching loop class.
pub fn assign_advice_edges(k: u32, pairs: u64, convention: AdviceConvention, seed: u64) -> Result<Vec<(u64, u64)>, GenError> {
    let blocks = check_pairs(k, pairs)?;
    let lay = Layout::new(k, pairs);
    let counts = ClassCounts::for_instance(k, blocks, convention);
    let mut bp = Blueprint::new(lay, WeldMode::Alternating, convention, counts, Eager(seed), Eager(seed), seed::derive(seed, "gen/loop-side", 0), None);
    let mut out = Vec::with_capacity((lay.vertex_count() / 2) as usize);
    for v in 0..lay.vertex_count() {
        if lay.role(v) == VertexRole::Body {
            let a = bp.advice_partner(v).expect("body non-root has a partner");
            out.push((v, a));
        }
    }
    Ok(out)
}

/// Class sizes and role counts of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleCensus {
    pub vertices: u64,
    pub roots: u64,
    pub weld: u64,
    pub interior: u64,
    pub antenna: u64,
    /// Antenna vertices in one-loop pairs.
    pub antenna_one_loop: u64,
    /// Antenna vertices in pairs with an even number of loops.
    pub antenna_even: u64,
    pub classes: ClassCounts,
    pub loops: u64,
}

impl RoleCensus {
    /// Closed forms for `blocks` blocks of `2(2^k - 1)` pairs.
    pub fn closed_form(k: u32, blocks: u64, convention: AdviceConvention) -> Self {
        let two_k = 1u64 << k;
        let pairs = 2 * blocks * (two_k - 1);
        let classes = ClassCounts::for_instance(k, blocks, convention);
        let per_pair_antenna = 2 * (2 * two_k - 2);
        RoleCensus {
            vertices: pairs * (8 * two_k - 6),
            roots: 2 * pairs,
            weld: pairs * 2 * two_k,
            interior: pairs * 2 * (two_k - 2),
            antenna: pairs * per_pair_antenna,
            antenna_one_loop: classes.one * per_pair_antenna,
            antenna_even: classes.even() * per_pair_antenna,
            classes,
            loops: classes.one + 2 * classes.two,
        }
    }

    /// Number of vertices in one candy graph.
    pub fn candy_size(k: u32) -> u64 {
        (1u64 << (k + 3)) - 6
    }
}

/// A materialized instance.
#[derive(Debug)]
pub struct Instance {
    pub spec: InstanceSpec,
    pub layout: Layout,
    pub loops: LoopAssignment,
    graph: Arc<MultiGraph>,
    oracle: OnceCell<OracleHandle>,
}

/// Largest vertex count assembled eagerly.
pub const MAX_EAGER_VERTICES: u64 = (DOUBLE_BIT as u64) - 1;

pub fn sample_instance(spec: InstanceSpec) -> Result<Instance, GenError> {
    if spec.k < MIN_K {
        return Err(GenError::DepthTooSmall(spec.k, MIN_K));
    }
    if spec.blocks() == 0 {
        return Err(GenError::ZeroBlocks);
    }
    let lay = spec.layout();
    let n = lay.vertex_count();
    if n > MAX_EAGER_VERTICES || spec.k > 16 {
        return Err(GenError::TooLarge(n));
    }
    let mut bp = blueprint_for(&spec, Eager(spec.seed), Eager(weld_seed(&spec)));
    let loops = loops_of(&mut bp);

    // two passes: row sizes are fixed by the layout, so fill in place
    let n = n as usize;
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0u32);
    let mut total = 0u32;
    for v in 0..n as u64 {
        let node = lay.node(v);
        let len = match node.part {
            Part::Root => 4,
            Part::Antenna(h) | Part::Body(h) if layout::heap_depth(h) < spec.k => 4,
            Part::Antenna(_) => 2,
            Part::Body(_) => 4,
        };
        total += len;
        offsets.push(total);
    }
    let mut entries = vec![0u32; total as usize];
    let mut roles = Vec::with_capacity(n);
    let mut loop_flags = Vec::with_capacity(n);
    let mut row = Vec::with_capacity(5);
    for v in 0..n {
        let has_loop = bp.row(v as u64, &mut row);
        let start = offsets[v] as usize;
        debug_assert_eq!(row.len(), (offsets[v + 1] - offsets[v]) as usize);
        for (slot, &(w, kind)) in entries[start..start + row.len()].iter_mut().zip(&row) {
            *slot = match kind {
                EdgeKind::Single => w as u32,
                EdgeKind::Double => w as u32 | DOUBLE_BIT,
            };
        }
        roles.push(lay.role(v as u64));
        loop_flags.push(has_loop);
    }
    let graph = MultiGraph::from_rows(offsets, entries, roles, loop_flags)?;
    Ok(Instance { spec, layout: lay, loops, graph: Arc::new(graph), oracle: OnceCell::new() })
}

fn weld_seed(spec: &InstanceSpec) -> u64 {
    let role = match spec.variant {
        Variant::G1 => "gen/weld/g1",
        Variant::G2 => "gen/weld/g2",
        Variant::YesGeneral => "gen/weld/yes",
    };
    seed::derive(spec.seed, role, 0)
}

fn blueprint_for<S: blueprint::PermSource>(spec: &InstanceSpec, shared: S, weld: S) -> Blueprint<S> {
    let block_seed = (spec.variant == Variant::YesGeneral && !spec.single_long_weld).then(|| seed::derive(spec.seed, "gen/blocks", 0));
    Blueprint::new(
        spec.layout(),
        spec.mode(),
        spec.convention,
        ClassCounts::for_instance(spec.k, spec.blocks(), spec.convention),
        shared,
        weld,
        seed::derive(spec.seed, "gen/loop-side", 0),
        block_seed,
    )
}

impl Instance {
    pub fn graph(&self) -> &MultiGraph {
        &self.graph
    }

    pub fn graph_arc(&self) -> Arc<MultiGraph> {
        Arc::clone(&self.graph)
    }

    pub fn meta(&self) -> GraphMeta {
        GraphMeta { k: self.spec.k, variant: self.spec.variant.tag() }
    }

    /// A query-counted oracle with a fresh counter. All handles of one
    /// instance share the labeling drawn from the instance seed.
    pub fn oracle(&self) -> OracleHandle {
        self.oracle.get_or_init(|| OracleHandle::new(Arc::clone(&self.graph), seed::derive(self.spec.seed, "oracle", 0))).fork()
    }

    /// Ground-truth weld flag per vertex id: body leaves.
    pub fn weld_flags(&self) -> Vec<bool> {
        (0..self.layout.vertex_count()).map(|v| self.layout.is_weld(v)).collect()
    }

    /// Marking read off the advice edges: a body vertex is marked when the
    /// loop count of the pair its double edge lands in has the weld parity.
    /// Equals [`Instance::weld_flags`] on yes-instances.
    pub fn parity_flags(&self) -> Vec<bool> {
        let g = &self.graph;
        (0..g.vertex_count())
            .map(|v| {
                g.role(v) == VertexRole::Body
                    && g.double_neighbors(v).next().is_some_and(|a| {
                        let pair = self.layout.node(a as u64).pair as usize;
                        self.spec.convention.marking_for_parity(self.loops.classes[pair].loops())
                    })
            })
            .collect()
    }

    /// Brute-force recount of the census from the layout and loop assignment.
    pub fn census(&self) -> RoleCensus {
        let lay = &self.layout;
        let g = &self.graph;
        let mut c = RoleCensus {
            vertices: g.vertex_count() as u64,
            roots: 0,
            weld: 0,
            interior: 0,
            antenna: 0,
            antenna_one_loop: 0,
            antenna_even: 0,
            classes: self.loops.counts(),
            loops: self.loops.total_loops(),
        };
        for v in 0..g.vertex_count() {
            match g.role(v) {
                VertexRole::Root => c.roots += 1,
                VertexRole::Antenna => {
                    c.antenna += 1;
                    match self.loops.classes[lay.node(v as u64).pair as usize] {
                        LoopClass::One => c.antenna_one_loop += 1,
                        _ => c.antenna_even += 1,
                    }
                }
                VertexRole::Body => {
                    if lay.is_weld(v as u64) {
                        c.weld += 1
                    } else {
                        c.interior += 1
                    }
                }
            }
        }
        c
    }
}

/// Subgraph induced by the vertices with `keep[v]`, renumbered in order.
pub fn induced_subgraph(g: &MultiGraph, keep: &[bool]) -> Result<MultiGraph, GraphError> {
    let mut index = vec![usize::MAX; g.vertex_count()];
    let mut n = 0;
    for v in 0..g.vertex_count() {
        if keep[v] {
            index[v] = n;
            n += 1;
        }
    }
    let mut b = GraphBuilder::new(n);
    for v in 0..g.vertex_count() {
        if !keep[v] {
            continue;
        }
        b.set_role(index[v], g.role(v)).set_loop(index[v], g.has_loop(v));
        for (w, kind) in g.neighbors(v) {
            if keep[w] && w > v {
                b.add_edge(index[v], index[w], kind);
            }
        }
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_joined_tree_sizes() {
        let t = make_root_joined_tree(1).unwrap();
        assert_eq!(t.graph.vertex_count(), 5);
        let t = make_root_joined_tree(3).unwrap();
        assert_eq!(t.graph.vertex_count(), 29);
        assert_eq!(t.graph.edge_counts().0, 28);
        assert_eq!(t.weld_candidates.len(), 8);
        assert!(make_root_joined_tree(0).is_err());
    }

    #[test]
    fn class_counts_k3() {
        let c = ClassCounts::for_instance(3, 1, AdviceConvention::OddHosts);
        assert_eq!((c.one, c.two, c.zero), (8, 3, 3));
        let c = ClassCounts::for_instance(3, 1, AdviceConvention::EvenHosts);
        assert_eq!((c.one, c.two, c.zero), (6, 4, 4));
    }

    #[test]
    fn small_instance_is_valid() {
        for variant in [Variant::G1, Variant::G2] {
            let inst = sample_instance(InstanceSpec::new(2, variant, 1)).unwrap();
            assert_eq!(inst.graph().vertex_count() as u64, inst.census().vertices);
            assert_eq!(inst.census(), RoleCensus::closed_form(2, 1, AdviceConvention::OddHosts));
        }
    }

    #[test]
    fn parity_marking_recovers_welds_on_yes_instances() {
        for convention in [AdviceConvention::OddHosts, AdviceConvention::EvenHosts] {
            let inst = sample_instance(InstanceSpec::new(3, Variant::G1, 4).with_convention(convention)).unwrap();
            assert_eq!(inst.parity_flags(), inst.weld_flags());
        }
    }
}
