//! Actions answered by a real (lazily sampled) instance, with the win
//! events tracked against the hidden base graphs.

use rand::seq::SliceRandom;
use rand::Rng as _;
use rustc_hash::FxHashMap;

use super::env::{check_known, ActionCase, AdvError, Env, Events, StepRecord};
use super::knowledge::{EdgeOutcome, KnowledgeGraph, NodeId, Provenance};
use super::simulator::half_antenna_size;
use crate::generators::layout::heap_depth;
use crate::generators::lazy::LazyInstance;
use crate::generators::{GenError, InstanceSpec, Node, Part};
use crate::graph::{EdgeKind, VertexRole};
use crate::seed;

#[derive(Default)]
struct Step {
    new_nodes: Vec<NodeId>,
    events: Events,
    fresh_body: u32,
    fresh_antenna: u32,
}

pub struct RealEnv {
    inst: LazyInstance,
    kg: KnowledgeGraph,
    node_of: FxHashMap<u64, NodeId>,
    vertex: Vec<u64>,
    in_half: Vec<bool>,
    known_body: u64,
    known_antenna: u64,
    rng: seed::Rng,
    queries: u64,
    transcript: Vec<StepRecord>,
}

impl RealEnv {
    /// `seed` drives the environment's own choices (which unknown label an
    /// Action I or II lands on); the instance comes from `spec.seed`.
    pub fn new(spec: InstanceSpec, seed: u64) -> Result<Self, GenError> {
        Ok(RealEnv {
            inst: LazyInstance::new(spec)?,
            kg: KnowledgeGraph::new(),
            node_of: FxHashMap::default(),
            vertex: Vec::new(),
            in_half: Vec::new(),
            known_body: 0,
            known_antenna: 0,
            rng: seed::stream(seed, "real-env", 0),
            queries: 0,
            transcript: Vec::new(),
        })
    }

    pub fn instance(&mut self) -> &mut LazyInstance {
        &mut self.inst
    }

    /// Hidden vertex behind a node.
    pub fn vertex_of(&self, n: NodeId) -> u64 {
        self.vertex[n as usize]
    }

    fn base(&self, v: u64) -> u64 {
        self.inst.layout.node(v).pair
    }

    fn role_count(&self) -> u64 {
        self.inst.layout.trees() * self.inst.layout.half()
    }

    /// Node for `v`, created with `provenance` if new.
    fn ensure(&mut self, v: u64, provenance: Provenance, step: &mut Step) -> NodeId {
        if let Some(&n) = self.node_of.get(&v) {
            return n;
        }
        let role = self.inst.layout.role(v);
        let n = self.kg.add_node(role, provenance);
        self.node_of.insert(v, n);
        self.vertex.push(v);
        self.in_half.push(false);
        step.new_nodes.push(n);
        match role {
            VertexRole::Body => {
                self.known_body += 1;
                step.fresh_body += 1;
            }
            VertexRole::Antenna => {
                self.known_antenna += 1;
                step.fresh_antenna += 1;
            }
            VertexRole::Root => step.events.root = true,
        }
        n
    }

    fn link(&mut self, a: NodeId, b: NodeId, kind: EdgeKind, step: &mut Step) {
        if let EdgeOutcome::Cycle { .. } = self.kg.add_edge(a, b, kind) {
            step.events.cycle = true;
        }
    }

    /// Adds the full neighbor list of `n` and marks it queried. Returns the
    /// node reached through its double edge, if any.
    fn expand(&mut self, n: NodeId, step: &mut Step) -> Option<NodeId> {
        let v = self.vertex[n as usize];
        let role = self.kg.node(n).role;
        let mut a = self.inst.answer_vertex(v);
        // adjacency order carries no structure: neighbors arrive shuffled
        a.neighbors.shuffle(&mut self.rng);
        let mut partner = None;
        for &(w, kind) in &a.neighbors {
            let m = self.ensure(w, Provenance::Via { from: role, kind }, step);
            self.link(n, m, kind, step);
            if kind == EdgeKind::Double {
                partner = Some(m);
            }
        }
        self.kg.set_queried(n, a.has_loop);
        partner
    }

    /// Reveals the half-antenna holding antenna node `n`.
    fn reveal_half_antenna(&mut self, n: NodeId, step: &mut Step) {
        let v = self.vertex[n as usize];
        let Node { pair, side, part: Part::Antenna(h) } = self.inst.layout.node(v) else { unreachable!("antenna node") };
        let top = h >> (heap_depth(h) - 1);
        let size = half_antenna_size(self.inst.layout.k);
        let mut ids = Vec::with_capacity(size as usize);
        for p in 1..=size {
            let d = heap_depth(p);
            let g = (top << d) + (p - (1 << d));
            let w = self.inst.layout.id(Node { pair, side, part: Part::Antenna(g) });
            let m = self.ensure(w, Provenance::HalfAntenna, step);
            if p > 1 {
                let parent = ids[(p / 2 - 1) as usize];
                self.link(parent, m, EdgeKind::Single, step);
            }
            ids.push(m);
        }
        for m in ids {
            self.in_half[m as usize] = true;
        }
    }

    /// Roots reached during the step are queried for free.
    fn expand_new_roots(&mut self, step: &mut Step) {
        let mut i = 0;
        while i < step.new_nodes.len() {
            let m = step.new_nodes[i];
            if self.kg.node(m).role == VertexRole::Root && !self.kg.node(m).queried {
                self.expand(m, step);
            }
            i += 1;
        }
    }

    fn finish(&mut self, case: ActionCase, n: NodeId, mut step: Step) {
        self.expand_new_roots(&mut step);
        if matches!(case, ActionCase::UnknownBody | ActionCase::UnknownAntenna) {
            // A1: anything revealed lies in a base graph tapped before the step
            let hit = step.new_nodes.iter().any(|&m| self.kg.is_tapped(self.base(self.vertex[m as usize])))
                || self.kg.node(n).edges.iter().any(|&(m, _)| !step.new_nodes.contains(&m) && self.kg.is_tapped(self.base(self.vertex[m as usize])));
            step.events.a1 |= hit;
        }
        for &m in &step.new_nodes {
            if self.kg.node(m).role != VertexRole::Root {
                let b = self.base(self.vertex[m as usize]);
                self.kg.tap(b);
            }
        }
        self.queries += 1;
        self.transcript.push(StepRecord { case, node: n, fresh_body: step.fresh_body, fresh_antenna: step.fresh_antenna, events: step.events });
    }

    fn sample_unknown(&mut self, role: VertexRole) -> Result<u64, AdvError> {
        let known = match role {
            VertexRole::Body => self.known_body,
            VertexRole::Antenna => self.known_antenna,
            VertexRole::Root => return Err(AdvError::Unsupported),
        };
        if known >= self.role_count() {
            return Err(AdvError::ExperimentTooLong);
        }
        let n = self.inst.vertex_count();
        loop {
            let v = self.rng.random_range(0..n);
            if self.inst.layout.role(v) == role && !self.node_of.contains_key(&v) {
                return Ok(v);
            }
        }
    }
}

impl Env for RealEnv {
    fn kg(&self) -> &KnowledgeGraph {
        &self.kg
    }

    fn query_unknown(&mut self, role: VertexRole) -> Result<NodeId, AdvError> {
        let v = self.sample_unknown(role)?;
        let mut step = Step::default();
        let n = self.ensure(v, Provenance::Fresh, &mut step);
        let case = if role == VertexRole::Antenna {
            self.reveal_half_antenna(n, &mut step);
            ActionCase::UnknownAntenna
        } else {
            ActionCase::UnknownBody
        };
        self.expand(n, &mut step);
        self.finish(case, n, step);
        Ok(n)
    }

    fn query_known(&mut self, n: NodeId) -> Result<(), AdvError> {
        check_known(&self.kg, n)?;
        let node = self.kg.node(n);
        let case = match node.role {
            VertexRole::Body if node.provenance == (Provenance::Via { from: VertexRole::Antenna, kind: EdgeKind::Double }) => ActionCase::KnownBodyViaAntenna,
            VertexRole::Body => ActionCase::KnownBodyViaBody,
            VertexRole::Antenna if self.in_half[n as usize] => ActionCase::KnownAntennaViaAntenna,
            VertexRole::Antenna => ActionCase::KnownAntennaViaBody,
            VertexRole::Root => unreachable!("roots are queried on arrival"),
        };
        let mut step = Step::default();
        // the advice partner as it stood before the query
        let v = self.vertex[n as usize];
        let partner_vertex = self.inst.advice_partner(v);
        let partner_before = partner_vertex.and_then(|p| self.node_of.get(&p).copied());
        let partner_edge_known = partner_before.is_some_and(|p| self.kg.has_edge(n, p, EdgeKind::Double));
        if case == ActionCase::KnownAntennaViaBody {
            self.reveal_half_antenna(n, &mut step);
        }
        self.expand(n, &mut step);
        if let Some(p) = partner_vertex {
            // A2: the advice edge leads into a base graph tapped before the step
            if !partner_edge_known && self.kg.is_tapped(self.base(p)) {
                step.events.a2 = true;
            }
        }
        self.finish(case, n, step);
        Ok(())
    }

    fn queries(&self) -> u64 {
        self.queries
    }

    fn transcript(&self) -> &[StepRecord] {
        &self.transcript
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::Variant;

    #[test]
    fn reveal_shapes_match_the_simulator_table() {
        let k = 6;
        let mut env = RealEnv::new(InstanceSpec::new(k, Variant::G1, 4), 9).unwrap();
        let v = env.query_unknown(VertexRole::Body).unwrap();
        let s = *env.transcript().last().unwrap();
        if !s.events.any() {
            assert_eq!((s.fresh_body, s.fresh_antenna), (4, 1));
        }
        let a = env.kg().node(v).edges.iter().find(|e| e.1 == EdgeKind::Double).unwrap().0;
        env.query_known(a).unwrap();
        let s = *env.transcript().last().unwrap();
        assert_eq!(s.case, ActionCase::KnownAntennaViaBody);
        if !s.events.any() {
            assert_eq!((s.fresh_body, s.fresh_antenna), (0, (1 << k) - 2));
        }
        let b = env.query_unknown(VertexRole::Antenna).unwrap();
        let s = *env.transcript().last().unwrap();
        if !s.events.any() {
            assert_eq!((s.fresh_body, s.fresh_antenna), (1, (1 << k) - 1));
        }
        assert_eq!(env.kg().node(b).role, VertexRole::Antenna);
        env.kg().check_closure().unwrap();
        assert_eq!(env.queries(), 3);
    }

    #[test]
    fn partner_already_tapped_sets_a2() {
        // querying both ends of advice edges eventually taps a base graph
        // twice; the exhaustive run must see A1 or A2 at some point
        let mut env = RealEnv::new(InstanceSpec::new(2, Variant::G1, 1), 1).unwrap();
        let mut events = Events::default();
        for _ in 0..40 {
            if env.query_unknown(VertexRole::Body).is_err() {
                break;
            }
            events.merge(env.events());
        }
        assert!(events.a1);
    }
}
