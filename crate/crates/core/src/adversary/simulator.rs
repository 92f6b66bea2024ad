//! The simulator that answers every action with fresh labels.

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::env::{check_known, ActionCase, AdvError, Env, Events, StepRecord};
use super::knowledge::{KnowledgeGraph, NodeId, Provenance};
use crate::generators::Layout;
use crate::graph::{EdgeKind, VertexRole};
use crate::seed;

/// Positions `1..2^k` of a half-antenna in heap order, parent of `p` at `p/2`.
pub(crate) fn half_antenna_size(k: u32) -> u64 {
    (1u64 << k) - 1
}

pub struct Simulator {
    k: u32,
    kg: KnowledgeGraph,
    body_pool: u64,
    antenna_pool: u64,
    in_half: Vec<bool>,
    rng: seed::Rng,
    queries: u64,
    transcript: Vec<StepRecord>,
}

impl Simulator {
    /// Pools sized like an instance with the given layout.
    pub fn new(layout: Layout, seed: u64) -> Self {
        let per_role = layout.trees() * layout.half();
        Simulator {
            k: layout.k,
            kg: KnowledgeGraph::new(),
            body_pool: per_role,
            antenna_pool: per_role,
            in_half: Vec::new(),
            rng: seed::stream(seed, "simulator", 0),
            queries: 0,
            transcript: Vec::new(),
        }
    }

    fn fresh(&mut self, role: VertexRole, provenance: Provenance) -> Result<NodeId, AdvError> {
        let pool = match role {
            VertexRole::Body => &mut self.body_pool,
            VertexRole::Antenna => &mut self.antenna_pool,
            VertexRole::Root => return Err(AdvError::Unsupported),
        };
        if *pool == 0 {
            return Err(AdvError::ExperimentTooLong);
        }
        *pool -= 1;
        let n = self.kg.add_node(role, provenance);
        self.in_half.push(false);
        Ok(n)
    }

    /// Fresh neighbors of `from`, created in a uniformly shuffled order.
    fn attach(&mut self, from: NodeId, bodies: u32, antenna_kind: Option<EdgeKind>, body_kind: EdgeKind) -> Result<(), AdvError> {
        let from_role = self.kg.node(from).role;
        let mut slots: Vec<(VertexRole, EdgeKind)> = vec![(VertexRole::Body, body_kind); bodies as usize];
        if let Some(kind) = antenna_kind {
            slots.push((VertexRole::Antenna, kind));
        }
        slots.shuffle(&mut self.rng);
        for (role, kind) in slots {
            let w = self.fresh(role, Provenance::Via { from: from_role, kind })?;
            self.kg.add_edge(from, w, kind);
        }
        Ok(())
    }

    /// A complete half-antenna containing `at` at a uniform position. Returns
    /// the number of fresh labels used.
    fn half_antenna(&mut self, at: NodeId) -> Result<u32, AdvError> {
        let size = half_antenna_size(self.k);
        let pos = self.rng.random_range(1..=size);
        let mut ids = Vec::with_capacity(size as usize);
        for p in 1..=size {
            let id = if p == pos { at } else { self.fresh(VertexRole::Antenna, Provenance::HalfAntenna)? };
            if p > 1 {
                self.kg.add_edge(ids[(p / 2 - 1) as usize], id, EdgeKind::Single);
            }
            ids.push(id);
        }
        for &id in &ids {
            self.in_half[id as usize] = true;
        }
        Ok(size as u32 - 1)
    }

    fn record(&mut self, case: ActionCase, node: NodeId, fresh_body: u32, fresh_antenna: u32) {
        self.queries += 1;
        self.kg.set_queried(node, false);
        self.transcript.push(StepRecord { case, node, fresh_body, fresh_antenna, events: Events::default() });
    }
}

impl Env for Simulator {
    fn kg(&self) -> &KnowledgeGraph {
        &self.kg
    }

    fn query_unknown(&mut self, role: VertexRole) -> Result<NodeId, AdvError> {
        match role {
            VertexRole::Body => {
                let v = self.fresh(VertexRole::Body, Provenance::Fresh)?;
                self.attach(v, 3, Some(EdgeKind::Double), EdgeKind::Single)?;
                self.record(ActionCase::UnknownBody, v, 4, 1);
                Ok(v)
            }
            VertexRole::Antenna => {
                let a = self.fresh(VertexRole::Antenna, Provenance::Fresh)?;
                let extra = self.half_antenna(a)?;
                self.attach(a, 1, None, EdgeKind::Double)?;
                self.record(ActionCase::UnknownAntenna, a, 1, extra + 1);
                Ok(a)
            }
            VertexRole::Root => Err(AdvError::Unsupported),
        }
    }

    fn query_known(&mut self, n: NodeId) -> Result<(), AdvError> {
        check_known(&self.kg, n)?;
        let node = self.kg.node(n);
        match node.role {
            VertexRole::Body => {
                if node.provenance == (Provenance::Via { from: VertexRole::Antenna, kind: EdgeKind::Double }) {
                    self.attach(n, 3, None, EdgeKind::Single)?;
                    self.record(ActionCase::KnownBodyViaAntenna, n, 3, 0);
                } else {
                    self.attach(n, 2, Some(EdgeKind::Double), EdgeKind::Single)?;
                    self.record(ActionCase::KnownBodyViaBody, n, 2, 1);
                }
            }
            VertexRole::Antenna => {
                if self.in_half[n as usize] {
                    self.attach(n, 1, None, EdgeKind::Double)?;
                    self.record(ActionCase::KnownAntennaViaAntenna, n, 1, 0);
                } else {
                    let extra = self.half_antenna(n)?;
                    self.record(ActionCase::KnownAntennaViaBody, n, 0, extra);
                }
            }
            VertexRole::Root => return Err(AdvError::ContractViolation("the simulator never reveals roots".into())),
        }
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

    #[test]
    fn responses_follow_the_case_table() {
        let k = 3;
        let mut s = Simulator::new(Layout::new(k, 14), 1);
        let v = s.query_unknown(VertexRole::Body).unwrap();
        assert_eq!(s.kg().len(), 5);
        let a = s.kg().node(v).edges.iter().find(|e| e.1 == EdgeKind::Double).unwrap().0;
        s.query_known(a).unwrap();
        // half-antenna of 2^k - 1 nodes around a
        assert_eq!(s.kg().len(), 5 + 6);
        let b = s.query_unknown(VertexRole::Antenna).unwrap();
        assert_eq!(s.transcript().last().unwrap().fresh_antenna, 7);
        let partner = s.kg().node(b).edges.iter().find(|e| e.1 == EdgeKind::Double).unwrap().0;
        s.query_known(partner).unwrap();
        assert_eq!(s.transcript().last().unwrap().case, ActionCase::KnownBodyViaAntenna);
        let child = s.kg().node(v).edges.iter().find(|e| e.1 == EdgeKind::Single).unwrap().0;
        s.query_known(child).unwrap();
        assert_eq!(s.transcript().last().unwrap().reveal_type(), (ActionCase::KnownBodyViaBody, 2, 1));
        assert!(s.query_known(child).is_err());
        s.kg().check_closure().unwrap();
        assert!(!s.kg().has_cycle());
    }
}
