//! The action interface shared by real oracles, the simulator and the
//! game environments.

use thiserror::Error;

use super::knowledge::{KnowledgeGraph, NodeId};
use crate::graph::VertexRole;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdvError {
    #[error("label pool exhausted: the experiment outgrew its design envelope")]
    ExperimentTooLong,
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error("action not available in this environment")]
    Unsupported,
}

/// The four actions, with the case split of III and IV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActionCase {
    /// I: query an unknown body label.
    UnknownBody,
    /// II: query an unknown antenna label.
    UnknownAntenna,
    /// III(a): known body label reached through an advice edge.
    KnownBodyViaAntenna,
    /// III(b): known body label reached through a body edge.
    KnownBodyViaBody,
    /// IV(a): known antenna label whose half-antenna is not yet revealed.
    KnownAntennaViaBody,
    /// IV(b): known antenna label inside a revealed half-antenna.
    KnownAntennaViaAntenna,
    /// Queries inside a bare (self-)welded tree.
    Tree,
}

impl ActionCase {
    pub fn name(self) -> &'static str {
        match self {
            ActionCase::UnknownBody => "I",
            ActionCase::UnknownAntenna => "II",
            ActionCase::KnownBodyViaAntenna => "IIIa",
            ActionCase::KnownBodyViaBody => "IIIb",
            ActionCase::KnownAntennaViaBody => "IVa",
            ActionCase::KnownAntennaViaAntenna => "IVb",
            ActionCase::Tree => "tree",
        }
    }
}

/// Win events. A1 and A2 are the tapped-base-graph conditions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Events {
    pub a1: bool,
    pub a2: bool,
    pub cycle: bool,
    pub root: bool,
}

impl Events {
    pub fn any(&self) -> bool {
        self.a1 || self.a2 || self.cycle || self.root
    }

    pub fn merge(&mut self, o: Events) {
        self.a1 |= o.a1;
        self.a2 |= o.a2;
        self.cycle |= o.cycle;
        self.root |= o.root;
    }
}

/// One query and what it revealed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepRecord {
    pub case: ActionCase,
    pub node: NodeId,
    pub fresh_body: u32,
    pub fresh_antenna: u32,
    pub events: Events,
}

impl StepRecord {
    /// The reveal type compared between simulator and oracle.
    pub fn reveal_type(&self) -> (ActionCase, u32, u32) {
        (self.case, self.fresh_body, self.fresh_antenna)
    }
}

pub trait Env {
    fn kg(&self) -> &KnowledgeGraph;

    /// Actions I and II: query a label of the given role that is not yet
    /// known. Returns its node.
    fn query_unknown(&mut self, role: VertexRole) -> Result<NodeId, AdvError>;

    /// Actions III and IV: query a known, not yet queried node.
    fn query_known(&mut self, n: NodeId) -> Result<(), AdvError>;

    fn queries(&self) -> u64;

    fn transcript(&self) -> &[StepRecord];

    /// Union of all events so far.
    fn events(&self) -> Events {
        let mut e = Events::default();
        for s in self.transcript() {
            e.merge(s.events);
        }
        e
    }
}

pub(crate) fn check_known(kg: &KnowledgeGraph, n: NodeId) -> Result<(), AdvError> {
    if n as usize >= kg.len() {
        return Err(AdvError::ContractViolation(format!("node {n} is outside the knowledge graph")));
    }
    if kg.node(n).queried {
        return Err(AdvError::ContractViolation(format!("node {n} was already queried")));
    }
    Ok(())
}
