//! Query strategies that run unchanged against every environment.

use rand::Rng as _;

use super::env::{AdvError, Env};
use super::knowledge::{KnowledgeGraph, NodeId};
use crate::graph::{EdgeKind, VertexRole};
use crate::seed;

/// Random walks stop after this many moves per query of budget.
pub const WALK_MOVES_PER_QUERY: u64 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Strategy {
    /// Walks to a uniform known neighbor, querying each new position.
    RandomWalk,
    /// Queries known nodes in discovery order; opens a fresh body label when
    /// the frontier runs dry.
    Bfs,
    /// From a fresh body label, queries its advice partner, then the top of
    /// the revealed half-antenna, which touches a root.
    ParityProber,
    /// Makes no queries.
    Constant,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::RandomWalk, Strategy::Bfs, Strategy::ParityProber, Strategy::Constant];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::RandomWalk => "random-walk",
            Strategy::Bfs => "bfs",
            Strategy::ParityProber => "parity-prober",
            Strategy::Constant => "constant",
        }
    }

    /// Whether the strategy can play the tree games, which offer no fresh
    /// labels and no advice edges.
    pub fn plays_tree_games(self) -> bool {
        self != Strategy::ParityProber
    }

    /// Spends at most `budget` queries.
    pub fn explore<E: Env + ?Sized>(self, env: &mut E, budget: u64, rng: &mut seed::Rng) -> Result<(), AdvError> {
        match self {
            Strategy::RandomWalk => random_walk(env, budget, rng),
            Strategy::Bfs => bfs(env, budget),
            Strategy::ParityProber => parity_prober(env, budget),
            Strategy::Constant => Ok(()),
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown strategy `{s}` (expected random-walk, bfs, parity-prober or constant)"))
    }
}

/// Guesses G2 exactly when an odd cycle of single edges is known.
pub fn guess_is_g2(kg: &KnowledgeGraph) -> bool {
    kg.has_odd_cycle()
}

/// The first known node, or a fresh label of a role picked by coin.
fn entry<E: Env + ?Sized>(env: &mut E, rng: &mut seed::Rng) -> Result<NodeId, AdvError> {
    if !env.kg().is_empty() {
        return Ok(0);
    }
    let role = if rng.random_bool(0.5) { VertexRole::Body } else { VertexRole::Antenna };
    env.query_unknown(role)
}

fn random_walk<E: Env + ?Sized>(env: &mut E, budget: u64, rng: &mut seed::Rng) -> Result<(), AdvError> {
    if budget == 0 {
        return Ok(());
    }
    let mut cur = entry(env, rng)?;
    let mut moves = 0;
    while env.queries() < budget {
        if !env.kg().node(cur).queried {
            env.query_known(cur)?;
            continue;
        }
        let edges = &env.kg().node(cur).edges;
        if edges.is_empty() || moves >= WALK_MOVES_PER_QUERY * budget {
            break;
        }
        cur = edges[rng.random_range(0..edges.len())].0;
        moves += 1;
    }
    Ok(())
}

fn bfs<E: Env + ?Sized>(env: &mut E, budget: u64) -> Result<(), AdvError> {
    let mut next = 0;
    while env.queries() < budget {
        let kg = env.kg();
        while next < kg.len() && kg.node(next as NodeId).queried {
            next += 1;
        }
        if next == kg.len() {
            match env.query_unknown(VertexRole::Body) {
                Ok(_) => {}
                // nothing left to open
                Err(AdvError::Unsupported | AdvError::ExperimentTooLong) => break,
                Err(e) => return Err(e),
            }
        } else {
            env.query_known(next as NodeId)?;
        }
    }
    Ok(())
}

fn single_degree(kg: &KnowledgeGraph, n: NodeId) -> usize {
    kg.node(n).edges.iter().filter(|e| e.1 == EdgeKind::Single).count()
}

fn parity_prober<E: Env + ?Sized>(env: &mut E, budget: u64) -> Result<(), AdvError> {
    while env.queries() < budget {
        let v = env.query_unknown(VertexRole::Body)?;
        let Some(&(a, _)) = env.kg().node(v).edges.iter().find(|e| e.1 == EdgeKind::Double) else {
            continue;
        };
        if env.queries() >= budget || env.kg().node(a).queried {
            continue;
        }
        let before = env.kg().len() as NodeId;
        env.query_known(a)?;
        if env.queries() >= budget {
            break;
        }
        let kg = env.kg();
        let top = std::iter::once(a)
            .chain(before..kg.len() as NodeId)
            .find(|&m| kg.node(m).role == VertexRole::Antenna && !kg.node(m).queried && single_degree(kg, m) == 2);
        if let Some(top) = top {
            env.query_known(top)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::Simulator;
    use crate::generators::Layout;

    #[test]
    fn strategies_respect_the_budget() {
        for s in Strategy::ALL {
            for budget in [0, 1, 5, 17] {
                let mut env = Simulator::new(Layout::new(5, 64), 3);
                let mut rng = seed::stream(1, "t", 0);
                s.explore(&mut env, budget, &mut rng).unwrap();
                assert!(env.queries() <= budget, "{} spent {}", s.name(), env.queries());
                if s == Strategy::Bfs || s == Strategy::ParityProber {
                    assert_eq!(env.queries(), budget);
                }
            }
        }
    }

    #[test]
    fn prober_reaches_a_root_on_real_instances() {
        use crate::adversary::RealEnv;
        use crate::generators::{InstanceSpec, Variant};
        let mut env = RealEnv::new(InstanceSpec::new(4, Variant::G1, 2), 2).unwrap();
        let mut rng = seed::stream(1, "t", 0);
        Strategy::ParityProber.explore(&mut env, 3, &mut rng).unwrap();
        assert!(env.events().root);
    }
}
