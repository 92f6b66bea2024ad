//! Games A to D on bare welded and self-welded trees.

use rand::Rng as _;
use rustc_hash::FxHashMap;
use thiserror::Error;

use super::env::{check_known, ActionCase, AdvError, Env, Events, StepRecord};
use super::knowledge::{EdgeOutcome, KnowledgeGraph, NodeId, Provenance};
use super::strategy::Strategy;
use crate::generators::layout::heap_depth;
use crate::graph::{EdgeKind, VertexRole};
use crate::perm::{LazyPerm, Permutation};
use crate::seed;
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Game {
    /// Cycle in a self-welded tree, starting at its root.
    A,
    /// Root or cycle in a self-welded tree from a uniform start.
    B,
    /// Other root or cycle in a welded tree, starting at a root.
    C,
    /// Root or cycle in a welded tree from a uniform start.
    D,
}

impl Game {
    pub fn welded(self) -> bool {
        matches!(self, Game::C | Game::D)
    }

    pub fn random_start(self) -> bool {
        matches!(self, Game::B | Game::D)
    }

    pub fn name(self) -> &'static str {
        match self {
            Game::A => "A",
            Game::B => "B",
            Game::C => "C",
            Game::D => "D",
        }
    }
}

impl std::str::FromStr for Game {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(Game::A),
            "B" | "b" => Ok(Game::B),
            "C" | "c" => Ok(Game::C),
            "D" | "d" => Ok(Game::D),
            other => Err(format!("unknown game `{other}` (expected A, B, C or D)")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("budget t={t} exceeds 2^(k-1) = {max}")]
    BudgetTooLarge { t: u64, max: u64 },
    #[error("depth k={0} is below 2")]
    DepthTooSmall(u32),
    #[error(transparent)]
    Adversary(#[from] AdvError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct GameSpec {
    pub game: Game,
    pub k: u32,
    pub t: u64,
    pub trials: u64,
}

impl GameSpec {
    pub fn validate(&self) -> Result<(), GameError> {
        if self.k < 2 {
            return Err(GameError::DepthTooSmall(self.k));
        }
        let max = 1u64 << (self.k - 1);
        if self.t > max {
            return Err(GameError::BudgetTooLarge { t: self.t, max });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Start {
    Root,
    Uniform,
    /// A fixed vertex id (tree `t`, heap `h` at `t * (2^{k+1}-1) + h - 1`).
    Vertex(u64),
}

/// Two depth-k binary trees with their leaves joined by a random cycle:
/// alternating between the trees (welded) or within each tree
/// (self-welded). The cycles are sampled lazily.
pub struct TreeEnv {
    k: u32,
    welded: bool,
    cycles: [LazyPerm; 2],
    kg: KnowledgeGraph,
    node_of: FxHashMap<u64, NodeId>,
    vertex: Vec<u64>,
    queries: u64,
    transcript: Vec<StepRecord>,
}

impl TreeEnv {
    pub fn new(k: u32, welded: bool, start: Start, seed: u64) -> Self {
        let leaves = 1u64 << k;
        let mut env = TreeEnv {
            k,
            welded,
            cycles: [LazyPerm::new(leaves, seed::derive(seed, "tree/cycle", 0)), LazyPerm::new(leaves, seed::derive(seed, "tree/cycle", 1))],
            kg: KnowledgeGraph::new(),
            node_of: FxHashMap::default(),
            vertex: Vec::new(),
            queries: 0,
            transcript: Vec::new(),
        };
        let v = match start {
            Start::Root => 0,
            Start::Uniform => seed::stream(seed, "tree/start", 0).random_range(0..2 * env.tree_size()),
            Start::Vertex(v) => v,
        };
        env.add(v, Provenance::Start);
        env
    }

    pub fn tree_size(&self) -> u64 {
        (1u64 << (self.k + 1)) - 1
    }

    fn add(&mut self, v: u64, provenance: Provenance) -> (NodeId, bool) {
        if let Some(&n) = self.node_of.get(&v) {
            return (n, false);
        }
        let role = if v.is_multiple_of(self.tree_size()) { VertexRole::Root } else { VertexRole::Body };
        let n = self.kg.add_node(role, provenance);
        self.node_of.insert(v, n);
        self.vertex.push(v);
        (n, true)
    }

    pub fn neighbors(&mut self, v: u64) -> Vec<u64> {
        let s = self.tree_size();
        let (t, h) = (v / s, v % s + 1);
        let id = |t: u64, h: u64| t * s + h - 1;
        let mut out = Vec::with_capacity(3);
        if h > 1 {
            out.push(id(t, h / 2));
        }
        if heap_depth(h) < self.k {
            out.push(id(t, 2 * h));
            out.push(id(t, 2 * h + 1));
            return out;
        }
        let leaves = 1u64 << self.k;
        let i = h - leaves;
        let pos = self.cycles[t as usize].forward(i);
        let (other, lo, hi) = if !self.welded {
            (t, (pos + leaves - 1) % leaves, (pos + 1) % leaves)
        } else if t == 0 {
            // a_i touches b_i and b_{i-1}
            (1, pos, (pos + leaves - 1) % leaves)
        } else {
            // b_i touches a_i and a_{i+1}
            (0, pos, (pos + 1) % leaves)
        };
        for p in [lo, hi] {
            let j = self.cycles[other as usize].inverse(p);
            out.push(id(other, leaves + j));
        }
        out
    }

    /// Which of the two roots are in the knowledge graph.
    pub fn known_roots(&self) -> [bool; 2] {
        [self.node_of.contains_key(&0), self.node_of.contains_key(&self.tree_size())]
    }

    pub fn vertex_of(&self, n: NodeId) -> u64 {
        self.vertex[n as usize]
    }
}

impl Env for TreeEnv {
    fn kg(&self) -> &KnowledgeGraph {
        &self.kg
    }

    fn query_unknown(&mut self, _role: VertexRole) -> Result<NodeId, AdvError> {
        Err(AdvError::Unsupported)
    }

    fn query_known(&mut self, n: NodeId) -> Result<(), AdvError> {
        check_known(&self.kg, n)?;
        let v = self.vertex[n as usize];
        let role = self.kg.node(n).role;
        let mut events = Events::default();
        let mut fresh = 0;
        for w in self.neighbors(v) {
            let (m, new) = self.add(w, Provenance::Via { from: role, kind: EdgeKind::Single });
            if new {
                fresh += 1;
                events.root |= self.kg.node(m).role == VertexRole::Root;
            }
            if let EdgeOutcome::Cycle { .. } = self.kg.add_edge(n, m, EdgeKind::Single) {
                events.cycle = true;
            }
        }
        self.kg.set_queried(n, false);
        self.queries += 1;
        self.transcript.push(StepRecord { case: ActionCase::Tree, node: n, fresh_body: fresh, fresh_antenna: 0, events });
        Ok(())
    }

    fn queries(&self) -> u64 {
        self.queries
    }

    fn transcript(&self) -> &[StepRecord] {
        &self.transcript
    }
}

/// Whether the knowledge so far wins the game.
pub fn is_win(game: Game, env: &TreeEnv) -> bool {
    let roots = env.known_roots();
    env.kg().has_cycle()
        || match game {
            Game::A => false,
            Game::C => roots[1],
            Game::B | Game::D => roots[0] || roots[1],
        }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GameResult {
    pub wins: u64,
    pub trials: u64,
    pub win_prob: f64,
    pub stderr: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
}

impl GameResult {
    pub fn new(wins: u64, trials: u64) -> Self {
        let (wilson_lo, wilson_hi) = stats::wilson(wins, trials, stats::Z95);
        GameResult {
            wins,
            trials,
            win_prob: if trials == 0 { 0.0 } else { wins as f64 / trials as f64 },
            stderr: stats::binomial_stderr(wins, trials),
            wilson_lo,
            wilson_hi,
        }
    }
}

/// One fresh tree per trial; trial seeds split from `seed`.
pub fn run_game(spec: GameSpec, strategy: Strategy, seed: u64) -> Result<GameResult, GameError> {
    run_game_from(spec, strategy, if spec.game.random_start() { Start::Uniform } else { Start::Root }, seed)
}

pub fn run_game_from(spec: GameSpec, strategy: Strategy, start: Start, seed: u64) -> Result<GameResult, GameError> {
    spec.validate()?;
    let mut wins = 0;
    for trial in 0..spec.trials {
        let s = seed::derive(seed, "game/trial", trial);
        let mut env = TreeEnv::new(spec.k, spec.game.welded(), start, s);
        if !is_win(spec.game, &env) {
            let mut rng = seed::stream(s, "game/strategy", 0);
            strategy.explore(&mut env, spec.t, &mut rng)?;
            debug_assert!(env.queries() <= spec.t);
        }
        wins += u64::from(is_win(spec.game, &env));
    }
    Ok(GameResult::new(wins, spec.trials))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welded_tree_is_cubic_and_symmetric() {
        for welded in [false, true] {
            let mut env = TreeEnv::new(3, welded, Start::Root, 5);
            let n = 2 * env.tree_size();
            let mut edges = 0;
            for v in 0..n {
                let nb = env.neighbors(v);
                let expect = if v % env.tree_size() == 0 { 2 } else { 3 };
                assert_eq!(nb.len(), expect);
                for w in nb {
                    assert!(env.neighbors(w).contains(&v));
                    edges += 1;
                }
            }
            assert_eq!(edges % 2, 0);
        }
    }

    #[test]
    fn degenerate_games() {
        // Game C with one query never wins
        let r = run_game(GameSpec { game: Game::C, k: 4, t: 1, trials: 200 }, Strategy::Bfs, 1).unwrap();
        assert_eq!(r.wins, 0);
        // forced root start wins Game B at once
        let r = run_game_from(GameSpec { game: Game::B, k: 4, t: 1, trials: 10 }, Strategy::RandomWalk, Start::Root, 1).unwrap();
        assert_eq!(r.wins, 10);
        assert!(run_game(GameSpec { game: Game::A, k: 4, t: 9, trials: 1 }, Strategy::Bfs, 1).is_err());
    }
}
