//! The knowledge-graph adversary: action environments, the simulator,
//! reference strategies and the tree games.

pub mod env;
pub mod experiment;
pub mod games;
pub mod knowledge;
pub mod real;
pub mod simulator;
pub mod strategy;

pub use env::{ActionCase, AdvError, Env, Events, StepRecord};
pub use experiment::{decay_fit, distinguishing_experiment, fidelity_experiment, game_sweep, Distinguishing, ExperimentError, Fidelity, GameSweep};
pub use games::{run_game, run_game_from, Game, GameError, GameResult, GameSpec, Start, TreeEnv};
pub use knowledge::{KnowledgeGraph, NodeId, Provenance};
pub use real::RealEnv;
pub use simulator::Simulator;
pub use strategy::{guess_is_g2, Strategy};
