//! Distinguishing, fidelity and game-sweep experiments.

use std::collections::BTreeMap;

use serde::Serialize;

use super::env::{AdvError, Env};
use super::games::{run_game, Game, GameError, GameResult, GameSpec};
use super::real::RealEnv;
use super::simulator::Simulator;
use super::strategy::{guess_is_g2, Strategy};
use crate::generators::{GenError, InstanceSpec, Variant};
use crate::seed;
use crate::stats::{self, ChiSquare};

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Adversary(#[from] AdvError),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Whole-transcript reveal sequence, one trial's histogram key.
pub fn transcript_key<E: Env + ?Sized>(env: &E) -> String {
    let parts: Vec<String> = env
        .transcript()
        .iter()
        .map(|s| {
            let (case, b, a) = s.reveal_type();
            format!("{}:{b}:{a}", case.name())
        })
        .collect();
    parts.join("|")
}

struct Trial {
    key: String,
    guess_g2: bool,
    clean: bool,
}

fn real_trial(k: u32, variant: Variant, t: u64, strategy: Strategy, seed: u64, i: u64) -> Result<Trial, ExperimentError> {
    let spec = InstanceSpec::new(k, variant, seed::derive(seed, "adv/instance", i));
    let mut env = RealEnv::new(spec, seed::derive(seed, "adv/env", i))?;
    let mut rng = seed::stream(seed, "adv/strategy", i);
    strategy.explore(&mut env, t, &mut rng)?;
    Ok(Trial { key: transcript_key(&env), guess_g2: guess_is_g2(env.kg()), clean: !env.events().any() })
}

fn simulated_trial(k: u32, t: u64, strategy: Strategy, seed: u64, i: u64) -> Result<Trial, ExperimentError> {
    let layout = InstanceSpec::new(k, Variant::G1, 0).layout();
    let mut env = Simulator::new(layout, seed::derive(seed, "sim/env", i));
    let mut rng = seed::stream(seed, "sim/strategy", i);
    strategy.explore(&mut env, t, &mut rng)?;
    Ok(Trial { key: transcript_key(&env), guess_g2: guess_is_g2(env.kg()), clean: true })
}

#[derive(Debug, Clone, Serialize)]
pub struct Distinguishing {
    pub k: u32,
    pub t: u64,
    pub trials: u64,
    pub strategy: Strategy,
    /// Trials guessing G1 on G1 and on G2 instances.
    pub g1_on_g1: u64,
    pub g1_on_g2: u64,
    pub advantage: f64,
    pub stderr: f64,
    /// Largest advantage consistent with both Wilson intervals.
    pub advantage_upper: f64,
    /// Fraction of trials with any win event, per variant.
    pub event_rate_g1: f64,
    pub event_rate_g2: f64,
    /// Total variation between the transcript histograms of each real
    /// ensemble and the simulator; `None` once the simulator's label pools
    /// run out (budgets near the instance size).
    pub tv_g1_sim: Option<f64>,
    pub tv_g2_sim: Option<f64>,
}

pub fn distinguishing_experiment(k: u32, t: u64, strategy: Strategy, trials: u64, seed: u64) -> Result<Distinguishing, ExperimentError> {
    let mut hist = [BTreeMap::new(), BTreeMap::new(), BTreeMap::new()];
    let mut says_g1 = [0u64; 2];
    let mut events = [0u64; 2];
    let mut sim_ok = true;
    for i in 0..trials {
        for (slot, variant) in [Variant::G1, Variant::G2].into_iter().enumerate() {
            let tr = real_trial(k, variant, t, strategy, seed::derive(seed, "dist/variant", slot as u64), i)?;
            says_g1[slot] += u64::from(!tr.guess_g2);
            events[slot] += u64::from(!tr.clean);
            *hist[slot].entry(tr.key).or_insert(0u64) += 1;
        }
        if sim_ok {
            match simulated_trial(k, t, strategy, seed::derive(seed, "dist/sim", 0), i) {
                Ok(tr) => *hist[2].entry(tr.key).or_insert(0u64) += 1,
                Err(ExperimentError::Adversary(AdvError::ExperimentTooLong)) => sim_ok = false,
                Err(e) => return Err(e),
            }
        }
    }
    let n = trials.max(1) as f64;
    let (p1, p2) = (says_g1[0] as f64 / n, says_g1[1] as f64 / n);
    let (lo1, hi1) = stats::wilson(says_g1[0], trials, stats::Z95);
    let (lo2, hi2) = stats::wilson(says_g1[1], trials, stats::Z95);
    let se = (stats::binomial_stderr(says_g1[0], trials).powi(2) + stats::binomial_stderr(says_g1[1], trials).powi(2)).sqrt();
    Ok(Distinguishing {
        k,
        t,
        trials,
        strategy,
        g1_on_g1: says_g1[0],
        g1_on_g2: says_g1[1],
        advantage: (p1 - p2).abs(),
        stderr: se,
        advantage_upper: (hi1 - lo2).abs().max((hi2 - lo1).abs()),
        event_rate_g1: events[0] as f64 / n,
        event_rate_g2: events[1] as f64 / n,
        tv_g1_sim: sim_ok.then(|| stats::total_variation(&hist[0], &hist[2])),
        tv_g2_sim: sim_ok.then(|| stats::total_variation(&hist[1], &hist[2])),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Fidelity {
    pub k: u32,
    pub t: u64,
    pub variant: Variant,
    pub strategy: Strategy,
    pub trials: u64,
    /// Real trials without any win event; only these enter the test.
    pub clean_trials: u64,
    pub bins: usize,
    pub chi: Option<ChiSquare>,
    pub tv: f64,
}

/// Transcript histograms of clean real trials against the simulator.
/// `chi` is `None` when no real trial stayed clean.
pub fn fidelity_experiment(k: u32, t: u64, variant: Variant, strategy: Strategy, trials: u64, seed: u64) -> Result<Fidelity, ExperimentError> {
    let mut real = BTreeMap::new();
    let mut sim = BTreeMap::new();
    let mut clean = 0;
    for i in 0..trials {
        let tr = real_trial(k, variant, t, strategy, seed::derive(seed, "fid/real", 0), i)?;
        if tr.clean {
            clean += 1;
            *real.entry(tr.key).or_insert(0u64) += 1;
        }
        let tr = simulated_trial(k, t, strategy, seed::derive(seed, "fid/sim", 0), i)?;
        *sim.entry(tr.key).or_insert(0u64) += 1;
    }
    let bins = real.keys().chain(sim.keys()).collect::<std::collections::BTreeSet<_>>().len();
    let chi = (clean > 0).then(|| stats::chi_square_two_sample(&real, &sim));
    Ok(Fidelity { k, t, variant, strategy, trials, clean_trials: clean, bins, chi, tv: stats::total_variation(&real, &sim) })
}

#[derive(Debug, Clone, Serialize)]
pub struct GameCell {
    pub game: Game,
    pub strategy: Strategy,
    pub k: u32,
    pub t: u64,
    pub result: GameResult,
    /// `t^2 2^{-k/4}`.
    pub scale: f64,
}

impl GameCell {
    pub fn ratio(&self) -> f64 {
        self.result.win_prob / self.scale
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GameSweep {
    pub cells: Vec<GameCell>,
    /// Largest observed `win / (t^2 2^{-k/4})`.
    pub c_hat: f64,
    /// Smallest constant compatible with every cell's Wilson lower bound.
    pub c_lower: f64,
}

pub fn game_scale(k: u32, t: u64) -> f64 {
    (t * t) as f64 * (-(k as f64) / 4.0).exp2()
}

/// Every game, strategy and (k, t) with `t <= 2^{k-1}`. Strategies that
/// cannot play on bare trees are skipped.
pub fn game_sweep(ks: &[u32], ts: &[u64], strategies: &[Strategy], trials: u64, seed: u64) -> Result<GameSweep, ExperimentError> {
    let mut cells = Vec::new();
    for game in [Game::A, Game::B, Game::C, Game::D] {
        for &strategy in strategies.iter().filter(|s| s.plays_tree_games()) {
            for &k in ks {
                for &t in ts.iter().filter(|&&t| t <= 1 << (k - 1)) {
                    let s = seed::derive(seed::derive(seed, game.name(), k as u64), strategy.name(), t);
                    let result = run_game(GameSpec { game, k, t, trials }, strategy, s)?;
                    cells.push(GameCell { game, strategy, k, t, result, scale: game_scale(k, t) });
                }
            }
        }
    }
    let c_hat = cells.iter().map(GameCell::ratio).fold(0.0, f64::max);
    let c_lower = cells.iter().map(|c| c.result.wilson_lo / c.scale).fold(0.0, f64::max);
    Ok(GameSweep { cells, c_hat, c_lower })
}

/// Slope of `log2(win_prob)` against `k`. `None` when any point has no
/// wins or fewer than two points are given.
pub fn decay_fit(points: &[(u32, GameResult)]) -> Option<stats::LinearFit> {
    if points.len() < 2 || points.iter().any(|(_, r)| r.wins == 0) {
        return None;
    }
    let x: Vec<f64> = points.iter().map(|&(k, _)| f64::from(k)).collect();
    let y: Vec<f64> = points.iter().map(|(_, r)| r.win_prob.log2()).collect();
    stats::linear_fit(&x, &y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_guess_has_no_advantage() {
        let d = distinguishing_experiment(6, 3, Strategy::Constant, 50, 1).unwrap();
        assert_eq!(d.advantage, 0.0);
        assert_eq!((d.g1_on_g1, d.g1_on_g2), (50, 50));
        assert_eq!(d.tv_g1_sim, Some(0.0));
    }

    #[test]
    fn bfs_game_a_has_no_decay_fit() {
        // BFS from the root never reaches the weld within 2^{k/4} queries
        let pts: Vec<_> = [12u32, 16]
            .iter()
            .map(|&k| {
                let t = (f64::from(k) / 4.0).exp2() as u64;
                (k, run_game(GameSpec { game: Game::A, k, t, trials: 50 }, Strategy::Bfs, 1).unwrap())
            })
            .collect();
        assert!(pts.iter().all(|(_, r)| r.wins == 0));
        assert!(decay_fit(&pts).is_none());
        let fake = |k, wins| (k, GameResult::new(wins, 1000));
        let f = decay_fit(&[fake(8, 500), fake(12, 250), fake(16, 125)]).unwrap();
        assert!((f.slope + 0.25).abs() < 1e-9);
    }

    #[test]
    fn exhaustive_exploration_separates_at_k3() {
        // a whole k=3 instance explored by BFS: G2 shows odd cycles, G1 never
        let n = InstanceSpec::new(3, Variant::G1, 0).layout().vertex_count();
        let d = distinguishing_experiment(3, n, Strategy::Bfs, 10, 2).unwrap();
        assert_eq!(d.g1_on_g1, 10);
        assert!(d.advantage >= 0.9, "{d:?}");
        assert_eq!(d.tv_g1_sim, None);
    }
}
