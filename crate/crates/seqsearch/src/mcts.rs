//! Network-guided Monte-Carlo tree search over the symbol-filling game.
//!
//! Each search owns a fresh visited tree rooted at the current state and runs
//! `q` look-ahead simulations: walk the tree by maximum upper confidence
//! bound, expand the first unseen vertex (network evaluation for intermediate
//! states, the true reward for terminal ones), then back the value up the
//! trajectory as a running mean. The move policy is derived from the root's
//! visit counts under the step's temperature.

use crate::game::{
    apply_move, canonical_key, to_sequence_set, GameConfig, GameError, GameState, Move, SequenceSet,
};
use rand::distributions::Distribution;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Gamma;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MctsError {
    #[error("search rooted at a terminal state")]
    TerminalRoot,
    #[error("evaluator returned {got} priors, game has {want} moves")]
    PriorWidth { got: usize, want: usize },
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Anything that can score a non-terminal state: move priors plus a reward
/// estimate in [-1, 1].
pub trait Evaluate {
    fn evaluate(&self, state: &GameState) -> (Vec<f64>, f64);
}

/// Flat evaluator: uniform priors, zero value. Used for calibration games,
/// hand traces, and as the cold-start reference.
pub struct UniformEvaluator {
    pub actions: usize,
}

impl Evaluate for UniformEvaluator {
    fn evaluate(&self, _state: &GameState) -> (Vec<f64>, f64) {
        (vec![1.0 / self.actions as f64; self.actions], 0.0)
    }
}

/// Network-backed evaluator over encoded board images.
pub struct NetEvaluator<'a> {
    pub snapshot: &'a crate::net::NetworkSnapshot,
    pub game: GameConfig,
    pub features: crate::game::FeatureSpec,
}

impl Evaluate for NetEvaluator<'_> {
    fn evaluate(&self, state: &GameState) -> (Vec<f64>, f64) {
        let image = crate::game::encode_features(&self.game, state, &self.features)
            .expect("feature spec covers the board");
        let pred = self
            .snapshot
            .predict(&image.planes)
            .expect("input length fixed by the spec");
        (pred.policy, pred.value)
    }
}

/// Terminal reward callback: the metric backend's reward of a finished set.
pub type TerminalReward<'a> = &'a (dyn Fn(&SequenceSet) -> f64 + Sync);

/// Temperature schedule: exploratory tau for the opening third of an
/// episode, then effectively greedy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauSchedule {
    pub explore_steps: usize,
    pub tau_explore: f64,
    pub tau_exploit: f64,
}

impl TauSchedule {
    pub fn standard(total_steps: usize) -> Self {
        Self {
            explore_steps: total_steps.div_ceil(3),
            tau_explore: 1.0,
            tau_exploit: 1e-4,
        }
    }

    pub fn tau_at(&self, step: usize) -> f64 {
        if step < self.explore_steps {
            self.tau_explore
        } else {
            self.tau_exploit
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Look-ahead simulations per search.
    pub simulations: usize,
    /// Exploration constant in the upper confidence bound.
    pub cp: f64,
    /// Symmetric Dirichlet concentration for root noise.
    pub alpha: f64,
    /// Mixing fraction of the noise into the root priors.
    pub noise_mix: f64,
    /// Whether root noise is applied (noisy vs noiseless games).
    pub noise: bool,
    pub tau: TauSchedule,
    /// Collect one trace line per simulation.
    pub trace: bool,
}

impl SearchConfig {
    pub fn new(simulations: usize, cp: f64, alpha: f64, total_steps: usize) -> Self {
        Self {
            simulations,
            cp,
            alpha,
            noise_mix: 0.25,
            noise: true,
            tau: TauSchedule::standard(total_steps),
            trace: false,
        }
    }

    pub fn noiseless(mut self) -> Self {
        self.noise = false;
        self
    }
}

/// Edge statistics of one vertex.
#[derive(Debug, Clone)]
pub struct EdgeStats {
    pub visits: Vec<u32>,
    pub mean_reward: Vec<f64>,
    pub prior: Vec<f64>,
}

#[derive(Debug, Clone)]
enum Vertex {
    Internal(EdgeStats),
    /// Terminal states cache their true reward and are never re-evaluated.
    Terminal(f64),
}

/// The visited tree of one search, keyed by canonical state keys.
#[derive(Debug, Default)]
pub struct SearchTree {
    vertices: FxHashMap<u64, Vertex>,
}

impl SearchTree {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self, key: u64) -> Option<&EdgeStats> {
        match self.vertices.get(&key) {
            Some(Vertex::Internal(e)) => Some(e),
            _ => None,
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = u64> + '_ {
        self.vertices.keys().copied()
    }
}

/// Result of one completed search.
#[derive(Debug)]
pub struct SearchOutcome {
    /// Move distribution from the root visit counts under the step's tau.
    pub policy: Vec<f64>,
    /// Raw root visit counts.
    pub root_visits: Vec<u32>,
    /// The visited tree (root included), for diagnostics and state counting.
    pub tree: SearchTree,
    /// One line per simulation when tracing was requested.
    pub trace: Option<Vec<String>>,
}

impl SearchOutcome {
    /// Canonical keys of every state touched by the search.
    pub fn visited_keys(&self) -> impl Iterator<Item = u64> + '_ {
        self.tree.keys()
    }
}

/// Pick the edge maximizing Q + cp * P * sqrt(sum N) / (1 + N); ties go to
/// the lowest index.
pub fn select_edge(edges: &EdgeStats, cp: f64) -> usize {
    let total: u32 = edges.visits.iter().sum();
    let sqrt_total = (total as f64).sqrt();
    let mut best = 0usize;
    let mut best_score = f64::NEG_INFINITY;
    for j in 0..edges.visits.len() {
        let bonus = cp * edges.prior[j] * sqrt_total / (1.0 + edges.visits[j] as f64);
        let score = edges.mean_reward[j] + bonus;
        if score > best_score {
            best_score = score;
            best = j;
        }
    }
    best
}

/// Running-mean backup along a root-to-leaf trajectory.
fn backup(tree: &mut SearchTree, path: &[(u64, usize)], value: f64) {
    for &(key, edge) in path {
        if let Some(Vertex::Internal(stats)) = tree.vertices.get_mut(&key) {
            stats.visits[edge] += 1;
            let n = stats.visits[edge] as f64;
            stats.mean_reward[edge] += (value - stats.mean_reward[edge]) / n;
        }
    }
}

/// Mix a symmetric Dirichlet sample into the priors:
/// (1 - mix) * priors + mix * Dir(alpha).
pub fn apply_root_noise(priors: &[f64], alpha: f64, mix: f64, rng: &mut impl Rng) -> Vec<f64> {
    let gamma = Gamma::new(alpha, 1.0).expect("alpha > 0");
    let mut noise: Vec<f64> = (0..priors.len()).map(|_| gamma.sample(rng)).collect();
    let sum: f64 = noise.iter().sum();
    if sum > 0.0 && sum.is_finite() {
        for v in &mut noise {
            *v /= sum;
        }
    } else {
        // Degenerate gamma draw; fall back to uniform noise.
        noise.fill(1.0 / priors.len() as f64);
    }
    priors
        .iter()
        .zip(&noise)
        .map(|(p, n)| (1.0 - mix) * p + mix * n)
        .collect()
}

/// Visit counts to a move distribution: proportional to N^(1/tau), with
/// unvisited edges at probability zero; a vanishing tau degenerates to the
/// argmax (lowest index on ties).
pub fn policy_from_visits(visits: &[u32], tau: f64) -> Vec<f64> {
    let mut policy = vec![0.0f64; visits.len()];
    if tau < 1e-2 {
        let mut best = 0usize;
        for (j, &n) in visits.iter().enumerate() {
            if n > visits[best] {
                best = j;
            }
        }
        policy[best] = 1.0;
        return policy;
    }
    let max_log = visits
        .iter()
        .filter(|&&n| n > 0)
        .map(|&n| (n as f64).ln())
        .fold(f64::NEG_INFINITY, f64::max);
    if max_log == f64::NEG_INFINITY {
        return policy; // no visits at all; caller guards against this
    }
    let mut sum = 0.0;
    for (j, &n) in visits.iter().enumerate() {
        if n > 0 {
            let w = (((n as f64).ln() - max_log) / tau).exp();
            policy[j] = w;
            sum += w;
        }
    }
    for p in &mut policy {
        *p /= sum;
    }
    policy
}

/// How a move is drawn from the policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveSelection {
    /// Sample proportionally (exploratory tau regime).
    Proportional,
    /// Argmax with lowest-index ties (greedy tau regime).
    Greedy,
}

pub fn sample_move(policy: &[f64], selection: MoveSelection, rng: &mut impl Rng) -> Move {
    let code = match selection {
        MoveSelection::Greedy => {
            let mut best = 0usize;
            for (j, &p) in policy.iter().enumerate() {
                if p > policy[best] {
                    best = j;
                }
            }
            best
        }
        MoveSelection::Proportional => {
            let draw: f64 = rng.gen::<f64>();
            let mut acc = 0.0;
            let mut chosen = policy.len() - 1;
            for (j, &p) in policy.iter().enumerate() {
                acc += p;
                if draw < acc {
                    chosen = j;
                    break;
                }
            }
            chosen
        }
    };
    Move { code: code as u32 }
}

/// Run a full search from `root` and return the move policy.
pub fn search(
    game: &GameConfig,
    root: &GameState,
    evaluator: &dyn Evaluate,
    terminal_reward: TerminalReward<'_>,
    cfg: &SearchConfig,
    seed: u64,
) -> Result<SearchOutcome, MctsError> {
    if root.is_terminal(game) {
        return Err(MctsError::TerminalRoot);
    }
    let actions = game.moves();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tree = SearchTree::default();
    let root_key = canonical_key(root);
    let mut trace = cfg.trace.then(Vec::new);

    for sim in 0..cfg.simulations {
        let mut state = root.clone();
        let mut key = root_key;
        let mut path: Vec<(u64, usize)> = Vec::new();
        let (leaf_kind, value) = loop {
            match tree.vertices.get(&key) {
                None => {
                    // Expand and evaluate the unseen vertex.
                    if state.is_terminal(game) {
                        let set = to_sequence_set(game, &state)?;
                        let reward = terminal_reward(&set);
                        tree.vertices.insert(key, Vertex::Terminal(reward));
                        break ("terminal", reward);
                    }
                    let (mut priors, value) = evaluator.evaluate(&state);
                    if priors.len() != actions {
                        return Err(MctsError::PriorWidth {
                            got: priors.len(),
                            want: actions,
                        });
                    }
                    if cfg.noise && key == root_key {
                        priors = apply_root_noise(&priors, cfg.alpha, cfg.noise_mix, &mut rng);
                    }
                    tree.vertices.insert(
                        key,
                        Vertex::Internal(EdgeStats {
                            visits: vec![0; actions],
                            mean_reward: vec![0.0; actions],
                            prior: priors,
                        }),
                    );
                    break ("expand", value);
                }
                Some(Vertex::Terminal(reward)) => break ("revisit", *reward),
                Some(Vertex::Internal(stats)) => {
                    let edge = select_edge(stats, cfg.cp);
                    path.push((key, edge));
                    state = apply_move(game, &state, Move { code: edge as u32 })?;
                    key = canonical_key(&state);
                }
            }
        };
        backup(&mut tree, &path, value);
        if let Some(lines) = trace.as_mut() {
            let edges: Vec<String> = path.iter().map(|(_, e)| e.to_string()).collect();
            lines.push(format!(
                "sim={sim} path=[{}] leaf={leaf_kind} value={value:.6}",
                edges.join(",")
            ));
        }
    }

    let root_visits = match tree.vertices.get(&root_key) {
        Some(Vertex::Internal(stats)) => stats.visits.clone(),
        _ => vec![0; actions],
    };
    let tau = cfg.tau.tau_at(root.step());
    let mut policy = policy_from_visits(&root_visits, tau);
    if policy.iter().sum::<f64>() == 0.0 {
        // A one-simulation search never visits a child; play uniformly.
        policy.fill(1.0 / actions as f64);
    }
    Ok(SearchOutcome {
        policy,
        root_visits,
        tree,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::initial_state;
    use std::cell::Cell;

    fn game(k: usize, n: usize, ell: u32) -> GameConfig {
        GameConfig::new(k, n, ell).unwrap()
    }

    fn zero_reward() -> impl Fn(&SequenceSet) -> f64 + Sync {
        |_: &SequenceSet| 0.0
    }

    fn plain(q: usize, cp: f64, steps: usize) -> SearchConfig {
        SearchConfig::new(q, cp, 0.05, steps).noiseless()
    }

    struct CountingEvaluator {
        inner: UniformEvaluator,
        calls: Cell<usize>,
    }

    impl Evaluate for CountingEvaluator {
        fn evaluate(&self, state: &GameState) -> (Vec<f64>, f64) {
            self.calls.set(self.calls.get() + 1);
            self.inner.evaluate(state)
        }
    }

    #[test]
    fn hand_trace_five_simulations() {
        // Uniform stub, ell=1, q=5, cp=1, noise off: the first simulation
        // expands the root, the remaining four split evenly, so the visit
        // counts are [2, 2] and the tau=1 policy is (1/2, 1/2).
        let g = game(1, 6, 1);
        let reward = zero_reward();
        let out = search(
            &g,
            &initial_state(&g),
            &UniformEvaluator { actions: 2 },
            &reward,
            &plain(5, 1.0, g.steps()),
            0,
        )
        .unwrap();
        assert_eq!(out.root_visits, vec![2, 2]);
        assert_eq!(out.policy, vec![0.5, 0.5]);
    }

    #[test]
    fn root_visits_sum_to_q_minus_one() {
        let g = game(2, 3, 2);
        let reward = zero_reward();
        for q in [1usize, 2, 7, 50, 400] {
            let out = search(
                &g,
                &initial_state(&g),
                &UniformEvaluator { actions: 4 },
                &reward,
                &plain(q, 5.0, g.steps()),
                1,
            )
            .unwrap();
            let total: u32 = out.root_visits.iter().sum();
            assert_eq!(total as usize, q - 1, "q={q}");
        }
    }

    #[test]
    fn internal_visit_conservation() {
        // For every expanded non-root vertex: incoming visits equal one
        // (its expansion) plus the visits of its outgoing edges.
        let g = game(2, 3, 2);
        let reward = zero_reward();
        let out = search(
            &g,
            &initial_state(&g),
            &UniformEvaluator { actions: 4 },
            &reward,
            &plain(300, 3.0, g.steps()),
            3,
        )
        .unwrap();
        fn walk(g: &GameConfig, tree: &SearchTree, state: &GameState) {
            let key = canonical_key(state);
            let Some(edges) = tree.edges(key) else { return };
            for (j, &n) in edges.visits.iter().enumerate() {
                if n == 0 {
                    continue;
                }
                let child = apply_move(g, state, Move { code: j as u32 }).unwrap();
                let child_key = canonical_key(&child);
                if let Some(child_edges) = tree.edges(child_key) {
                    let down: u32 = child_edges.visits.iter().sum();
                    assert_eq!(n, 1 + down, "edge {j}");
                    walk(g, tree, &child);
                }
            }
        }
        walk(&g, &out.tree, &initial_state(&g));
    }

    #[test]
    fn q_values_stay_in_reward_hull() {
        // Rewards live in [-1, 1]; running means must as well.
        let g = game(1, 4, 1);
        let reward = |set: &SequenceSet| {
            if set.entries()[0] == 1 {
                1.0
            } else {
                -1.0
            }
        };
        let out = search(
            &g,
            &initial_state(&g),
            &UniformEvaluator { actions: 2 },
            &reward,
            &plain(200, 2.0, g.steps()),
            5,
        )
        .unwrap();
        for key in out.tree.keys().collect::<Vec<_>>() {
            if let Some(edges) = out.tree.edges(key) {
                for &q in &edges.mean_reward {
                    assert!((-1.0..=1.0).contains(&q));
                }
            }
        }
    }

    #[test]
    fn finds_rewarded_region_on_small_game() {
        // One terminal state pays +1, everything else -1; enough
        // simulations steer the root policy onto the winning first move.
        for target_bits in [0b101001u32, 0b010110, 0b111111, 0b000000] {
            let g = game(1, 6, 1);
            let target: Vec<i8> = (0..6)
                .map(|i| {
                    if (target_bits >> (5 - i)) & 1 == 1 {
                        1
                    } else {
                        -1
                    }
                })
                .collect();
            let reward = move |set: &SequenceSet| {
                if set.row(0) == target.as_slice() {
                    1.0
                } else {
                    -1.0
                }
            };
            let out = search(
                &g,
                &initial_state(&g),
                &UniformEvaluator { actions: 2 },
                &reward,
                &plain(2000, 2.0, g.steps()),
                7,
            )
            .unwrap();
            let best = if out.root_visits[1] > out.root_visits[0] {
                1
            } else {
                0
            };
            let want = ((target_bits >> 5) & 1) as usize;
            assert_eq!(best, want, "target {target_bits:b}");
        }
    }

    #[test]
    fn search_rejects_terminal_root() {
        let g = game(1, 2, 2);
        let s = apply_move(&g, &initial_state(&g), Move { code: 3 }).unwrap();
        let reward = zero_reward();
        assert!(matches!(
            search(
                &g,
                &s,
                &UniformEvaluator { actions: 4 },
                &reward,
                &plain(5, 1.0, g.steps()),
                0
            ),
            Err(MctsError::TerminalRoot)
        ));
    }

    #[test]
    fn network_called_once_per_distinct_leaf() {
        let g = game(2, 3, 2);
        let eval = CountingEvaluator {
            inner: UniformEvaluator { actions: 4 },
            calls: Cell::new(0),
        };
        let reward = zero_reward();
        let out = search(
            &g,
            &initial_state(&g),
            &eval,
            &reward,
            &plain(100, 3.0, g.steps()),
            2,
        )
        .unwrap();
        let internal = out
            .tree
            .keys()
            .filter(|&k| out.tree.edges(k).is_some())
            .count();
        assert_eq!(eval.calls.get(), internal);
    }

    #[test]
    fn select_edge_cases() {
        // Cold start: zero bonus everywhere, ties -> edge 0.
        let cold = EdgeStats {
            visits: vec![0, 0, 0],
            mean_reward: vec![0.0, 0.0, 0.0],
            prior: vec![0.2, 0.3, 0.5],
        };
        assert_eq!(select_edge(&cold, 5.0), 0);

        // Exploitation limit: high-Q edge wins despite heavy visits.
        let exploit = EdgeStats {
            visits: vec![1000, 1000],
            mean_reward: vec![1.0, 0.0],
            prior: vec![0.5, 0.5],
        };
        assert_eq!(select_edge(&exploit, 1.0), 0);

        // Formula check: priors (0.7, 0.3), N = (1, 0), equal Q.
        // Bonus 0: 0.7 * 1 / 2 = 0.35; bonus 1: 0.3 * 1 / 1 = 0.30.
        let formula = EdgeStats {
            visits: vec![1, 0],
            mean_reward: vec![0.0, 0.0],
            prior: vec![0.7, 0.3],
        };
        assert_eq!(select_edge(&formula, 1.0), 0);
    }

    #[test]
    fn backup_running_mean() {
        let mut tree = SearchTree::default();
        tree.vertices.insert(
            9,
            Vertex::Internal(EdgeStats {
                visits: vec![0, 0],
                mean_reward: vec![0.0, 0.0],
                prior: vec![0.5, 0.5],
            }),
        );
        backup(&mut tree, &[(9, 0)], 0.6);
        let e = tree.edges(9).unwrap();
        assert_eq!(e.visits[0], 1);
        assert!((e.mean_reward[0] - 0.6).abs() < 1e-15);
        backup(&mut tree, &[(9, 0)], 0.2);
        let e = tree.edges(9).unwrap();
        assert_eq!(e.visits[0], 2);
        assert!((e.mean_reward[0] - 0.4).abs() < 1e-15);
        for _ in 0..5 {
            backup(&mut tree, &[(9, 1)], 0.25);
        }
        let e = tree.edges(9).unwrap();
        assert!((e.mean_reward[1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn root_noise_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let priors = vec![0.1, 0.2, 0.3, 0.4];
        let noisy = apply_root_noise(&priors, 0.05, 0.25, &mut rng);
        let sum: f64 = noisy.iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
        assert!(noisy.iter().all(|&p| p >= 0.0));
        // Same seed, same mix.
        let mut rng2 = ChaCha8Rng::seed_from_u64(17);
        assert_eq!(noisy, apply_root_noise(&priors, 0.05, 0.25, &mut rng2));
    }

    #[test]
    fn policy_temperature_regimes() {
        let visits = vec![3u32, 0, 5];
        let warm = policy_from_visits(&visits, 1.0);
        assert!((warm[0] - 3.0 / 8.0).abs() < 1e-12);
        assert_eq!(warm[1], 0.0);
        assert!((warm[2] - 5.0 / 8.0).abs() < 1e-12);
        let cold = policy_from_visits(&visits, 1e-4);
        assert_eq!(cold, vec![0.0, 0.0, 1.0]);
        // Argmax ties resolve to the lowest index.
        assert_eq!(policy_from_visits(&[4, 4, 1], 1e-4), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn sample_move_regimes() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let one_hot = vec![0.0, 1.0, 0.0];
        assert_eq!(
            sample_move(&one_hot, MoveSelection::Greedy, &mut rng).code,
            1
        );
        assert_eq!(
            sample_move(&one_hot, MoveSelection::Proportional, &mut rng).code,
            1
        );
        assert_eq!(
            sample_move(&[0.3, 0.3, 0.4], MoveSelection::Greedy, &mut rng).code,
            2
        );
        // Proportional sampler is sound: empirical split ~ policy.
        let mut counts = [0usize; 2];
        for _ in 0..10_000 {
            let m = sample_move(&[0.5, 0.5], MoveSelection::Proportional, &mut rng);
            counts[m.code as usize] += 1;
        }
        let frac = counts[0] as f64 / 10_000.0;
        assert!((frac - 0.5).abs() < 0.02, "frac {frac}");
    }

    #[test]
    fn search_is_deterministic_given_seed() {
        let g = game(2, 3, 2);
        let reward = zero_reward();
        let cfg = SearchConfig::new(60, 4.0, 0.05, g.steps());
        let run = |seed| {
            search(
                &g,
                &initial_state(&g),
                &UniformEvaluator { actions: 4 },
                &reward,
                &cfg,
                seed,
            )
            .unwrap()
        };
        let a = run(9);
        let b = run(9);
        assert_eq!(a.policy, b.policy);
        assert_eq!(a.root_visits, b.root_visits);
        let c = run(10);
        // Different noise stream; almost surely different counts.
        assert_ne!(a.root_visits, c.root_visits);
    }

    #[test]
    fn trace_has_one_line_per_simulation() {
        let g = game(1, 4, 1);
        let reward = zero_reward();
        let mut cfg = plain(25, 1.5, g.steps());
        cfg.trace = true;
        let out = search(
            &g,
            &initial_state(&g),
            &UniformEvaluator { actions: 2 },
            &reward,
            &cfg,
            4,
        )
        .unwrap();
        let lines = out.trace.unwrap();
        assert_eq!(lines.len(), 25);
        assert!(lines[0].starts_with("sim=0 path=[] leaf=expand"));
    }
}
