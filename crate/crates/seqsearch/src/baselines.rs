//! Comparison searchers: budgeted random search with mean-max curves, an
//! exhaustive-search oracle with symmetry pruning, and an epsilon-greedy
//! deep-Q agent that regresses action values onto the terminal reward.

use crate::game::{
    apply_move, canonical_key, encode_features, initial_state, to_sequence_set, FeatureSpec,
    GameConfig, Move, SequenceSet,
};
use crate::net::{self, NetworkConfig, NetworkSnapshot, QBatch};
use crate::radar::{metric_mmf, PhaseCode};
use crate::trainer::{derive_seed, Direction, Objective, VisitedTracker};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("exhaustive search over {bits} bits exceeds the limit of {limit} (needs {count} evaluations)")]
    LimitExceeded { bits: u32, limit: u32, count: u128 },
    #[error(transparent)]
    Net(#[from] net::NetError),
}

fn better(direction: Direction, candidate: f64, incumbent: f64) -> bool {
    match direction {
        Direction::Minimize => candidate < incumbent,
        Direction::Maximize => candidate > incumbent,
    }
}

fn worst(direction: Direction) -> f64 {
    match direction {
        Direction::Minimize => f64::INFINITY,
        Direction::Maximize => f64::NEG_INFINITY,
    }
}

/// Log-spaced trial counts 1, 2, 5, 10, ... up to and including `budget`.
pub fn log_checkpoints(budget: u64) -> Vec<u64> {
    let mut points = Vec::new();
    let mut decade = 1u64;
    'outer: loop {
        for mult in [1u64, 2, 5] {
            let p = decade.saturating_mul(mult);
            if p >= budget {
                break 'outer;
            }
            points.push(p);
        }
        decade = decade.saturating_mul(10);
    }
    points.push(budget);
    points
}

/// Best-so-far samples of one random-search run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunCurve {
    /// (trials, best metric after that many trials), at the checkpoints.
    pub points: Vec<(u64, f64)>,
    pub best_metric: f64,
}

/// Budgeted random search, repeated over independent runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BudgetedSearchResult {
    pub runs: Vec<RunCurve>,
    /// Across-run mean of per-run best-so-far at each checkpoint.
    pub mean_max: Vec<(u64, f64)>,
    pub best_metric: f64,
}

/// Draw `budget` uniform samples per run, track the running best, and report
/// the across-run mean of bests at logarithmic checkpoints.
pub fn random_search<T, S, M>(
    sample: S,
    metric: M,
    direction: Direction,
    budget: u64,
    runs: usize,
    seed: u64,
) -> BudgetedSearchResult
where
    T: Send,
    S: Fn(&mut ChaCha8Rng) -> T + Sync,
    M: Fn(&T) -> f64 + Sync,
{
    assert!(budget >= 1 && runs >= 1);
    let checkpoints = log_checkpoints(budget);
    let curves: Vec<RunCurve> = (0..runs)
        .into_par_iter()
        .map(|run| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "random-search", run as u64));
            let mut best = worst(direction);
            let mut points = Vec::with_capacity(checkpoints.len());
            let mut next_cp = 0usize;
            for trial in 1..=budget {
                let item = sample(&mut rng);
                let m = metric(&item);
                if better(direction, m, best) {
                    best = m;
                }
                while next_cp < checkpoints.len() && checkpoints[next_cp] == trial {
                    points.push((trial, best));
                    next_cp += 1;
                }
            }
            RunCurve {
                points,
                best_metric: best,
            }
        })
        .collect();
    let mean_max = checkpoints
        .iter()
        .enumerate()
        .map(|(i, &cp)| {
            let mean = curves.iter().map(|c| c.points[i].1).sum::<f64>() / runs as f64;
            (cp, mean)
        })
        .collect();
    let best_metric = curves
        .iter()
        .map(|c| c.best_metric)
        .fold(worst(direction), |acc, m| {
            if better(direction, m, acc) {
                m
            } else {
                acc
            }
        });
    BudgetedSearchResult {
        runs: curves,
        mean_max,
        best_metric,
    }
}

/// Uniform random phase code of length `n`.
pub fn sample_phase_code(n: usize, rng: &mut ChaCha8Rng) -> PhaseCode {
    PhaseCode::new(
        (0..n)
            .map(|_| if rng.gen::<bool>() { 1i8 } else { -1 })
            .collect(),
    )
    .expect("n >= 2")
}

/// Uniform random k x n sequence set.
pub fn sample_sequence_set(k: usize, n: usize, rng: &mut ChaCha8Rng) -> SequenceSet {
    SequenceSet::from_flat(
        k,
        n,
        (0..k * n)
            .map(|_| if rng.gen::<bool>() { 1i8 } else { -1 })
            .collect(),
    )
}

/// CSV of a mean-max curve: one row per checkpoint.
pub fn mean_max_csv(result: &BudgetedSearchResult) -> String {
    let mut out = String::from("# mean-max v1\ntrials,mean_best_metric\n");
    for (trials, mean) in &result.mean_max {
        out.push_str(&format!("{trials},{mean}\n"));
    }
    out
}

/// Exhaustive-search outcome over all 2^bits words.
#[derive(Debug, Clone)]
pub struct ExhaustiveResult<T> {
    pub best: T,
    pub best_metric: f64,
    /// Number of optima when a census was requested.
    pub census: Option<u64>,
    pub evaluations: u64,
}

fn reverse_bits(word: u64, n: usize) -> u64 {
    word.reverse_bits() >> (64 - n)
}

/// True when `word` is the smallest member of its negation/reversal orbit.
fn is_orbit_representative(word: u64, n: usize) -> bool {
    let mask = (1u64 << n) - 1;
    let neg = !word & mask;
    let rev = reverse_bits(word, n);
    let neg_rev = !rev & mask;
    word <= neg && word <= rev && word <= neg_rev
}

/// Exact optimum of the radar metric over all codes of length `n`, streaming
/// with negation/reversal pruning. `census` additionally counts all optima
/// (full enumeration, tighter length limit).
pub fn exhaustive_search_radar(
    n: usize,
    direction: Direction,
    census: bool,
    limit_bits: u32,
) -> Result<ExhaustiveResult<PhaseCode>, BaselineError> {
    let bits = n as u32;
    let cap = if census {
        limit_bits.min(20)
    } else {
        limit_bits
    };
    if bits > cap {
        return Err(BaselineError::LimitExceeded {
            bits,
            limit: cap,
            count: 1u128 << bits,
        });
    }
    let total = 1u64 << bits;
    let chunk = 1u64 << bits.min(16);
    let ranges: Vec<(u64, u64)> = (0..total.div_ceil(chunk))
        .map(|i| (i * chunk, ((i + 1) * chunk).min(total)))
        .collect();
    let (best_word, best_metric, evaluations) = ranges
        .par_iter()
        .map(|&(lo, hi)| {
            let mut best_word = 0u64;
            let mut best = worst(direction);
            let mut evals = 0u64;
            for word in lo..hi {
                if !census && !is_orbit_representative(word, n) {
                    continue;
                }
                let code = PhaseCode::from_bits(word, n);
                let m = metric_mmf(&code).expect("R is positive definite");
                evals += 1;
                if better(direction, m, best) {
                    best = m;
                    best_word = word;
                }
            }
            (best_word, best, evals)
        })
        .reduce(
            || (0u64, worst(direction), 0u64),
            |a, b| {
                let mut out = if better(direction, b.1, a.1) { b } else { a };
                out.2 = a.2 + b.2;
                out
            },
        );
    let census_count = census.then(|| {
        let tol = 1e-9 * best_metric.abs().max(1.0);
        (0..total)
            .into_par_iter()
            .filter(|&word| {
                let m = metric_mmf(&PhaseCode::from_bits(word, n)).expect("positive definite");
                (m - best_metric).abs() <= tol
            })
            .count() as u64
    });
    Ok(ExhaustiveResult {
        best: PhaseCode::from_bits(best_word, n),
        best_metric,
        census: census_count,
        evaluations,
    })
}

/// Exact optimum of a sequence-set metric over all 2^(K*N) sets.
pub fn exhaustive_search_sets<M>(
    k: usize,
    n: usize,
    metric: M,
    direction: Direction,
    census: bool,
    limit_bits: u32,
) -> Result<ExhaustiveResult<SequenceSet>, BaselineError>
where
    M: Fn(&SequenceSet) -> f64 + Sync,
{
    let bits = (k * n) as u32;
    let cap = if census {
        limit_bits.min(20)
    } else {
        limit_bits
    };
    if bits > cap {
        return Err(BaselineError::LimitExceeded {
            bits,
            limit: cap,
            count: 1u128 << bits,
        });
    }
    let total = 1u64 << bits;
    let build = |word: u64| {
        SequenceSet::from_flat(
            k,
            n,
            (0..k * n)
                .map(|i| if (word >> i) & 1 == 1 { 1i8 } else { -1 })
                .collect(),
        )
    };
    let chunk = 1u64 << bits.min(16);
    let ranges: Vec<(u64, u64)> = (0..total.div_ceil(chunk))
        .map(|i| (i * chunk, ((i + 1) * chunk).min(total)))
        .collect();
    let (best_word, best_metric) = ranges
        .par_iter()
        .map(|&(lo, hi)| {
            let mut best_word = 0u64;
            let mut best = worst(direction);
            for word in lo..hi {
                let m = metric(&build(word));
                if better(direction, m, best) {
                    best = m;
                    best_word = word;
                }
            }
            (best_word, best)
        })
        .reduce(
            || (0u64, worst(direction)),
            |a, b| if better(direction, b.1, a.1) { b } else { a },
        );
    let census_count = census.then(|| {
        let tol = 1e-9 * best_metric.abs().max(1.0);
        (0..total)
            .into_par_iter()
            .filter(|&word| (metric(&build(word)) - best_metric).abs() <= tol)
            .count() as u64
    });
    Ok(ExhaustiveResult {
        best: build(best_word),
        best_metric,
        census: census_count,
        evaluations: total,
    })
}

/// Settings of the deep-Q baseline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DqnConfig {
    /// Replay FIFO capacity in experiences; training starts once the FIFO
    /// is half full.
    pub fifo_capacity: usize,
    /// Exploration probability.
    pub epsilon: f64,
    /// Optional linear decay: (final epsilon, reached after this many
    /// episodes).
    pub epsilon_decay: Option<(f64, usize)>,
    pub batch_size: usize,
    /// Evaluation cycle B: one greedy probe episode every B episodes.
    pub eval_cycle: usize,
    pub episodes: usize,
    pub tracker_cap: usize,
}

impl DqnConfig {
    fn epsilon_at(&self, episode: usize) -> f64 {
        match self.epsilon_decay {
            None => self.epsilon,
            Some((end, over)) => {
                if over == 0 || episode >= over {
                    end
                } else {
                    let frac = episode as f64 / over as f64;
                    self.epsilon + (end - self.epsilon) * frac
                }
            }
        }
    }
}

/// One probe record of the Q-learning run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DqnRunPoint {
    pub episode: usize,
    pub visited_states: u64,
    pub metric: f64,
}

#[derive(Debug)]
pub struct DqnOutcome {
    pub net: NetworkSnapshot,
    pub log: Vec<DqnRunPoint>,
    pub best_metric: f64,
    pub best_set: SequenceSet,
    pub visited_states: u64,
}

fn greedy_action(q: &[f64]) -> usize {
    let mut best = 0usize;
    for (j, &v) in q.iter().enumerate() {
        if v > q[best] {
            best = j;
        }
    }
    best
}

/// Play one episode with epsilon-greedy action selection; returns the
/// terminal set and the per-step (input, action) pairs.
fn dqn_episode(
    game: &GameConfig,
    features: &FeatureSpec,
    snap: &NetworkSnapshot,
    epsilon: f64,
    rng: &mut ChaCha8Rng,
    tracker: &mut VisitedTracker,
) -> (SequenceSet, Vec<(Vec<f64>, usize)>) {
    let mut state = initial_state(game);
    tracker.insert(canonical_key(&state));
    let mut steps = Vec::with_capacity(game.steps());
    while !state.is_terminal(game) {
        let image = encode_features(game, &state, features).expect("feature spec fits");
        let action = if rng.gen::<f64>() < epsilon {
            rng.gen_range(0..game.moves())
        } else {
            let q = snap.q_values(&image.planes).expect("input shape fixed");
            greedy_action(&q)
        };
        steps.push((image.planes, action));
        state = apply_move(
            game,
            &state,
            Move {
                code: action as u32,
            },
        )
        .expect("non-terminal");
        tracker.insert(canonical_key(&state));
    }
    let set = to_sequence_set(game, &state).expect("terminal");
    (set, steps)
}

/// Train a Q-network per the terminal-reward regression loop: collect an
/// epsilon-greedy episode, push its experiences into the FIFO, and once the
/// FIFO is half full take one mini-batch gradient step per episode. Every
/// `eval_cycle` episodes a greedy probe episode is recorded.
pub fn dqn_train(
    game: &GameConfig,
    features: &FeatureSpec,
    objective: &Objective,
    net_cfg: &NetworkConfig,
    cfg: &DqnConfig,
    seed: u64,
) -> Result<DqnOutcome, BaselineError> {
    assert!(cfg.fifo_capacity >= cfg.batch_size);
    let mut snap = net::init_random(net_cfg, derive_seed(seed, "dqn-init", 0))?;
    let mut fifo: VecDeque<(Vec<f64>, usize, f64)> = VecDeque::new();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "dqn-play", 0));
    let mut tracker = VisitedTracker::new(cfg.tracker_cap);
    let mut log = Vec::new();
    let mut best_metric = worst(objective.direction());
    let mut best_set: Option<SequenceSet> = None;

    for episode in 1..=cfg.episodes {
        let epsilon = cfg.epsilon_at(episode - 1);
        let (set, steps) = dqn_episode(game, features, &snap, epsilon, &mut rng, &mut tracker);
        let metric = objective.metric(&set);
        let reward = objective.reward(metric);
        if better(objective.direction(), metric, best_metric) {
            best_metric = metric;
            best_set = Some(set);
        }
        for (input, action) in steps {
            if fifo.len() == cfg.fifo_capacity {
                fifo.pop_front();
            }
            fifo.push_back((input, action, reward));
        }

        if fifo.len() > cfg.fifo_capacity / 2 && fifo.len() >= cfg.batch_size {
            let picks = rand::seq::index::sample(&mut rng, fifo.len(), cfg.batch_size).into_vec();
            let batch = QBatch {
                inputs: picks.iter().map(|&i| fifo[i].0.clone()).collect(),
                actions: picks.iter().map(|&i| fifo[i].1).collect(),
                targets: picks.iter().map(|&i| fifo[i].2).collect(),
            };
            let (next, _) = net::train_q_step(&snap, &batch)?;
            snap = next;
        }

        if episode % cfg.eval_cycle == 0 {
            let (probe_set, _) = dqn_episode(game, features, &snap, 0.0, &mut rng, &mut tracker);
            let probe_metric = objective.metric(&probe_set);
            if better(objective.direction(), probe_metric, best_metric) {
                best_metric = probe_metric;
                best_set = Some(probe_set);
            }
            log.push(DqnRunPoint {
                episode,
                visited_states: tracker.count(),
                metric: probe_metric,
            });
        }
    }

    Ok(DqnOutcome {
        net: snap,
        log,
        best_metric,
        best_set: best_set.expect("at least one episode"),
        visited_states: tracker.count(),
    })
}

/// Greedy (epsilon = 0) episode with a trained Q-network.
pub fn dqn_discover(
    game: &GameConfig,
    features: &FeatureSpec,
    snap: &NetworkSnapshot,
) -> SequenceSet {
    let mut rng = ChaCha8Rng::seed_from_u64(0); // unused at epsilon 0
    let mut tracker = VisitedTracker::new(1);
    dqn_episode(game, features, snap, 0.0, &mut rng, &mut tracker).0
}

/// CSV of the Q-learning probe log.
pub fn dqn_log_csv(log: &[DqnRunPoint]) -> String {
    let mut out = String::from("# dqn v1\nepisode,visited_states,metric\n");
    for p in log {
        out.push_str(&format!(
            "{},{},{}\n",
            p.episode, p.visited_states, p.metric
        ));
    }
    out
}
