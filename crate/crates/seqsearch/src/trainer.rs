//! The outer reinforcement-learning loop: noisy self-play generation,
//! windowed experience replay, periodic network updates, noiseless
//! evaluation, segmented reward induction, and visited-state accounting.

use crate::cdma::{metric_ccc, reward_ccc, CdmaConfig, CdmaRewardSpec};
use crate::game::{
    apply_move, canonical_key, encode_features, initial_state, to_sequence_set, FeatureSpec,
    GameConfig, SequenceSet,
};
use crate::mcts::{
    sample_move, search, Evaluate, MctsError, MoveSelection, NetEvaluator, SearchConfig,
};
use crate::net::{self, NetworkSnapshot, TrainBatch};
use crate::radar::{metric_mmf, reward_radar, PhaseCode, RadarRewardSpec};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error(transparent)]
    Mcts(#[from] MctsError),
    #[error(transparent)]
    Net(#[from] net::NetError),
    #[error("reward schedule: {0}")]
    Schedule(String),
    #[error("problem/game shape mismatch: {0}")]
    Shape(String),
}

/// Whether smaller or larger metrics are better for the active problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Minimize,
    Maximize,
}

/// Metric backend plus the live reward map.
#[derive(Debug, Clone)]
pub enum Objective {
    Cdma {
        cfg: CdmaConfig,
        spec: CdmaRewardSpec,
    },
    Radar {
        spec: RadarRewardSpec,
    },
}

impl Objective {
    pub fn metric(&self, set: &SequenceSet) -> f64 {
        match self {
            Objective::Cdma { cfg, .. } => {
                metric_ccc(set, cfg).expect("board shape fixed by the game config")
            }
            Objective::Radar { .. } => {
                let code = PhaseCode::new(set.row(0).to_vec()).expect("valid +-1 code");
                metric_mmf(&code).unwrap_or_else(|e| panic!("metric solve failed: {e}"))
            }
        }
    }

    pub fn reward(&self, metric: f64) -> f64 {
        match self {
            Objective::Cdma { spec, .. } => reward_ccc(metric, spec),
            Objective::Radar { spec } => reward_radar(metric, spec),
        }
    }

    pub fn reward_of(&self, set: &SequenceSet) -> f64 {
        self.reward(self.metric(set))
    }

    pub fn direction(&self) -> Direction {
        match self {
            Objective::Cdma { .. } => Direction::Minimize,
            Objective::Radar { .. } => Direction::Maximize,
        }
    }
}

/// One training example: board image, search policy, episode terminal reward.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Experience {
    pub input: Vec<f64>,
    pub policy: Vec<f64>,
    pub reward: f64,
}

/// One finished self-play episode.
#[derive(Debug, Clone)]
pub struct EpisodeResult {
    pub experiences: Vec<Experience>,
    pub set: SequenceSet,
    pub metric: f64,
    pub reward: f64,
    /// Canonical keys of every state touched by play and by search.
    pub visited: Vec<u64>,
}

/// Derive a named sub-stream seed from the master seed. All randomness in a
/// run flows from the master seed through these streams.
pub fn derive_seed(master: u64, domain: &str, index: u64) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64 ^ master.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    let mut eat = |byte: u8| {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    };
    for b in domain.as_bytes() {
        eat(*b);
    }
    for b in index.to_le_bytes() {
        eat(b);
    }
    hash
}

/// Play one episode under the given evaluator; per step, run a search, store
/// the policy, then sample the move per the step's temperature regime.
pub fn self_play_episode(
    game: &GameConfig,
    features: &FeatureSpec,
    evaluator: &dyn Evaluate,
    objective: &Objective,
    search_cfg: &SearchConfig,
    seed: u64,
) -> Result<EpisodeResult, TrainError> {
    let steps = game.steps();
    let mut state = initial_state(game);
    let mut pending: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(steps);
    let mut visited = Vec::new();
    visited.push(canonical_key(&state));
    let mut move_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "moves", 0));
    let terminal = |set: &SequenceSet| objective.reward_of(set);
    for t in 0..steps {
        let out = search(
            game,
            &state,
            evaluator,
            &terminal,
            search_cfg,
            derive_seed(seed, "search", t as u64),
        )?;
        visited.extend(out.visited_keys());
        let image = encode_features(game, &state, features).expect("feature spec fits");
        pending.push((image.planes, out.policy.clone()));
        let regime = if search_cfg.tau.tau_at(t) >= 1e-2 {
            MoveSelection::Proportional
        } else {
            MoveSelection::Greedy
        };
        let mv = sample_move(&out.policy, regime, &mut move_rng);
        state = apply_move(game, &state, mv).expect("non-terminal by construction");
        visited.push(canonical_key(&state));
    }
    let set = to_sequence_set(game, &state).expect("terminal after steps moves");
    let metric = objective.metric(&set);
    let reward = objective.reward(metric);
    let experiences = pending
        .into_iter()
        .map(|(input, policy)| Experience {
            input,
            policy,
            reward,
        })
        .collect();
    Ok(EpisodeResult {
        experiences,
        set,
        metric,
        reward,
        visited,
    })
}

/// Play one episode straight from the evaluator's raw policy: no search, no
/// noise. The probe half of the convergence diagnostic.
pub fn raw_policy_episode(
    game: &GameConfig,
    evaluator: &dyn Evaluate,
    objective: &Objective,
    seed: u64,
) -> (SequenceSet, f64) {
    let mut state = initial_state(game);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while !state.is_terminal(game) {
        let (policy, _) = evaluator.evaluate(&state);
        let mv = sample_move(&policy, MoveSelection::Proportional, &mut rng);
        state = apply_move(game, &state, mv).expect("non-terminal");
    }
    let set = to_sequence_set(game, &state).expect("terminal");
    let metric = objective.metric(&set);
    (set, metric)
}

/// How mini-batches are drawn from the replay window each cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BatchMode {
    /// Shuffle the window once and take ceil(E / batch) chunks.
    WithoutReplacement,
    /// Draw ceil(E / batch) * factor batches of uniform samples.
    WithReplacement { factor: usize },
}

/// Plan the mini-batch index sets for one update phase.
pub fn plan_batches(
    experiences: usize,
    batch_size: usize,
    mode: BatchMode,
    rng: &mut impl Rng,
) -> Vec<Vec<usize>> {
    assert!(batch_size >= 1);
    if experiences == 0 {
        return Vec::new();
    }
    let per_pass = experiences.div_ceil(batch_size);
    match mode {
        BatchMode::WithoutReplacement => {
            let mut order: Vec<usize> = (0..experiences).collect();
            order.shuffle(rng);
            order.chunks(batch_size).map(|c| c.to_vec()).collect()
        }
        BatchMode::WithReplacement { factor } => (0..per_pass * factor)
            .map(|_| {
                (0..batch_size.min(experiences))
                    .map(|_| rng.gen_range(0..experiences))
                    .collect()
            })
            .collect(),
    }
}

/// One reward window of the segmented induction schedule.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Segment {
    pub ml: f64,
    pub mu: f64,
    /// Fixed episode count at which the next segment takes over; when
    /// absent, advancement falls back to the evaluation-reward trigger.
    pub advance_at_episode: Option<usize>,
}

/// Ordered, pairwise-overlapping reward windows; advancement is monotone.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RewardSchedule {
    segments: Vec<Segment>,
    current: usize,
    /// Mean evaluation reward at which the trigger fires.
    pub trigger_reward: f64,
}

impl RewardSchedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self, TrainError> {
        if segments.is_empty() {
            return Err(TrainError::Schedule("no segments".into()));
        }
        for seg in &segments {
            if !(seg.ml < seg.mu) {
                return Err(TrainError::Schedule(format!(
                    "segment [{}, {}] is empty",
                    seg.ml, seg.mu
                )));
            }
        }
        for pair in segments.windows(2) {
            if !(pair[1].ml < pair[0].mu) {
                return Err(TrainError::Schedule(format!(
                    "segments [{}, {}] and [{}, {}] do not overlap",
                    pair[0].ml, pair[0].mu, pair[1].ml, pair[1].mu
                )));
            }
        }
        Ok(Self {
            segments,
            current: 0,
            trigger_reward: 0.8,
        })
    }

    pub fn single(ml: f64, mu: f64) -> Result<Self, TrainError> {
        Self::new(vec![Segment {
            ml,
            mu,
            advance_at_episode: None,
        }])
    }

    pub fn current_index(&self) -> usize {
        self.current
    }

    pub fn current_spec(&self) -> RadarRewardSpec {
        let seg = self.segments[self.current];
        RadarRewardSpec::new(seg.ml, seg.mu).expect("validated on construction")
    }

    /// Advance at most one segment: a reached episode threshold takes
    /// precedence, otherwise the evaluation-reward trigger. Never regresses.
    pub fn maybe_advance(&mut self, episodes_done: usize, eval_mean_reward: f64) -> bool {
        if self.current + 1 >= self.segments.len() {
            return false;
        }
        let seg = self.segments[self.current];
        let fire = match seg.advance_at_episode {
            Some(at) => episodes_done >= at,
            None => eval_mean_reward >= self.trigger_reward,
        };
        if fire {
            self.current += 1;
        }
        fire
    }
}

/// Distinct-state counter: exact up to a memory cap, then degrades to a
/// probabilistic estimate and flags the log.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VisitedTracker {
    cap: usize,
    exact: FxHashSet<u64>,
    degraded: bool,
    registers: Vec<u8>,
}

const HLL_BITS: u32 = 12;

impl VisitedTracker {
    pub fn new(cap: usize) -> Self {
        Self {
            cap,
            exact: FxHashSet::default(),
            degraded: false,
            registers: vec![0u8; 1 << HLL_BITS],
        }
    }

    pub fn insert(&mut self, key: u64) {
        // The probabilistic sketch runs from the start so a later overflow
        // loses nothing. splitmix64 finalizer for register assignment.
        let mut h = key.wrapping_add(0x9e37_79b9_7f4a_7c15);
        h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        h ^= h >> 31;
        let idx = (h >> (64 - HLL_BITS)) as usize;
        let rank = (h << HLL_BITS).leading_zeros().min(63) as u8 + 1;
        if rank > self.registers[idx] {
            self.registers[idx] = rank;
        }
        if !self.degraded {
            self.exact.insert(key);
            if self.exact.len() > self.cap {
                self.degraded = true;
                self.exact = FxHashSet::default();
            }
        }
    }

    pub fn extend(&mut self, keys: impl IntoIterator<Item = u64>) {
        for k in keys {
            self.insert(k);
        }
    }

    pub fn is_degraded(&self) -> bool {
        self.degraded
    }

    pub fn count(&self) -> u64 {
        if !self.degraded {
            return self.exact.len() as u64;
        }
        let m = self.registers.len() as f64;
        let alpha = 0.7213 / (1.0 + 1.079 / m);
        let sum: f64 = self
            .registers
            .iter()
            .map(|&r| 2.0f64.powi(-(r as i32)))
            .sum();
        let mut estimate = alpha * m * m / sum;
        if estimate <= 2.5 * m {
            let zeros = self.registers.iter().filter(|&&r| r == 0).count();
            if zeros > 0 {
                estimate = m * (m / zeros as f64).ln();
            }
        }
        estimate.round() as u64
    }
}

/// One evaluation phase's outcome.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub mean_metric: f64,
    /// min for minimization problems, max for maximization.
    pub extreme_metric: f64,
    pub mean_reward: f64,
    pub best_set: SequenceSet,
    pub metrics: Vec<f64>,
}

/// Play `games` noiseless games and report metric statistics.
pub fn evaluate_noiseless(
    game: &GameConfig,
    features: &FeatureSpec,
    evaluator: &(dyn Evaluate + Sync),
    objective: &Objective,
    search_cfg: &SearchConfig,
    games: usize,
    seeds: &[u64],
    tracker: Option<&mut VisitedTracker>,
) -> Result<Evaluation, TrainError> {
    assert_eq!(seeds.len(), games);
    let quiet = search_cfg.noiseless();
    let episodes: Vec<EpisodeResult> = seeds
        .par_iter()
        .map(|&seed| self_play_episode(game, features, evaluator, objective, &quiet, seed))
        .collect::<Result<_, _>>()?;
    if let Some(tracker) = tracker {
        for ep in &episodes {
            tracker.extend(ep.visited.iter().copied());
        }
    }
    let metrics: Vec<f64> = episodes.iter().map(|e| e.metric).collect();
    let mean_metric = metrics.iter().sum::<f64>() / metrics.len() as f64;
    let mean_reward = episodes.iter().map(|e| e.reward).sum::<f64>() / episodes.len() as f64;
    let best = match objective.direction() {
        Direction::Minimize => episodes
            .iter()
            .min_by(|a, b| a.metric.total_cmp(&b.metric))
            .expect("games >= 1"),
        Direction::Maximize => episodes
            .iter()
            .max_by(|a, b| a.metric.total_cmp(&b.metric))
            .expect("games >= 1"),
    };
    Ok(Evaluation {
        mean_metric,
        extreme_metric: best.metric,
        mean_reward,
        best_set: best.set.clone(),
        metrics,
    })
}

/// Loop-level settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainLoopConfig {
    /// Episodes per update cycle (G).
    pub episodes_per_cycle: usize,
    /// Replay window multiplier (z): the window holds z * G episodes.
    pub window_cycles: usize,
    pub eval_games: usize,
    pub batch_size: usize,
    pub batch_mode: BatchMode,
    pub total_episodes: usize,
    /// Also play raw-policy probe games each cycle.
    pub probe_dnn: bool,
    /// Memory cap (distinct keys) of the visited-state tracker.
    pub tracker_cap: usize,
}

impl TrainLoopConfig {
    pub fn cycles(&self) -> usize {
        self.total_episodes.div_ceil(self.episodes_per_cycle)
    }
}

/// What the problem being searched is, including any reward schedule.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Problem {
    Cdma {
        cfg: CdmaConfig,
        spec: CdmaRewardSpec,
    },
    Radar {
        schedule: RewardSchedule,
    },
}

impl Problem {
    pub fn objective(&self) -> Objective {
        match self {
            Problem::Cdma { cfg, spec } => Objective::Cdma {
                cfg: *cfg,
                spec: *spec,
            },
            Problem::Radar { schedule } => Objective::Radar {
                spec: schedule.current_spec(),
            },
        }
    }

    pub fn segment_index(&self) -> usize {
        match self {
            Problem::Cdma { .. } => 0,
            Problem::Radar { schedule } => schedule.current_index(),
        }
    }
}

/// One row of the run log.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub cycle: usize,
    pub episode: usize,
    pub mean_metric: f64,
    pub extreme_metric: f64,
    pub visited_states: u64,
    pub tracker_degraded: bool,
    pub segment_index: usize,
    pub elapsed_s: f64,
    pub probe_mean_metric: Option<f64>,
    /// Mean batch loss over this cycle's update phase.
    #[serde(default)]
    pub train_loss: f64,
}

/// CSV of the run log; wall time is the only nondeterministic column.
pub fn run_log_csv(records: &[RunRecord]) -> String {
    let mut out = String::from("# runlog v1\n");
    out.push_str("episode,mean_metric,extreme_metric,visited_states,segment_index,elapsed_s\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{:.3}\n",
            r.episode,
            r.mean_metric,
            r.extreme_metric,
            r.visited_states,
            r.segment_index,
            r.elapsed_s
        ));
    }
    out
}

/// Probe CSV pairing the raw-network mean metric with the search mean metric.
pub fn probe_csv(records: &[RunRecord]) -> String {
    let mut out = String::from("# probe v1\n");
    out.push_str("episode,dnn_mean_metric,search_mean_metric\n");
    for r in records {
        if let Some(p) = r.probe_mean_metric {
            out.push_str(&format!("{},{},{}\n", r.episode, p, r.mean_metric));
        }
    }
    out
}

/// The complete training loop state.
pub struct TrainLoop {
    pub game: GameConfig,
    pub features: FeatureSpec,
    pub search: SearchConfig,
    pub cfg: TrainLoopConfig,
    pub problem: Problem,
    pub net: NetworkSnapshot,
    pub window: VecDeque<Vec<Experience>>,
    pub episodes_done: usize,
    pub cycles_done: usize,
    pub tracker: VisitedTracker,
    pub log: Vec<RunRecord>,
    pub master_seed: u64,
    /// Best evaluation set seen so far, with its metric.
    pub best: Option<(f64, SequenceSet)>,
    started: std::time::Instant,
    elapsed_offset: f64,
}

/// Serializable part of a [`TrainLoop`], for checkpoint/resume. The network
/// itself travels in its own container.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoopState {
    pub episodes_done: usize,
    pub cycles_done: usize,
    pub window: Vec<Vec<Experience>>,
    pub problem: Problem,
    pub tracker: VisitedTracker,
    pub log: Vec<RunRecord>,
    pub best: Option<(f64, SequenceSet)>,
    pub elapsed_s: f64,
}

impl TrainLoop {
    pub fn new(
        game: GameConfig,
        features: FeatureSpec,
        search: SearchConfig,
        cfg: TrainLoopConfig,
        problem: Problem,
        net: NetworkSnapshot,
        master_seed: u64,
    ) -> Result<Self, TrainError> {
        if net.config().actions != game.moves() {
            return Err(TrainError::Shape(format!(
                "network has {} actions, game has {} moves",
                net.config().actions,
                game.moves()
            )));
        }
        if let Problem::Cdma { cfg: c, .. } = &problem {
            if c.game_rows() != game.k || c.length != game.n {
                return Err(TrainError::Shape(format!(
                    "CDMA wants a {}x{} board, game is {}x{}",
                    c.game_rows(),
                    c.length,
                    game.k,
                    game.n
                )));
            }
        }
        if matches!(problem, Problem::Radar { .. }) && game.k != 1 {
            return Err(TrainError::Shape("radar games are single-sequence".into()));
        }
        let tracker = VisitedTracker::new(cfg.tracker_cap);
        Ok(Self {
            game,
            features,
            search,
            cfg,
            problem,
            net,
            window: VecDeque::new(),
            episodes_done: 0,
            cycles_done: 0,
            tracker,
            log: Vec::new(),
            master_seed,
            best: None,
            started: std::time::Instant::now(),
            elapsed_offset: 0.0,
        })
    }

    /// Extract the serializable loop state.
    pub fn to_state(&self) -> LoopState {
        LoopState {
            episodes_done: self.episodes_done,
            cycles_done: self.cycles_done,
            window: self.window.iter().cloned().collect(),
            problem: self.problem.clone(),
            tracker: self.tracker.clone(),
            log: self.log.clone(),
            best: self.best.clone(),
            elapsed_s: self.elapsed_offset + self.started.elapsed().as_secs_f64(),
        }
    }

    /// Restore a checkpointed loop state; the caller supplies the matching
    /// network snapshot.
    pub fn restore(&mut self, state: LoopState, net: NetworkSnapshot) {
        self.episodes_done = state.episodes_done;
        self.cycles_done = state.cycles_done;
        self.window = state.window.into();
        self.problem = state.problem;
        self.tracker = state.tracker;
        self.log = state.log;
        self.best = state.best;
        self.elapsed_offset = state.elapsed_s;
        self.started = std::time::Instant::now();
        self.net = net;
    }

    /// Fix the CDMA reward scale from 50 noiseless games with the current
    /// (untrained) network. Must run before the first cycle; one-shot.
    pub fn calibrate_cdma(&mut self) -> Result<f64, TrainError> {
        let Problem::Cdma { cfg, spec } = &mut self.problem else {
            return Err(TrainError::Shape("calibration is CDMA-only".into()));
        };
        let provisional = Objective::Cdma {
            cfg: *cfg,
            spec: *spec,
        };
        let seeds: Vec<u64> = (0..50)
            .map(|i| derive_seed(self.master_seed, "calibrate", i))
            .collect();
        let evaluator = NetEvaluator {
            snapshot: &self.net,
            game: self.game,
            features: self.features,
        };
        let eval = evaluate_noiseless(
            &self.game,
            &self.features,
            &evaluator,
            &provisional,
            &self.search,
            50,
            &seeds,
            Some(&mut self.tracker),
        )?;
        spec.calibrate(&eval.metrics)
            .map_err(|e| TrainError::Schedule(e.to_string()))?;
        Ok(spec.mu())
    }

    pub fn finished(&self) -> bool {
        self.episodes_done >= self.cfg.total_episodes
    }

    /// One full cycle: G noisy episodes, window update, network training,
    /// noiseless evaluation, schedule advancement, log record.
    pub fn run_iteration(&mut self) -> Result<&RunRecord, TrainError> {
        let objective = self.problem.objective();
        let g = self.cfg.episodes_per_cycle;
        let evaluator = NetEvaluator {
            snapshot: &self.net,
            game: self.game,
            features: self.features,
        };

        // (i) G noisy self-play episodes against the frozen snapshot.
        let base = self.episodes_done as u64;
        let episodes: Vec<EpisodeResult> = (0..g)
            .into_par_iter()
            .map(|i| {
                self_play_episode(
                    &self.game,
                    &self.features,
                    &evaluator,
                    &objective,
                    &self.search,
                    derive_seed(self.master_seed, "episode", base + i as u64),
                )
            })
            .collect::<Result<_, _>>()?;
        for ep in &episodes {
            self.tracker.extend(ep.visited.iter().copied());
        }
        for ep in episodes {
            self.window.push_back(ep.experiences);
            while self.window.len() > self.cfg.window_cycles * g {
                self.window.pop_front();
            }
        }
        self.episodes_done += g;

        // (ii) train on the replay window.
        let flat: Vec<&Experience> = self.window.iter().flatten().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
            self.master_seed,
            "train",
            self.cycles_done as u64,
        ));
        let batches = plan_batches(
            flat.len(),
            self.cfg.batch_size,
            self.cfg.batch_mode,
            &mut rng,
        );
        let mut snap = self.net.clone();
        let mut loss_sum = 0.0f64;
        let mut loss_batches = 0usize;
        for batch in batches {
            let tb = TrainBatch {
                inputs: batch.iter().map(|&i| flat[i].input.clone()).collect(),
                policies: batch.iter().map(|&i| flat[i].policy.clone()).collect(),
                rewards: batch.iter().map(|&i| flat[i].reward).collect(),
            };
            let (next, loss) = net::train_step(&snap, &tb)?;
            snap = next;
            loss_sum += loss;
            loss_batches += 1;
        }
        self.net = snap;
        let train_loss = if loss_batches > 0 {
            loss_sum / loss_batches as f64
        } else {
            0.0
        };

        // (iii) assess the new network with noiseless games, fresh seeds.
        let eval_evaluator = NetEvaluator {
            snapshot: &self.net,
            game: self.game,
            features: self.features,
        };
        let seeds: Vec<u64> = (0..self.cfg.eval_games)
            .map(|i| {
                derive_seed(
                    self.master_seed,
                    "eval",
                    (self.cycles_done * self.cfg.eval_games + i) as u64,
                )
            })
            .collect();
        let eval = evaluate_noiseless(
            &self.game,
            &self.features,
            &eval_evaluator,
            &objective,
            &self.search,
            self.cfg.eval_games,
            &seeds,
            Some(&mut self.tracker),
        )?;

        let probe_mean_metric = if self.cfg.probe_dnn {
            let metrics: Vec<f64> = (0..self.cfg.eval_games)
                .into_par_iter()
                .map(|i| {
                    let seed = derive_seed(
                        self.master_seed,
                        "probe",
                        (self.cycles_done * self.cfg.eval_games + i) as u64,
                    );
                    raw_policy_episode(&self.game, &eval_evaluator, &objective, seed).1
                })
                .collect();
            Some(metrics.iter().sum::<f64>() / metrics.len() as f64)
        } else {
            None
        };

        // Segment advancement (radar only); monotone, threshold first.
        if let Problem::Radar { schedule } = &mut self.problem {
            schedule.maybe_advance(self.episodes_done, eval.mean_reward);
        }

        let improved = match (&self.best, objective.direction()) {
            (None, _) => true,
            (Some((m, _)), Direction::Minimize) => eval.extreme_metric < *m,
            (Some((m, _)), Direction::Maximize) => eval.extreme_metric > *m,
        };
        if improved {
            self.best = Some((eval.extreme_metric, eval.best_set.clone()));
        }

        self.cycles_done += 1;
        let record = RunRecord {
            cycle: self.cycles_done,
            episode: self.episodes_done,
            mean_metric: eval.mean_metric,
            extreme_metric: eval.extreme_metric,
            visited_states: self.tracker.count(),
            tracker_degraded: self.tracker.is_degraded(),
            segment_index: self.problem.segment_index(),
            elapsed_s: self.elapsed_offset + self.started.elapsed().as_secs_f64(),
            probe_mean_metric,
            train_loss,
        };
        self.log.push(record);
        Ok(self.log.last().expect("just pushed"))
    }
}
