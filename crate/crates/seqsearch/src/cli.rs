//! Operator surface behind the command-line binary: run manifests, the
//! training driver with checkpoint/resume, sequence evaluation, baseline
//! runs, and the radar estimation sweep. Every output directory carries the
//! manifest that regenerates it.

use crate::baselines::{
    self, dqn_log_csv, mean_max_csv, sample_phase_code, sample_sequence_set, DqnConfig,
};
use crate::cdma::{metric_ccc, reward_ccc, sup_metric_ccc, CdmaConfig, CdmaRewardSpec};
use crate::game::{FeatureSpec, GameConfig};
use crate::mcts::SearchConfig;
use crate::net::{self, NetworkConfig, NetworkSnapshot};
use crate::radar::{
    benchmarks, bounds_mmf, merit_factor_mf, metric_mmf, reward_radar, simulate_mse, ClutterModel,
    PhaseCode, RadarRewardSpec,
};
use crate::textio;
use crate::trainer::{
    derive_seed, BatchMode, Direction, LoopState, Objective, Problem, RewardSchedule, RunRecord,
    Segment, TrainLoop, TrainLoopConfig,
};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Errors split by exit code: configuration/usage problems exit 1, runtime
/// failures exit 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }

    fn config(err: impl std::fmt::Display) -> Self {
        CliError::Config(err.to_string())
    }

    fn runtime(err: impl std::fmt::Display) -> Self {
        CliError::Runtime(err.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

// ---- run manifest ---------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProblemSpec {
    Cdma {
        users: usize,
        flock: usize,
        length: usize,
    },
    Radar {
        length: usize,
        segments: Vec<SegmentSpec>,
        #[serde(default)]
        trigger_reward: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SegmentSpec {
    pub ml: f64,
    pub mu: f64,
    #[serde(default)]
    pub advance_at_episode: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchSpec {
    pub simulations: usize,
    pub cp: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetSpec {
    pub conv_layers: usize,
    pub filters: usize,
    #[serde(default = "default_l2")]
    pub l2: f64,
    #[serde(default = "default_lr")]
    pub learning_rate: f64,
    #[serde(default = "default_bn_decay")]
    pub bn_decay: f64,
}

fn default_l2() -> f64 {
    1e-4
}
fn default_lr() -> f64 {
    1e-4
}
fn default_bn_decay() -> f64 {
    0.99
}
fn default_tracker_cap() -> usize {
    2_000_000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainerSpec {
    pub episodes_per_cycle: usize,
    pub window_cycles: usize,
    pub eval_games: usize,
    pub batch_size: usize,
    pub batch_mode: BatchMode,
    pub total_episodes: usize,
    #[serde(default)]
    pub probe_dnn: bool,
    #[serde(default = "default_tracker_cap")]
    pub tracker_cap: usize,
}

/// Everything that determines a reproducible training run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub name: String,
    pub problem: ProblemSpec,
    pub ell: u32,
    pub search: SearchSpec,
    pub net: NetSpec,
    pub trainer: TrainerSpec,
    pub seed: u64,
}

const PRESETS: &[(&str, &str)] = &[
    ("ccc-2x2x8", include_str!("../configs/ccc-2x2x8.json")),
    ("radar-59", include_str!("../configs/radar-59.json")),
    ("ccc-toy", include_str!("../configs/ccc-toy.json")),
    ("radar-toy-13", include_str!("../configs/radar-toy-13.json")),
];

/// Load a manifest from a preset name or a JSON file path.
pub fn load_manifest(config: &str) -> Result<RunManifest> {
    let text = match PRESETS.iter().find(|(name, _)| *name == config) {
        Some((_, body)) => (*body).to_string(),
        None => fs::read_to_string(config)
            .map_err(|e| CliError::Config(format!("cannot read config {config}: {e}")))?,
    };
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("config {config}: {e}")))
}

impl RunManifest {
    pub fn game(&self) -> Result<GameConfig> {
        let (k, n) = match &self.problem {
            ProblemSpec::Cdma {
                users,
                flock,
                length,
            } => (users * flock, *length),
            ProblemSpec::Radar { length, .. } => (1, *length),
        };
        GameConfig::new(k, n, self.ell).map_err(CliError::config)
    }

    pub fn build(&self, seed_override: Option<u64>) -> Result<TrainLoop> {
        let game = self.game()?;
        let features = FeatureSpec::for_game(&game);
        let problem = match &self.problem {
            ProblemSpec::Cdma {
                users,
                flock,
                length,
            } => {
                let cfg = CdmaConfig::new(*users, *flock, *length);
                Problem::Cdma {
                    cfg,
                    spec: CdmaRewardSpec::provisional(&cfg),
                }
            }
            ProblemSpec::Radar {
                segments,
                trigger_reward,
                ..
            } => {
                let segs = segments
                    .iter()
                    .map(|s| Segment {
                        ml: s.ml,
                        mu: s.mu,
                        advance_at_episode: s.advance_at_episode,
                    })
                    .collect();
                let mut schedule = RewardSchedule::new(segs).map_err(CliError::config)?;
                if let Some(t) = trigger_reward {
                    schedule.trigger_reward = *t;
                }
                Problem::Radar { schedule }
            }
        };
        let net_cfg = NetworkConfig {
            kp: features.kp,
            np: features.np,
            conv_layers: self.net.conv_layers,
            filters: self.net.filters,
            actions: game.moves(),
            l2: self.net.l2,
            learning_rate: self.net.learning_rate,
            bn_decay: self.net.bn_decay,
        };
        let seed = seed_override.unwrap_or(self.seed);
        let snapshot = net::init_random(&net_cfg, derive_seed(seed, "net-init", 0))
            .map_err(CliError::config)?;
        let search = SearchConfig::new(
            self.search.simulations,
            self.search.cp,
            self.search.alpha,
            game.steps(),
        );
        let cfg = TrainLoopConfig {
            episodes_per_cycle: self.trainer.episodes_per_cycle,
            window_cycles: self.trainer.window_cycles,
            eval_games: self.trainer.eval_games,
            batch_size: self.trainer.batch_size,
            batch_mode: self.trainer.batch_mode,
            total_episodes: self.trainer.total_episodes,
            probe_dnn: self.trainer.probe_dnn,
            tracker_cap: self.trainer.tracker_cap,
        };
        TrainLoop::new(game, features, search, cfg, problem, snapshot, seed)
            .map_err(CliError::config)
    }
}

// ---- train ----------------------------------------------------------------

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn plot_script(csv: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set key left top\n\
         set xlabel 'episode'\n\
         set ylabel 'metric'\n\
         set y2label 'visited states'\n\
         set y2tics\n\
         plot '{csv}' using 1:2 with lines title 'mean metric', \\\n\
         \x20    '{csv}' using 1:3 with lines title 'extreme metric', \\\n\
         \x20    '{csv}' using 1:4 axes x1y2 with lines title 'visited states'\n"
    )
}

fn save_checkpoint(run_dir: &Path, training: &TrainLoop) -> Result<()> {
    let mut bytes = Vec::new();
    training.net.save(&mut bytes).map_err(CliError::runtime)?;
    fs::write(run_dir.join("net.ckpt"), bytes)
        .map_err(|e| CliError::Runtime(format!("net.ckpt: {e}")))?;
    let state = serde_json::to_string(&training.to_state()).map_err(CliError::runtime)?;
    write_file(&run_dir.join("state.json"), &state)?;
    write_runlogs(run_dir, training)?;
    if let Some((metric, set)) = &training.best {
        let mut text = format!("# best metric {metric}\n");
        text.push_str(&textio::format_sequence_set(set));
        write_file(&run_dir.join("best.txt"), &text)?;
    }
    Ok(())
}

fn write_runlogs(run_dir: &Path, training: &TrainLoop) -> Result<()> {
    write_file(
        &run_dir.join("runlog.csv"),
        &crate::trainer::run_log_csv(&training.log),
    )?;
    if training.cfg.probe_dnn {
        write_file(
            &run_dir.join("probe.csv"),
            &crate::trainer::probe_csv(&training.log),
        )?;
    }
    write_file(&run_dir.join("plot.gnu"), &plot_script("runlog.csv"))?;
    Ok(())
}

/// Progress callback invoked after every cycle.
pub type CycleHook<'a> = &'a mut dyn FnMut(&RunRecord);

/// Drive a training run to completion, checkpointing every cycle; resumable.
pub fn cmd_train(
    config: &str,
    out_dir: &Path,
    seed_override: Option<u64>,
    resume: bool,
    hook: Option<CycleHook<'_>>,
) -> Result<PathBuf> {
    let manifest = load_manifest(config)?;
    let run_dir = out_dir.join(&manifest.name);
    fs::create_dir_all(&run_dir).map_err(CliError::runtime)?;
    let mut training = manifest.build(seed_override)?;
    write_file(
        &run_dir.join("manifest.json"),
        &serde_json::to_string_pretty(&manifest).map_err(CliError::runtime)?,
    )?;

    let state_path = run_dir.join("state.json");
    if resume && state_path.exists() {
        let state: LoopState =
            serde_json::from_str(&fs::read_to_string(&state_path).map_err(CliError::runtime)?)
                .map_err(|e| CliError::Runtime(format!("state.json: {e}")))?;
        let bytes = fs::read(run_dir.join("net.ckpt")).map_err(CliError::runtime)?;
        let snap = NetworkSnapshot::load_matching(&mut bytes.as_slice(), training.net.config())
            .map_err(CliError::runtime)?;
        training.restore(state, snap);
    } else if let Problem::Cdma { .. } = &training.problem {
        training.calibrate_cdma().map_err(CliError::runtime)?;
    }

    let mut hook = hook;
    while !training.finished() {
        let record = training.run_iteration().map_err(CliError::runtime)?.clone();
        save_checkpoint(&run_dir, &training)?;
        if let Some(h) = hook.as_mut() {
            h(&record);
        }
    }
    Ok(run_dir)
}

// ---- eval -----------------------------------------------------------------

/// Which metric backend `eval` applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMetric {
    Ccc,
    Mmf,
    MeritFactor,
}

impl std::str::FromStr for EvalMetric {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ccc" => Ok(EvalMetric::Ccc),
            "mmf" => Ok(EvalMetric::Mmf),
            "mf" | "merit-factor" => Ok(EvalMetric::MeritFactor),
            other => Err(format!("unknown metric {other:?} (expected ccc|mmf|mf)")),
        }
    }
}

/// Evaluate a sequence file and return a printable report.
pub fn cmd_eval(
    file: &Path,
    metric: EvalMetric,
    users: Option<usize>,
    reward_bounds: Option<(f64, f64)>,
) -> Result<String> {
    let text = fs::read_to_string(file)
        .map_err(|e| CliError::Config(format!("{}: {e}", file.display())))?;
    let mut report = String::new();
    match metric {
        EvalMetric::Ccc => {
            let set = textio::parse_sequence_set(&text).map_err(CliError::config)?;
            let users = users.unwrap_or(1);
            if users == 0 || set.rows() % users != 0 {
                return Err(CliError::Config(format!(
                    "{} rows cannot be split across {users} users",
                    set.rows()
                )));
            }
            let cfg = CdmaConfig::new(users, set.rows() / users, set.len());
            let m = metric_ccc(&set, &cfg).map_err(CliError::config)?;
            writeln!(report, "metric_ccc = {m}").unwrap();
            writeln!(report, "sup_metric = {}", sup_metric_ccc(&cfg)).unwrap();
            let mu = reward_bounds.map_or_else(|| sup_metric_ccc(&cfg), |(_, mu)| mu);
            writeln!(
                report,
                "reward (Mu = {mu}) = {}",
                reward_ccc(m, &CdmaRewardSpec::fixed(mu))
            )
            .unwrap();
        }
        EvalMetric::Mmf | EvalMetric::MeritFactor => {
            let code = textio::parse_phase_code(&text).map_err(CliError::config)?;
            let gamma_mmf = metric_mmf(&code).map_err(CliError::runtime)?;
            let gamma_mf = merit_factor_mf(&code);
            let (lower, upper, conjectured) = bounds_mmf(code.len());
            writeln!(report, "length = {}", code.len()).unwrap();
            writeln!(report, "gamma_mmf = {gamma_mmf}").unwrap();
            writeln!(report, "gamma_mf  = {gamma_mf}").unwrap();
            writeln!(
                report,
                "bounds: lower = {lower:.3e}, upper = {upper:.3e}, conjectured max = {conjectured}"
            )
            .unwrap();
            if let Some((ml, mu)) = reward_bounds {
                let spec = RadarRewardSpec::new(ml, mu).map_err(CliError::config)?;
                writeln!(
                    report,
                    "reward [{ml}, {mu}] = {}",
                    reward_radar(gamma_mmf, &spec)
                )
                .unwrap();
            }
        }
    }
    Ok(report)
}

// ---- baselines ------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "metric", rename_all = "kebab-case")]
pub enum MetricTarget {
    Radar {
        length: usize,
    },
    Cdma {
        users: usize,
        flock: usize,
        length: usize,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BaselineManifest {
    Random {
        target: MetricTarget,
        budget: u64,
        #[serde(default = "default_runs")]
        runs: usize,
        seed: u64,
    },
    Exhaustive {
        target: MetricTarget,
        #[serde(default)]
        census: bool,
        #[serde(default = "default_limit_bits")]
        limit_bits: u32,
    },
    Dqn {
        target: MetricTarget,
        ell: u32,
        net: NetSpec,
        dqn: DqnConfig,
        /// Radar reward window for the terminal reward.
        #[serde(default)]
        reward: Option<SegmentSpec>,
        seed: u64,
    },
}

fn default_runs() -> usize {
    20
}
fn default_limit_bits() -> u32 {
    28
}

/// Run a baseline manifest; writes CSV artifacts into `out_dir` and returns
/// a human-readable summary.
pub fn cmd_baseline(config: &str, out_dir: &Path) -> Result<String> {
    let text = match fs::read_to_string(config) {
        Ok(t) => t,
        Err(e) => {
            return Err(CliError::Config(format!(
                "cannot read config {config}: {e}"
            )))
        }
    };
    let manifest: BaselineManifest =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{config}: {e}")))?;
    fs::create_dir_all(out_dir).map_err(CliError::runtime)?;
    write_file(&out_dir.join("baseline.json"), &text)?;
    let mut summary = String::new();
    match manifest {
        BaselineManifest::Random {
            target,
            budget,
            runs,
            seed,
        } => {
            let result = match &target {
                MetricTarget::Radar { length } => {
                    let n = *length;
                    baselines::random_search(
                        move |rng| sample_phase_code(n, rng),
                        |c| metric_mmf(c).expect("positive definite"),
                        Direction::Maximize,
                        budget,
                        runs,
                        seed,
                    )
                }
                MetricTarget::Cdma {
                    users,
                    flock,
                    length,
                } => {
                    let cfg = CdmaConfig::new(*users, *flock, *length);
                    let (k, n) = (cfg.game_rows(), cfg.length);
                    baselines::random_search(
                        move |rng| sample_sequence_set(k, n, rng),
                        move |s| metric_ccc(s, &cfg).expect("shape fixed"),
                        Direction::Minimize,
                        budget,
                        runs,
                        seed,
                    )
                }
            };
            write_file(&out_dir.join("mean_max.csv"), &mean_max_csv(&result))?;
            write_file(
                &out_dir.join("plot.gnu"),
                "set datafile separator ','\nset logscale x\nplot 'mean_max.csv' using 1:2 with lines title 'mean best metric'\n",
            )?;
            writeln!(
                summary,
                "random search: budget {budget}, {runs} runs, best metric {}",
                result.best_metric
            )
            .unwrap();
        }
        BaselineManifest::Exhaustive {
            target,
            census,
            limit_bits,
        } => match &target {
            MetricTarget::Radar { length } => {
                let out = baselines::exhaustive_search_radar(
                    *length,
                    Direction::Maximize,
                    census,
                    limit_bits,
                )
                .map_err(CliError::config)?;
                write_file(
                    &out_dir.join("best.txt"),
                    &textio::format_phase_code(&out.best),
                )?;
                writeln!(
                    summary,
                    "exhaustive radar N={length}: best metric {}{}",
                    out.best_metric,
                    out.census
                        .map(|c| format!(", {c} optima"))
                        .unwrap_or_default()
                )
                .unwrap();
            }
            MetricTarget::Cdma {
                users,
                flock,
                length,
            } => {
                let cfg = CdmaConfig::new(*users, *flock, *length);
                let out = baselines::exhaustive_search_sets(
                    cfg.game_rows(),
                    cfg.length,
                    |s| metric_ccc(s, &cfg).expect("shape fixed"),
                    Direction::Minimize,
                    census,
                    limit_bits,
                )
                .map_err(CliError::config)?;
                write_file(
                    &out_dir.join("best.txt"),
                    &textio::format_sequence_set(&out.best),
                )?;
                writeln!(
                    summary,
                    "exhaustive CDMA {users}x{flock}x{length}: best metric {}{}",
                    out.best_metric,
                    out.census
                        .map(|c| format!(", {c} optima"))
                        .unwrap_or_default()
                )
                .unwrap();
            }
        },
        BaselineManifest::Dqn {
            target,
            ell,
            net: net_spec,
            dqn,
            reward,
            seed,
        } => {
            let (game, objective) = match &target {
                MetricTarget::Radar { length } => {
                    let game = GameConfig::new(1, *length, ell).map_err(CliError::config)?;
                    let seg = reward.ok_or_else(|| {
                        CliError::Config("dqn radar baseline needs a reward window".into())
                    })?;
                    let spec = RadarRewardSpec::new(seg.ml, seg.mu).map_err(CliError::config)?;
                    (game, Objective::Radar { spec })
                }
                MetricTarget::Cdma {
                    users,
                    flock,
                    length,
                } => {
                    let cfg = CdmaConfig::new(*users, *flock, *length);
                    let game = GameConfig::new(cfg.game_rows(), cfg.length, ell)
                        .map_err(CliError::config)?;
                    let spec = CdmaRewardSpec::fixed(sup_metric_ccc(&cfg));
                    (game, Objective::Cdma { cfg, spec })
                }
            };
            let features = FeatureSpec::for_game(&game);
            let net_cfg = NetworkConfig {
                kp: features.kp,
                np: features.np,
                conv_layers: net_spec.conv_layers,
                filters: net_spec.filters,
                actions: game.moves(),
                l2: net_spec.l2,
                learning_rate: net_spec.learning_rate,
                bn_decay: net_spec.bn_decay,
            };
            let out = baselines::dqn_train(&game, &features, &objective, &net_cfg, &dqn, seed)
                .map_err(CliError::runtime)?;
            write_file(&out_dir.join("dqn.csv"), &dqn_log_csv(&out.log))?;
            write_file(
                &out_dir.join("plot.gnu"),
                "set datafile separator ','\nset logscale x\nplot 'dqn.csv' using 2:3 with lines title 'metric vs visited states'\n",
            )?;
            write_file(
                &out_dir.join("best.txt"),
                &textio::format_sequence_set(&out.best_set),
            )?;
            writeln!(
                summary,
                "dqn: {} episodes, best metric {}, {} visited states",
                dqn.episodes, out.best_metric, out.visited_states
            )
            .unwrap();
        }
    }
    Ok(summary)
}

// ---- radar sim -------------------------------------------------------------

/// Monte-Carlo estimation sweep: MSE per (code, sigma^2), CSV plus a
/// comparison plot script and pairwise gain summary.
pub fn cmd_radar_sim(
    files: &[PathBuf],
    sigma2: &[f64],
    trials: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<String> {
    if files.is_empty() || sigma2.is_empty() {
        return Err(CliError::Config(
            "need at least one code and one sigma2".into(),
        ));
    }
    fs::create_dir_all(out_dir).map_err(CliError::runtime)?;
    let mut codes: Vec<(String, PhaseCode)> = Vec::new();
    for file in files {
        let name = file
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| file.display().to_string());
        // Bundled benchmark codes can be named directly instead of a file.
        if let Some((_, code)) = benchmarks::all().into_iter().find(|(n, _)| *n == name) {
            codes.push((name, code));
            continue;
        }
        let text = fs::read_to_string(file)
            .map_err(|e| CliError::Config(format!("{}: {e}", file.display())))?;
        codes.push((
            name,
            textio::parse_phase_code(&text).map_err(CliError::config)?,
        ));
    }

    let mut csv = String::from("# radar-sim v1\ncode,sigma2,mse,std_err,trials,seed\n");
    let mut mse_at_first_sigma: Vec<(String, f64)> = Vec::new();
    for (ci, (name, code)) in codes.iter().enumerate() {
        for (si, &s2) in sigma2.iter().enumerate() {
            let model = ClutterModel { sigma2: s2, trials };
            let run_seed = derive_seed(seed, "radar-sim", (ci * sigma2.len() + si) as u64);
            let est = simulate_mse(code, &model, run_seed).map_err(CliError::runtime)?;
            writeln!(
                csv,
                "{name},{s2},{},{},{trials},{run_seed}",
                est.mse, est.std_err
            )
            .unwrap();
            if si == 0 {
                mse_at_first_sigma.push((name.clone(), est.mse));
            }
        }
    }
    write_file(&out_dir.join("mse.csv"), &csv)?;
    let mut plot = String::from(
        "set datafile separator ','\nset logscale y\nset xlabel 'sigma2'\nset ylabel 'MSE'\n",
    );
    plot.push_str("# one curve per code: filter rows by the first column\n");
    for (i, (name, _)) in codes.iter().enumerate() {
        let cont = if i == 0 { "plot" } else { "replot" };
        writeln!(
            plot,
            "{cont} '< grep \"^{name},\" mse.csv' using 2:3 with linespoints title '{name}'"
        )
        .unwrap();
    }
    write_file(&out_dir.join("plot.gnu"), &plot)?;

    let mut summary = String::new();
    for pair in mse_at_first_sigma.windows(2) {
        let gain_db = 10.0 * (pair[0].1 / pair[1].1).log10();
        writeln!(
            summary,
            "gain of {} over {}: {gain_db:.2} dB",
            pair[1].0, pair[0].0
        )
        .unwrap();
    }
    Ok(summary)
}

// ---- inspect-checkpoint -----------------------------------------------------

pub fn cmd_inspect_checkpoint(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let snap = NetworkSnapshot::load(&mut bytes.as_slice()).map_err(CliError::runtime)?;
    let cfg = snap.config();
    let mut out = String::new();
    writeln!(out, "checkpoint {}", path.display()).unwrap();
    writeln!(out, "  version    : {}", snap.version()).unwrap();
    writeln!(out, "  input      : {}x{}x3", cfg.kp, cfg.np).unwrap();
    writeln!(
        out,
        "  trunk      : {} conv layers, {} filters",
        cfg.conv_layers, cfg.filters
    )
    .unwrap();
    writeln!(out, "  actions    : {}", cfg.actions).unwrap();
    writeln!(out, "  parameters : {}", snap.params().len()).unwrap();
    writeln!(out, "  checksum   : ok").unwrap();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse_and_build() {
        for (name, _) in PRESETS {
            let manifest = load_manifest(name).unwrap();
            let training = manifest.build(None).unwrap();
            assert!(training.cfg.total_episodes > 0, "{name}");
        }
    }

    #[test]
    fn preset_ccc_matches_published_settings() {
        let m = load_manifest("ccc-2x2x8").unwrap();
        assert_eq!(m.ell, 4);
        assert_eq!(m.search.simulations, 400);
        assert_eq!(m.search.alpha, 0.05);
        assert_eq!(m.trainer.episodes_per_cycle, 100);
        assert_eq!(m.trainer.window_cycles, 3);
        assert_eq!(m.trainer.batch_mode, BatchMode::WithoutReplacement);
        let game = m.game().unwrap();
        assert_eq!((game.k, game.n, game.steps()), (4, 8, 8));
    }

    #[test]
    fn preset_radar_matches_published_settings() {
        let m = load_manifest("radar-59").unwrap();
        assert_eq!(m.ell, 5);
        assert_eq!(m.trainer.episodes_per_cycle, 300);
        assert_eq!(m.trainer.window_cycles, 2);
        assert_eq!(
            m.trainer.batch_mode,
            BatchMode::WithReplacement { factor: 6 }
        );
        let ProblemSpec::Radar { segments, .. } = &m.problem else {
            panic!("radar preset")
        };
        assert_eq!(segments.len(), 3);
        assert_eq!((segments[0].ml, segments[0].mu), (0.0, 15.0));
        assert_eq!(segments[0].advance_at_episode, Some(8100));
        assert_eq!((segments[1].ml, segments[1].mu), (5.0, 25.0));
        assert_eq!(segments[1].advance_at_episode, Some(11400));
        assert_eq!((segments[2].ml, segments[2].mu), (10.0, 37.0));
        let game = m.game().unwrap();
        assert_eq!(game.steps(), 12);
    }

    #[test]
    fn unknown_config_is_a_config_error() {
        let err = load_manifest("/nonexistent/path.json").unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn eval_metric_parses() {
        assert_eq!("ccc".parse::<EvalMetric>().unwrap(), EvalMetric::Ccc);
        assert_eq!("mmf".parse::<EvalMetric>().unwrap(), EvalMetric::Mmf);
        assert!("nope".parse::<EvalMetric>().is_err());
    }
}
