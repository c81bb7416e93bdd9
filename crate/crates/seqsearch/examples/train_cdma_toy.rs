//! Short self-play training run on the small complementary-code game,
//! printing the evaluation curve. The bundled "ccc-toy" preset runs the same
//! setup to completion through the command line.
//!
//! Run with: cargo run --release --example train_cdma_toy

use seqsearch::cdma::{CdmaConfig, CdmaRewardSpec};
use seqsearch::game::{FeatureSpec, GameConfig};
use seqsearch::mcts::SearchConfig;
use seqsearch::net::{init_random, NetworkConfig};
use seqsearch::trainer::{BatchMode, Problem, TrainLoop, TrainLoopConfig};

fn main() {
    let cdma = CdmaConfig::new(2, 2, 4);
    let game = GameConfig::new(cdma.game_rows(), cdma.length, 2).unwrap();
    let features = FeatureSpec::for_game(&game);
    let net_cfg = NetworkConfig {
        kp: features.kp,
        np: features.np,
        conv_layers: 2,
        filters: 16,
        actions: game.moves(),
        l2: 1e-4,
        learning_rate: 5e-3,
        bn_decay: 0.99,
    };
    let snapshot = init_random(&net_cfg, 1).unwrap();
    let search = SearchConfig::new(100, 2.5, 0.15, game.steps());
    let cfg = TrainLoopConfig {
        episodes_per_cycle: 50,
        window_cycles: 3,
        eval_games: 50,
        batch_size: 64,
        batch_mode: BatchMode::WithoutReplacement,
        total_episodes: 400,
        probe_dnn: true,
        tracker_cap: 2_000_000,
    };
    let problem = Problem::Cdma {
        cfg: cdma,
        spec: CdmaRewardSpec::provisional(&cdma),
    };
    let mut training = TrainLoop::new(game, features, search, cfg, problem, snapshot, 7).unwrap();

    let mu = training.calibrate_cdma().unwrap();
    println!("calibrated reward scale Mu = {mu:.2}");
    println!(
        "{:>8} {:>12} {:>8} {:>10} {:>10}",
        "episode", "mean[M]", "min[M]", "dnn E[M']", "visited"
    );
    while !training.finished() {
        let r = training.run_iteration().unwrap();
        println!(
            "{:>8} {:>12.3} {:>8} {:>10.3} {:>10}",
            r.episode,
            r.mean_metric,
            r.extreme_metric,
            r.probe_mean_metric.unwrap_or(f64::NAN),
            r.visited_states
        );
    }
    if let Some((metric, set)) = &training.best {
        println!("\nbest set found (metric {metric}):");
        print!("{}", seqsearch::textio::format_sequence_set(set));
    }
}
