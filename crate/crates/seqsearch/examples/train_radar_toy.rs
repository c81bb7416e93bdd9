//! Short radar training run at N=13 with a segmented reward schedule; the
//! global optimum (metric 37, the length-13 Barker code) is known from
//! exhaustive search, so progress is easy to judge.
//!
//! Run with: cargo run --release --example train_radar_toy

use seqsearch::game::{FeatureSpec, GameConfig};
use seqsearch::mcts::SearchConfig;
use seqsearch::net::{init_random, NetworkConfig};
use seqsearch::trainer::{BatchMode, Problem, RewardSchedule, Segment, TrainLoop, TrainLoopConfig};

fn main() {
    let game = GameConfig::new(1, 13, 1).unwrap();
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
    let snapshot = init_random(&net_cfg, 3).unwrap();
    let search = SearchConfig::new(200, 1.0, 0.3, game.steps());
    let schedule = RewardSchedule::new(vec![
        Segment {
            ml: 0.0,
            mu: 18.5,
            advance_at_episode: None,
        },
        Segment {
            ml: 12.33,
            mu: 24.67,
            advance_at_episode: None,
        },
        Segment {
            ml: 18.5,
            mu: 37.0,
            advance_at_episode: None,
        },
    ])
    .unwrap();
    let cfg = TrainLoopConfig {
        episodes_per_cycle: 50,
        window_cycles: 3,
        eval_games: 50,
        batch_size: 64,
        batch_mode: BatchMode::WithoutReplacement,
        total_episodes: 600,
        probe_dnn: false,
        tracker_cap: 2_000_000,
    };
    let mut training = TrainLoop::new(
        game,
        features,
        search,
        cfg,
        Problem::Radar { schedule },
        snapshot,
        13,
    )
    .unwrap();

    println!(
        "{:>8} {:>12} {:>8} {:>8} {:>10}",
        "episode", "mean[M]", "max[M]", "segment", "visited"
    );
    while !training.finished() {
        let r = training.run_iteration().unwrap();
        println!(
            "{:>8} {:>12.3} {:>8.3} {:>8} {:>10}",
            r.episode, r.mean_metric, r.extreme_metric, r.segment_index, r.visited_states
        );
    }
    if let Some((metric, set)) = &training.best {
        println!("\nbest code found (metric {metric:.4}):");
        print!("{}", seqsearch::textio::format_sequence_set(set));
    }
}
