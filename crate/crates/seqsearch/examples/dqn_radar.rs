//! The epsilon-greedy deep-Q baseline on the N=13 radar game: terminal
//! reward regression with FIFO replay and periodic greedy probes.
//!
//! Run with: cargo run --release --example dqn_radar

use seqsearch::baselines::{dqn_discover, dqn_train, DqnConfig};
use seqsearch::game::{FeatureSpec, GameConfig};
use seqsearch::net::NetworkConfig;
use seqsearch::radar::RadarRewardSpec;
use seqsearch::textio::format_sequence_set;
use seqsearch::trainer::Objective;

fn main() {
    let game = GameConfig::new(1, 13, 1).unwrap();
    let features = FeatureSpec::for_game(&game);
    let net_cfg = NetworkConfig {
        kp: features.kp,
        np: features.np,
        conv_layers: 2,
        filters: 16,
        actions: game.moves(),
        l2: 0.0,
        learning_rate: 1e-3,
        bn_decay: 0.99,
    };
    let objective = Objective::Radar {
        spec: RadarRewardSpec::new(0.0, 37.0).unwrap(),
    };
    let cfg = DqnConfig {
        fifo_capacity: 4000,
        epsilon: 0.25,
        epsilon_decay: Some((0.05, 1200)),
        batch_size: 64,
        eval_cycle: 50,
        episodes: 1500,
        tracker_cap: 2_000_000,
    };
    let out = dqn_train(&game, &features, &objective, &net_cfg, &cfg, 17).unwrap();

    println!("{:>8} {:>10} {:>10}", "episode", "visited", "metric");
    for p in &out.log {
        println!(
            "{:>8} {:>10} {:>10.4}",
            p.episode, p.visited_states, p.metric
        );
    }
    println!();
    println!(
        "best metric {:.4} after {} distinct visited states",
        out.best_metric, out.visited_states
    );
    println!("(the global optimum at N=13 is 37; greedy Q-play tends to park in a local basin)");
    let greedy = dqn_discover(&game, &features, &out.net);
    print!("greedy code: {}", format_sequence_set(&greedy));
}
