//! One traced tree search on a small game, with a flat evaluator so the
//! simulation arithmetic is easy to follow by hand.
//!
//! Run with: cargo run --release --example mcts_trace

use seqsearch::cdma::{metric_ccc, reward_ccc, CdmaConfig, CdmaRewardSpec};
use seqsearch::game::{initial_state, GameConfig};
use seqsearch::mcts::{search, SearchConfig, UniformEvaluator};

fn main() {
    let game = GameConfig::new(2, 3, 2).unwrap();
    let cdma = CdmaConfig::new(1, 2, 3);
    let spec = CdmaRewardSpec::provisional(&cdma);
    let reward = move |set: &seqsearch::game::SequenceSet| {
        reward_ccc(metric_ccc(set, &cdma).unwrap(), &spec)
    };

    let mut cfg = SearchConfig::new(40, 3.0, 0.1, game.steps()).noiseless();
    cfg.trace = true;

    let out = search(
        &game,
        &initial_state(&game),
        &UniformEvaluator {
            actions: game.moves(),
        },
        &reward,
        &cfg,
        42,
    )
    .unwrap();

    println!("root visit counts: {:?}", out.root_visits);
    println!("policy: {:?}", out.policy);
    println!("tree size: {} vertices", out.tree.len());
    println!();
    for line in out.trace.unwrap() {
        println!("{line}");
    }
}
