//! Exhaustive-search oracle at N=13 next to the budgeted random-search
//! mean-max curve.
//!
//! Run with: cargo run --release --example random_vs_exhaustive

use seqsearch::baselines::{exhaustive_search_radar, random_search, sample_phase_code};
use seqsearch::radar::metric_mmf;
use seqsearch::textio::format_phase_code;
use seqsearch::trainer::Direction;

fn main() {
    let exact = exhaustive_search_radar(13, Direction::Maximize, true, 28).unwrap();
    println!(
        "exhaustive N=13: best metric {:.6} with {} optima over {} evaluations",
        exact.best_metric,
        exact.census.unwrap(),
        exact.evaluations
    );
    print!("optimal code: {}", format_phase_code(&exact.best));
    println!();

    let curve = random_search(
        |rng| sample_phase_code(13, rng),
        |c| metric_mmf(c).unwrap(),
        Direction::Maximize,
        5000,
        20,
        11,
    );
    println!("random search, 20 runs:");
    println!("{:>8} {:>14}", "trials", "mean best");
    for (trials, mean) in &curve.mean_max {
        println!("{trials:>8} {mean:>14.4}");
    }
}
