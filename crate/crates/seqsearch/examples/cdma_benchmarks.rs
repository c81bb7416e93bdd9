//! Evaluate the known ideal complementary code sets and their isomorphs.
//!
//! Run with: cargo run --release --example cdma_benchmarks

use seqsearch::cdma::{known_sets, metric_ccc, sup_metric_ccc, CdmaConfig};
use seqsearch::game::enumerate_isomorphs;
use seqsearch::textio::format_sequence_set;
use std::collections::HashSet;

fn main() {
    let cfg = CdmaConfig::new(2, 2, 8);
    println!("J=2 users, M=2 codes per flock, N=8 chips");
    println!("supremum of the metric: {}", sup_metric_ccc(&cfg));
    println!();

    for (name, set) in [
        ("benchmark", known_sets::bench_2x2x8()),
        ("rediscovered A", known_sets::rediscovered_a()),
        ("rediscovered B", known_sets::rediscovered_b()),
    ] {
        println!("{name}: metric = {}", metric_ccc(&set, &cfg).unwrap());
        print!("{}", format_sequence_set(&set));
        println!();
    }

    let family = enumerate_isomorphs(&known_sets::bench_2x2x8()).unwrap();
    let distinct: HashSet<_> = family.iter().map(|s| s.entries().to_vec()).collect();
    println!(
        "isomorph family of the benchmark: {} distinct sets",
        distinct.len()
    );
    let all_ideal = family.iter().all(|s| metric_ccc(s, &cfg).unwrap() == 0.0);
    println!("all isomorphs ideal: {all_ideal}");
    let contains_a = family.contains(&known_sets::rediscovered_a());
    println!("rediscovered A is an isomorph of the benchmark: {contains_a}");
}
