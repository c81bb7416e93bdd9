//! Matched- and mismatched-filter figures for the named radar codes.
//!
//! Run with: cargo run --release --example radar_benchmarks

use seqsearch::radar::{
    benchmarks, bounds_mmf, merit_factor_mf, metric_mmf, mmf_weights, sir_of_filter,
};

fn main() {
    println!(
        "{:<14} {:>6} {:>12} {:>12}",
        "code", "N", "gamma_mmf", "gamma_mf"
    );
    for (name, code) in benchmarks::all() {
        println!(
            "{:<14} {:>6} {:>12.4} {:>12.4}",
            name,
            code.len(),
            metric_mmf(&code).unwrap(),
            merit_factor_mf(&code)
        );
    }
    println!();

    let legendre = benchmarks::legendre_59();
    let (lower, upper, conjectured) = bounds_mmf(legendre.len());
    println!("bounds at N=59: [{lower:.3e}, {upper:.3e}], conjectured max {conjectured}");

    // The optimal filter really attains the metric.
    let weights = mmf_weights(&legendre).unwrap();
    let attained = sir_of_filter(&weights, &legendre);
    println!("SIR of the solved filter on legendre-59: {attained:.6}");

    let ratio = metric_mmf(&benchmarks::discovered_59()).unwrap() / metric_mmf(&legendre).unwrap();
    println!("discovered-59 / legendre-59 SIR ratio: {ratio:.3}");
}
