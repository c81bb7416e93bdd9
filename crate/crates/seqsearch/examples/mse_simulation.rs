//! Monte-Carlo estimation error of the mismatched filter under Gaussian
//! clutter, against the analytic identity MSE = sigma^2 / gamma_mmf.
//!
//! Run with: cargo run --release --example mse_simulation

use seqsearch::radar::{benchmarks, metric_mmf, simulate_mse, ClutterModel};

fn main() {
    let trials = 100_000;
    println!(
        "{:<14} {:>8} {:>12} {:>12} {:>10}",
        "code", "sigma2", "mse", "analytic", "z-score"
    );
    for (name, code) in [
        ("legendre-59", benchmarks::legendre_59()),
        ("discovered-59", benchmarks::discovered_59()),
        ("barker-13", benchmarks::barker_13()),
    ] {
        for sigma2 in [0.5, 1.0, 2.0] {
            let model = ClutterModel { sigma2, trials };
            let est = simulate_mse(&code, &model, 101).unwrap();
            let analytic = sigma2 / metric_mmf(&code).unwrap();
            let z = (est.mse - analytic) / est.std_err;
            println!(
                "{:<14} {:>8} {:>12.6} {:>12.6} {:>10.2}",
                name, sigma2, est.mse, analytic, z
            );
        }
    }

    let legendre = simulate_mse(
        &benchmarks::legendre_59(),
        &ClutterModel {
            sigma2: 1.0,
            trials,
        },
        7,
    )
    .unwrap();
    let discovered = simulate_mse(
        &benchmarks::discovered_59(),
        &ClutterModel {
            sigma2: 1.0,
            trials,
        },
        8,
    )
    .unwrap();
    let gain_db = 10.0 * (legendre.mse / discovered.mse).log10();
    println!("\nmeasured gain of discovered-59 over legendre-59: {gain_db:.2} dB");
}
