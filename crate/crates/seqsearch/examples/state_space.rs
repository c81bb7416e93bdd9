//! State-space sizes of the filling game and the three-plane feature
//! encoding of a partially filled board.
//!
//! Run with: cargo run --release --example state_space

use seqsearch::game::{
    apply_move, encode_features, initial_state, state_space_size, FeatureSpec, GameConfig, Move,
};

fn main() {
    println!(
        "{:>4} {:>4} {:>4} {:>6} {:>26}",
        "K", "N", "ell", "steps", "states"
    );
    for (k, n, ell) in [(2usize, 3usize, 2u32), (4, 8, 4), (1, 59, 5), (1, 13, 1)] {
        let cfg = GameConfig::new(k, n, ell).unwrap();
        println!(
            "{:>4} {:>4} {:>4} {:>6} {:>26}",
            k,
            n,
            ell,
            cfg.steps(),
            state_space_size(&cfg).unwrap()
        );
    }
    println!();

    // A half-filled 1x59 board viewed as the 5x12 network image.
    let cfg = GameConfig::new(1, 59, 5).unwrap();
    let spec = FeatureSpec::for_game(&cfg);
    let mut state = initial_state(&cfg);
    for code in [0b10110, 0b01011, 0b11100, 0b00101, 0b11011, 0b10001] {
        state = apply_move(&cfg, &state, Move { code }).unwrap();
    }
    let image = encode_features(&cfg, &state, &spec).unwrap();
    let px = spec.pixels();
    for (plane, label) in [(0usize, "+1 plane"), (1, "-1 plane"), (2, " 0 plane")] {
        println!("{label}:");
        for row in 0..spec.kp {
            let line: String = (0..spec.np)
                .map(|col| {
                    if image.planes[plane * px + row * spec.np + col] == 1.0 {
                        '#'
                    } else {
                        '.'
                    }
                })
                .collect();
            println!("  {line}");
        }
    }
}
