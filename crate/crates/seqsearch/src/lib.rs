//! Sequence-discovery workbench: a symbol-filling game over +-1 sequence
//! sets, searched by network-guided Monte-Carlo tree search with self-play
//! training, with metric backends for complementary CDMA code sets and
//! pulse-compression-radar mismatched filtering, plus random-search,
//! exhaustive-search, and deep-Q-learning baselines.

pub mod baselines;
pub mod cdma;
pub mod cli;
pub mod game;
pub mod linalg;
pub mod mcts;
pub mod net;
pub mod radar;
pub mod textio;
pub mod trainer;
