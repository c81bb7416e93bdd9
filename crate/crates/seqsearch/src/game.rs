//! The symbol-filling game: a sequence set is built left to right, `ell`
//! symbols per move, starting from an all-zero board and ending after
//! `ceil(N*K/ell)` steps with a fully assigned +-1 set.
//!
//! States, moves and boards are plain values; every operation here is a pure
//! function, so search and self-play can share them freely across threads.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GameError {
    #[error("invalid game config: {0}")]
    InvalidConfig(String),
    #[error("move applied to a terminal state (t = {t})")]
    MoveOnTerminal { t: usize },
    #[error("move code {code} out of range for ell = {ell}")]
    MoveOutOfRange { code: u32, ell: u32 },
    #[error("state is not terminal (t = {t} of {steps})")]
    NotTerminal { t: usize, steps: usize },
    #[error("feature image {kp}x{np} too small for {cells} cells")]
    FeatureSpecTooSmall { kp: usize, np: usize, cells: usize },
    #[error("state-space size overflows 128-bit arithmetic")]
    StateCountOverflow,
    #[error("isomorph enumeration requires K = 4 rows, got {k}")]
    IsomorphsNeedFourRows { k: usize },
}

/// Shape of one game: K sequences of length N, filled `ell` symbols per move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameConfig {
    pub k: usize,
    pub n: usize,
    pub ell: u32,
}

impl GameConfig {
    pub fn new(k: usize, n: usize, ell: u32) -> Result<Self, GameError> {
        if k == 0 || n == 0 {
            return Err(GameError::InvalidConfig(format!(
                "dimensions must be positive, got K={k}, N={n}"
            )));
        }
        if ell == 0 || ell as usize > k * n {
            return Err(GameError::InvalidConfig(format!(
                "ell must satisfy 1 <= ell <= N*K, got ell={ell} for N*K={}",
                k * n
            )));
        }
        // Move codes live in a u32; 2^ell branches beyond that are unusable anyway.
        if ell > 31 {
            return Err(GameError::InvalidConfig(format!(
                "ell = {ell} exceeds the supported move width of 31"
            )));
        }
        Ok(Self { k, n, ell })
    }

    /// Positions in the completed set.
    pub fn cells(&self) -> usize {
        self.k * self.n
    }

    /// Time steps per episode: ceil(N*K / ell).
    pub fn steps(&self) -> usize {
        self.cells().div_ceil(self.ell as usize)
    }

    /// Board length including the padding cells filled by the final move.
    pub fn padded_len(&self) -> usize {
        self.steps() * self.ell as usize
    }

    /// Number of legal moves at every state.
    pub fn moves(&self) -> usize {
        1usize << self.ell
    }
}

/// A move assigns `ell` symbols at once. Bit `ell-1-p` of `code` (so the most
/// significant of the `ell` bits first) maps to position offset `p`: bit 1
/// places +1, bit 0 places -1. Code `2^ell - 1` is the all-plus block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub code: u32,
}

impl Move {
    pub fn symbol_at(self, ell: u32, offset: u32) -> i8 {
        debug_assert!(offset < ell);
        if (self.code >> (ell - 1 - offset)) & 1 == 1 {
            1
        } else {
            -1
        }
    }
}

/// Partially filled board plus the step counter.
///
/// Exactly the first `t*ell` cells are nonzero; the fill order is row-major
/// over the K x N set, then the padding cells.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GameState {
    cells: Vec<i8>,
    t: usize,
}

impl GameState {
    pub fn cells(&self) -> &[i8] {
        &self.cells
    }

    pub fn step(&self) -> usize {
        self.t
    }

    pub fn is_terminal(&self, cfg: &GameConfig) -> bool {
        self.t == cfg.steps()
    }
}

/// Completed K x N set over {+1, -1}, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SequenceSet {
    k: usize,
    n: usize,
    entries: Vec<i8>,
}

impl SequenceSet {
    pub fn from_rows(rows: &[Vec<i8>]) -> Self {
        let k = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(k * n);
        for row in rows {
            assert_eq!(row.len(), n, "ragged rows");
            assert!(
                row.iter().all(|&e| e == 1 || e == -1),
                "entries must be +-1"
            );
            entries.extend_from_slice(row);
        }
        Self { k, n, entries }
    }

    pub fn from_flat(k: usize, n: usize, entries: Vec<i8>) -> Self {
        assert_eq!(entries.len(), k * n);
        assert!(entries.iter().all(|&e| e == 1 || e == -1));
        Self { k, n, entries }
    }

    pub fn rows(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn row(&self, i: usize) -> &[i8] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }
}

/// Feature image shape fed to the network; defaults to ell x steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub kp: usize,
    pub np: usize,
}

impl FeatureSpec {
    pub fn for_game(cfg: &GameConfig) -> Self {
        Self {
            kp: cfg.ell as usize,
            np: cfg.steps(),
        }
    }

    pub fn pixels(&self) -> usize {
        self.kp * self.np
    }
}

/// Three stacked binary planes over the feature image: plane 0 marks +1
/// cells, plane 1 marks -1 cells, plane 2 marks vacant cells.
#[derive(Debug, Clone)]
pub struct FeatureImage {
    pub spec: FeatureSpec,
    /// Length `3 * kp * np`, plane-major then row-major.
    pub planes: Vec<f64>,
}

/// All-zero board at t = 0.
pub fn initial_state(cfg: &GameConfig) -> GameState {
    GameState {
        cells: vec![0; cfg.padded_len()],
        t: 0,
    }
}

/// All `2^ell` move codes in ascending order.
pub fn legal_moves(cfg: &GameConfig) -> Vec<Move> {
    (0..cfg.moves() as u32).map(|code| Move { code }).collect()
}

/// Fill the next `ell` cells according to the move's bit pattern.
pub fn apply_move(cfg: &GameConfig, state: &GameState, mv: Move) -> Result<GameState, GameError> {
    if state.is_terminal(cfg) {
        return Err(GameError::MoveOnTerminal { t: state.t });
    }
    if mv.code as usize >= cfg.moves() {
        return Err(GameError::MoveOutOfRange {
            code: mv.code,
            ell: cfg.ell,
        });
    }
    let mut next = state.clone();
    let base = state.t * cfg.ell as usize;
    for offset in 0..cfg.ell {
        next.cells[base + offset as usize] = mv.symbol_at(cfg.ell, offset);
    }
    next.t += 1;
    Ok(next)
}

/// Truncate the padding cells of a terminal board and reshape row-major.
pub fn to_sequence_set(cfg: &GameConfig, state: &GameState) -> Result<SequenceSet, GameError> {
    if !state.is_terminal(cfg) {
        return Err(GameError::NotTerminal {
            t: state.t,
            steps: cfg.steps(),
        });
    }
    let entries = state.cells[..cfg.cells()].to_vec();
    debug_assert!(entries.iter().all(|&e| e != 0));
    Ok(SequenceSet::from_flat(cfg.k, cfg.n, entries))
}

/// Encode a state as the three indicator planes; board cells are laid out
/// row-major into the `kp x np` image and any surplus pixels count as vacant.
pub fn encode_features(
    cfg: &GameConfig,
    state: &GameState,
    spec: &FeatureSpec,
) -> Result<FeatureImage, GameError> {
    let cells = cfg.padded_len();
    if spec.pixels() < cells {
        return Err(GameError::FeatureSpecTooSmall {
            kp: spec.kp,
            np: spec.np,
            cells,
        });
    }
    let pixels = spec.pixels();
    let mut planes = vec![0.0f64; 3 * pixels];
    for p in 0..pixels {
        let value = if p < cells { state.cells[p] } else { 0 };
        let plane = match value {
            1 => 0,
            -1 => 1,
            _ => 2,
        };
        planes[plane * pixels + p] = 1.0;
    }
    Ok(FeatureImage {
        spec: *spec,
        planes,
    })
}

/// Count of reachable states: sum over t of 2^(t*ell), padding included.
pub fn state_space_size(cfg: &GameConfig) -> Result<u128, GameError> {
    let mut total: u128 = 0;
    for t in 0..=cfg.steps() {
        let bits = (t as u32)
            .checked_mul(cfg.ell)
            .ok_or(GameError::StateCountOverflow)?;
        if bits >= 128 {
            return Err(GameError::StateCountOverflow);
        }
        total = total
            .checked_add(1u128 << bits)
            .ok_or(GameError::StateCountOverflow)?;
    }
    Ok(total)
}

/// Deterministic 64-bit key of (cells, t).
///
/// FNV-1a over a packed 2-bit-per-cell encoding; stable across processes.
/// Collisions merely undercount visited-state statistics.
pub fn canonical_key(state: &GameState) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut hash = OFFSET;
    let mut eat = |byte: u8| {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(PRIME);
    };
    let mut packed: u8 = 0;
    let mut filled = 0u8;
    for &cell in &state.cells {
        let bits: u8 = match cell {
            1 => 0b01,
            -1 => 0b10,
            _ => 0b00,
        };
        packed |= bits << (filled * 2);
        filled += 1;
        if filled == 4 {
            eat(packed);
            packed = 0;
            filled = 0;
        }
    }
    if filled > 0 {
        eat(packed);
    }
    for byte in (state.t as u64).to_le_bytes() {
        eat(byte);
    }
    hash
}

/// The 32 isomorphic images of a 4-row set laid out as (a1, a2, b1, b2):
/// 4 row switchings composed with the 8 even-parity sign patterns.
///
/// The output always has 32 entries (the input among them); degenerate
/// inputs may repeat.
pub fn enumerate_isomorphs(set: &SequenceSet) -> Result<Vec<SequenceSet>, GameError> {
    if set.rows() != 4 {
        return Err(GameError::IsomorphsNeedFourRows { k: set.rows() });
    }
    // Row orders: identity, swap users, swap within both flocks, both.
    const ORDERS: [[usize; 4]; 4] = [[0, 1, 2, 3], [2, 3, 0, 1], [1, 0, 3, 2], [3, 2, 1, 0]];
    let mut out = Vec::with_capacity(32);
    for order in ORDERS {
        for mask in 0..16u8 {
            if (mask.count_ones() & 1) != 0 {
                continue; // odd sign patterns leave the isomorphism class
            }
            let rows: Vec<Vec<i8>> = (0..4)
                .map(|r| {
                    let sign: i8 = if (mask >> r) & 1 == 1 { -1 } else { 1 };
                    set.row(order[r]).iter().map(|&e| e * sign).collect()
                })
                .collect();
            out.push(SequenceSet::from_rows(&rows));
        }
    }
    Ok(out)
}
