//! Complementary-code metric for multi-carrier CDMA: cyclic auto/cross
//! correlations and the flipped correlation, summed per user flock, plus the
//! reward map used by the self-play loop.
//!
//! All correlation sums are exact integer arithmetic; metrics are widened to
//! `f64` only at the interface.

use crate::game::SequenceSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CdmaError {
    #[error("shift {v} out of range {lo}..={hi}")]
    ShiftOutOfRange { v: usize, lo: usize, hi: usize },
    #[error("flock shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("sequence set is {rows}x{len}, config wants {want_rows}x{want_len}")]
    SetShapeMismatch {
        rows: usize,
        len: usize,
        want_rows: usize,
        want_len: usize,
    },
    #[error("reward scale must be calibrated exactly once")]
    AlreadyCalibrated,
}

/// J users, a flock of M element codes each, every code of length N.
/// User j owns rows `j*M .. (j+1)*M` of the sequence set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CdmaConfig {
    pub users: usize,
    pub flock: usize,
    pub length: usize,
}

impl CdmaConfig {
    pub fn new(users: usize, flock: usize, length: usize) -> Self {
        assert!(users >= 1 && flock >= 1 && length >= 1);
        Self {
            users,
            flock,
            length,
        }
    }

    /// Rows of the game board: K = J * M.
    pub fn game_rows(&self) -> usize {
        self.users * self.flock
    }
}

/// A user's flock as row slices into the set.
fn flock_rows<'a>(set: &'a SequenceSet, cfg: &CdmaConfig, user: usize) -> Vec<&'a [i8]> {
    (0..cfg.flock)
        .map(|m| set.row(user * cfg.flock + m))
        .collect()
}

fn check_flock(rows: &[&[i8]]) -> Result<(usize, usize), CdmaError> {
    let m = rows.len();
    if m == 0 {
        return Err(CdmaError::ShapeMismatch("empty flock".into()));
    }
    let n = rows[0].len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CdmaError::ShapeMismatch("ragged or empty rows".into()));
    }
    Ok((m, n))
}

/// Cyclic auto-correlation of a flock at shift `v` (1 <= v <= N-1):
/// sum over codes m and positions n of c_m[n] * c_m[n+v mod N].
pub fn caf(flock: &[&[i8]], v: usize) -> Result<i64, CdmaError> {
    let (_, n) = check_flock(flock)?;
    if v == 0 || v >= n {
        return Err(CdmaError::ShiftOutOfRange {
            v,
            lo: 1,
            hi: n - 1,
        });
    }
    Ok(cyclic_sum(flock, flock, v))
}

/// Cyclic cross-correlation of two flocks at shift `v` (0 <= v <= N-1).
pub fn ccf(a: &[&[i8]], b: &[&[i8]], v: usize) -> Result<i64, CdmaError> {
    let (ma, na) = check_flock(a)?;
    let (mb, nb) = check_flock(b)?;
    if (ma, na) != (mb, nb) {
        return Err(CdmaError::ShapeMismatch(format!(
            "flocks are {ma}x{na} and {mb}x{nb}"
        )));
    }
    if v >= na {
        return Err(CdmaError::ShiftOutOfRange {
            v,
            lo: 0,
            hi: na - 1,
        });
    }
    Ok(cyclic_sum(a, b, v))
}

/// Flipped correlation at shift `v` (1 <= v <= N-1): the cyclic sum with the
/// sign of the wrapped tail terms (n >= N-v) negated.
pub fn fcf(a: &[&[i8]], b: &[&[i8]], v: usize) -> Result<i64, CdmaError> {
    let (ma, na) = check_flock(a)?;
    let (mb, nb) = check_flock(b)?;
    if (ma, na) != (mb, nb) {
        return Err(CdmaError::ShapeMismatch(format!(
            "flocks are {ma}x{na} and {mb}x{nb}"
        )));
    }
    if v == 0 || v >= na {
        return Err(CdmaError::ShiftOutOfRange {
            v,
            lo: 1,
            hi: na - 1,
        });
    }
    let n = na;
    let mut total = 0i64;
    for (ra, rb) in a.iter().zip(b) {
        for i in 0..n {
            let term = (ra[i] * rb[(i + v) % n]) as i64;
            if i < n - v {
                total += term;
            } else {
                total -= term;
            }
        }
    }
    Ok(total)
}

fn cyclic_sum(a: &[&[i8]], b: &[&[i8]], v: usize) -> i64 {
    let n = a[0].len();
    let mut total = 0i64;
    for (ra, rb) in a.iter().zip(b) {
        for i in 0..n {
            total += (ra[i] * rb[(i + v) % n]) as i64;
        }
    }
    total
}

/// Aggregate interference metric: sum of |CAF| over users and nonzero
/// shifts, |CCF| over user pairs and all shifts, |FCF| over ordered user
/// pairs (including j1 = j2) and nonzero shifts. Zero iff the set is an
/// ideal complementary code.
pub fn metric_ccc(set: &SequenceSet, cfg: &CdmaConfig) -> Result<f64, CdmaError> {
    Ok(metric_ccc_int(set, cfg)? as f64)
}

/// Integer-exact form of [`metric_ccc`].
pub fn metric_ccc_int(set: &SequenceSet, cfg: &CdmaConfig) -> Result<i64, CdmaError> {
    if set.rows() != cfg.game_rows() || set.len() != cfg.length {
        return Err(CdmaError::SetShapeMismatch {
            rows: set.rows(),
            len: set.len(),
            want_rows: cfg.game_rows(),
            want_len: cfg.length,
        });
    }
    let n = cfg.length;
    let flocks: Vec<Vec<&[i8]>> = (0..cfg.users).map(|j| flock_rows(set, cfg, j)).collect();
    let mut total = 0i64;
    for j in 0..cfg.users {
        for v in 1..n {
            total += caf(&flocks[j], v)?.abs();
        }
    }
    for j1 in 0..cfg.users {
        for j2 in (j1 + 1)..cfg.users {
            for v in 0..n {
                total += ccf(&flocks[j1], &flocks[j2], v)?.abs();
            }
        }
    }
    for j1 in 0..cfg.users {
        for j2 in j1..cfg.users {
            for v in 1..n {
                total += fcf(&flocks[j1], &flocks[j2], v)?.abs();
            }
        }
    }
    Ok(total)
}

/// Supremum of the metric over all +-1 sets; attained by the all-ones set.
pub fn sup_metric_ccc(cfg: &CdmaConfig) -> f64 {
    let j = cfg.users as i64;
    let n = cfg.length as i64;
    let m = cfg.flock as i64;
    let numer = if n % 2 == 1 {
        (3 * n * n + 1) * (j * j + j) - 2 * n * j * (j + 3)
    } else {
        3 * n * n * (j * j + j) - 2 * n * j * (j + 3)
    };
    (numer * m) as f64 / 4.0
}

/// Reward scale for the CDMA game. Starts provisional at the supremum and is
/// frozen once calibrated to the mean metric of 50 untrained noiseless games.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CdmaRewardSpec {
    mu: f64,
    calibrated: bool,
}

impl CdmaRewardSpec {
    /// Provisional spec with the worst-case scale from [`sup_metric_ccc`].
    pub fn provisional(cfg: &CdmaConfig) -> Self {
        Self {
            mu: sup_metric_ccc(cfg),
            calibrated: false,
        }
    }

    /// Fixed scale, already considered calibrated (tests, replays).
    pub fn fixed(mu: f64) -> Self {
        assert!(mu > 0.0);
        Self {
            mu,
            calibrated: true,
        }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn is_calibrated(&self) -> bool {
        self.calibrated
    }

    /// Freeze the scale to the mean of the observed metrics. One-shot.
    pub fn calibrate(&mut self, observed_metrics: &[f64]) -> Result<(), CdmaError> {
        if self.calibrated {
            return Err(CdmaError::AlreadyCalibrated);
        }
        assert!(!observed_metrics.is_empty());
        self.mu = observed_metrics.iter().sum::<f64>() / observed_metrics.len() as f64;
        self.calibrated = true;
        Ok(())
    }
}

/// Map a metric to a reward in [-1, 1]: 1 - 2 m / Mu, floored at -1 for
/// metrics beyond the scale.
pub fn reward_ccc(metric: f64, spec: &CdmaRewardSpec) -> f64 {
    debug_assert!(metric >= 0.0);
    if metric <= spec.mu {
        1.0 - 2.0 * metric / spec.mu
    } else {
        -1.0
    }
}

/// The known ideal complementary code set for J=2, M=2, N=8 used as the
/// correctness benchmark, plus the two sets the search rediscovered.
pub mod known_sets {
    use crate::game::SequenceSet;

    pub fn bench_2x2x8() -> SequenceSet {
        SequenceSet::from_rows(&[
            vec![1, 1, 1, -1, 1, 1, -1, 1],
            vec![1, -1, 1, 1, 1, -1, -1, -1],
            vec![1, 1, 1, -1, -1, -1, 1, -1],
            vec![1, -1, 1, 1, -1, 1, 1, 1],
        ])
    }

    pub fn rediscovered_a() -> SequenceSet {
        SequenceSet::from_rows(&[
            vec![-1, 1, -1, -1, 1, -1, -1, -1],
            vec![-1, -1, -1, 1, 1, 1, -1, 1],
            vec![1, -1, 1, 1, 1, -1, -1, -1],
            vec![1, 1, 1, -1, 1, 1, -1, 1],
        ])
    }

    pub fn rediscovered_b() -> SequenceSet {
        SequenceSet::from_rows(&[
            vec![1, -1, -1, -1, -1, -1, 1, -1],
            vec![-1, 1, 1, 1, -1, -1, 1, -1],
            vec![-1, 1, -1, -1, 1, 1, 1, -1],
            vec![1, -1, 1, 1, 1, 1, 1, -1],
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::enumerate_isomorphs;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn all_ones(rows: usize, n: usize) -> SequenceSet {
        SequenceSet::from_rows(&vec![vec![1i8; n]; rows])
    }

    fn random_set(rows: usize, n: usize, rng: &mut impl Rng) -> SequenceSet {
        SequenceSet::from_rows(
            &(0..rows)
                .map(|_| {
                    (0..n)
                        .map(|_| if rng.gen::<bool>() { 1i8 } else { -1 })
                        .collect()
                })
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn caf_cases() {
        let ones = all_ones(2, 8);
        let rows: Vec<&[i8]> = vec![ones.row(0), ones.row(1)];
        for v in 1..8 {
            assert_eq!(caf(&rows, v).unwrap(), 16);
        }
        // Golay pair (+1,+1),(+1,-1): shifts cancel.
        let a: &[i8] = &[1, 1];
        let b: &[i8] = &[1, -1];
        assert_eq!(caf(&[a, b], 1).unwrap(), 0);
        assert!(caf(&[a, b], 0).is_err());
        assert!(caf(&[a, b], 2).is_err());
    }

    #[test]
    fn bench_flock_has_ideal_caf() {
        let set = known_sets::bench_2x2x8();
        let cfg = CdmaConfig::new(2, 2, 8);
        let flock: Vec<&[i8]> = vec![set.row(0), set.row(1)];
        for v in 1..8 {
            assert_eq!(caf(&flock, v).unwrap(), 0, "v={v}");
        }
        // CCF between the two users vanishes at every shift, FCF everywhere.
        let a: Vec<&[i8]> = vec![set.row(0), set.row(1)];
        let b: Vec<&[i8]> = vec![set.row(2), set.row(3)];
        for v in 0..8 {
            assert_eq!(ccf(&a, &b, v).unwrap(), 0, "ccf v={v}");
        }
        for v in 1..8 {
            assert_eq!(fcf(&a, &a, v).unwrap(), 0);
            assert_eq!(fcf(&a, &b, v).unwrap(), 0);
            assert_eq!(fcf(&b, &b, v).unwrap(), 0);
        }
        assert_eq!(metric_ccc_int(&set, &cfg).unwrap(), 0);
    }

    #[test]
    fn ccf_cases() {
        let ones = all_ones(2, 8);
        let rows: Vec<&[i8]> = vec![ones.row(0), ones.row(1)];
        assert_eq!(ccf(&rows, &rows, 0).unwrap(), 16); // energy N*M
        for v in 0..8 {
            assert_eq!(ccf(&rows, &rows, v).unwrap(), 16);
        }
        let short: &[i8] = &[1, 1];
        assert!(ccf(&rows, &[short, short], 0).is_err());
    }

    #[test]
    fn fcf_cases() {
        // All-ones flocks: N-v positive terms, v negated ones, per code.
        for (m, n) in [(1usize, 4usize), (2, 8), (3, 5)] {
            let a = all_ones(m, n);
            let rows: Vec<&[i8]> = (0..m).map(|i| a.row(i)).collect();
            for v in 1..n {
                let expect = (m as i64) * (n as i64 - 2 * v as i64);
                assert_eq!(fcf(&rows, &rows, v).unwrap(), expect);
            }
        }
        // Hand evaluation, M=1, N=2: (+1,+1) against (+1,-1) at v=1.
        let a: &[i8] = &[1, 1];
        let b: &[i8] = &[1, -1];
        assert_eq!(fcf(&[a], &[b], 1).unwrap(), -2);
    }

    #[test]
    fn caf_equals_self_ccf() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let set = random_set(2, 6, &mut rng);
            let rows: Vec<&[i8]> = vec![set.row(0), set.row(1)];
            for v in 1..6 {
                assert_eq!(caf(&rows, v).unwrap(), ccf(&rows, &rows, v).unwrap());
            }
        }
    }

    #[test]
    fn correlation_bounds_exhaustive() {
        // |CAF|, |CCF|, |FCF| <= N*M over every pair of 1xN codes, N <= 6.
        for n in 2..=6usize {
            let bound = n as i64;
            for a_bits in 0..(1u32 << n) {
                let a_row: Vec<i8> = (0..n)
                    .map(|i| if (a_bits >> i) & 1 == 1 { 1 } else { -1 })
                    .collect();
                for b_bits in 0..(1u32 << n) {
                    let b_row: Vec<i8> = (0..n)
                        .map(|i| if (b_bits >> i) & 1 == 1 { 1 } else { -1 })
                        .collect();
                    let a: Vec<&[i8]> = vec![&a_row];
                    let b: Vec<&[i8]> = vec![&b_row];
                    for v in 1..n {
                        assert!(caf(&a, v).unwrap().abs() <= bound);
                        assert!(fcf(&a, &b, v).unwrap().abs() <= bound);
                    }
                    for v in 0..n {
                        assert!(ccf(&a, &b, v).unwrap().abs() <= bound);
                    }
                }
            }
        }
    }

    #[test]
    fn benchmark_sets_are_ideal() {
        let cfg = CdmaConfig::new(2, 2, 8);
        for set in [
            known_sets::bench_2x2x8(),
            known_sets::rediscovered_a(),
            known_sets::rediscovered_b(),
        ] {
            assert_eq!(metric_ccc_int(&set, &cfg).unwrap(), 0);
        }
        // The first rediscovered set is an isomorph of the benchmark.
        let family = enumerate_isomorphs(&known_sets::bench_2x2x8()).unwrap();
        assert!(family.contains(&known_sets::rediscovered_a()));
    }

    #[test]
    fn supremum_matches_all_ones() {
        let cfg = CdmaConfig::new(2, 2, 8);
        let sup = sup_metric_ccc(&cfg);
        assert_eq!(sup, 496.0);
        assert_eq!(metric_ccc(&all_ones(4, 8), &cfg).unwrap(), sup);

        let tiny = CdmaConfig::new(1, 1, 3);
        assert_eq!(sup_metric_ccc(&tiny), 8.0);
        assert_eq!(metric_ccc(&all_ones(1, 3), &tiny).unwrap(), 8.0);
    }

    #[test]
    fn supremum_tight_over_small_grid() {
        for users in 1..=3usize {
            for flock in 1..=3usize {
                for n in 2..=9usize {
                    let cfg = CdmaConfig::new(users, flock, n);
                    let set = all_ones(cfg.game_rows(), n);
                    assert_eq!(
                        metric_ccc(&set, &cfg).unwrap(),
                        sup_metric_ccc(&cfg),
                        "J={users} M={flock} N={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn random_sets_respect_supremum() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let cfg = CdmaConfig::new(2, 2, 8);
        let sup = sup_metric_ccc(&cfg);
        for _ in 0..1000 {
            let set = random_set(4, 8, &mut rng);
            assert!(metric_ccc(&set, &cfg).unwrap() <= sup);
        }
    }

    #[test]
    fn metric_invariant_under_isomorphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let cfg = CdmaConfig::new(2, 2, 8);
        for _ in 0..25 {
            let set = random_set(4, 8, &mut rng);
            let m = metric_ccc_int(&set, &cfg).unwrap();
            for iso in enumerate_isomorphs(&set).unwrap() {
                assert_eq!(metric_ccc_int(&iso, &cfg).unwrap(), m);
            }
        }
    }

    #[test]
    fn zero_metric_iff_all_criteria_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let cfg = CdmaConfig::new(2, 1, 4);
        let mut seen_zero = false;
        for _ in 0..2000 {
            let set = random_set(2, 4, &mut rng);
            let m = metric_ccc_int(&set, &cfg).unwrap();
            let a: Vec<&[i8]> = vec![set.row(0)];
            let b: Vec<&[i8]> = vec![set.row(1)];
            let mut ideal = true;
            for v in 1..4 {
                ideal &= caf(&a, v).unwrap() == 0 && caf(&b, v).unwrap() == 0;
                ideal &= fcf(&a, &a, v).unwrap() == 0
                    && fcf(&a, &b, v).unwrap() == 0
                    && fcf(&b, &b, v).unwrap() == 0;
            }
            for v in 0..4 {
                ideal &= ccf(&a, &b, v).unwrap() == 0;
            }
            assert_eq!(m == 0, ideal);
            seen_zero |= m == 0;
            let _ = seen_zero;
        }
    }

    #[test]
    fn reward_endpoints() {
        let spec = CdmaRewardSpec::fixed(100.0);
        assert_eq!(reward_ccc(0.0, &spec), 1.0);
        assert_eq!(reward_ccc(100.0, &spec), -1.0);
        assert_eq!(reward_ccc(50.0, &spec), 0.0);
        assert_eq!(reward_ccc(250.0, &spec), -1.0);
    }

    #[test]
    fn calibration_is_one_shot() {
        let cfg = CdmaConfig::new(2, 2, 8);
        let mut spec = CdmaRewardSpec::provisional(&cfg);
        assert_eq!(spec.mu(), 496.0);
        assert!(!spec.is_calibrated());
        spec.calibrate(&[120.0, 160.0]).unwrap();
        assert_eq!(spec.mu(), 140.0);
        assert!(matches!(
            spec.calibrate(&[1.0]),
            Err(CdmaError::AlreadyCalibrated)
        ));
    }

    #[test]
    fn metric_rejects_shape_mismatch() {
        let cfg = CdmaConfig::new(2, 2, 8);
        let set = all_ones(4, 7);
        assert!(metric_ccc(&set, &cfg).is_err());
    }
}
