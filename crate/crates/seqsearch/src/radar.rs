//! Pulse-compression-radar metrics for binary phase codes: matched-filter
//! merit factor, mismatched-filter SIR s^T R^-1 s, metric bounds, the linear
//! reward map, and the clutter-estimation Monte-Carlo.

use crate::linalg::{dot, Cholesky, LinalgError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RadarError {
    #[error("phase code must have length >= 2, got {0}")]
    TooShort(usize),
    #[error("phase code entries must be +-1")]
    BadEntry,
    #[error("shift {n} out of range for length {len}")]
    ShiftOutOfRange { n: i64, len: usize },
    #[error("R factorization failed for code {code:?}: {source}")]
    Factorization {
        code: Vec<i8>,
        #[source]
        source: LinalgError,
    },
    #[error("reward bounds must satisfy lower < upper, got [{ml}, {mu}]")]
    BadRewardBounds { ml: f64, mu: f64 },
}

/// A binary phase code: N entries in {+1, -1}, N >= 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhaseCode {
    s: Vec<i8>,
}

impl PhaseCode {
    pub fn new(entries: Vec<i8>) -> Result<Self, RadarError> {
        if entries.len() < 2 {
            return Err(RadarError::TooShort(entries.len()));
        }
        if entries.iter().any(|&e| e != 1 && e != -1) {
            return Err(RadarError::BadEntry);
        }
        Ok(Self { s: entries })
    }

    /// Decode the bits of `word` (LSB = position 0) into a code: 1 -> +1.
    pub fn from_bits(word: u64, len: usize) -> Self {
        assert!((2..=63).contains(&len));
        let s = (0..len)
            .map(|i| if (word >> i) & 1 == 1 { 1 } else { -1 })
            .collect();
        Self { s }
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entries(&self) -> &[i8] {
        &self.s
    }

    pub fn negated(&self) -> Self {
        Self {
            s: self.s.iter().map(|&e| -e).collect(),
        }
    }

    pub fn reversed(&self) -> Self {
        let mut s = self.s.clone();
        s.reverse();
        Self { s }
    }
}

/// Apply the shift operator J_n: left shift by n > 0, right shift by n < 0,
/// zero padding either way.
pub fn shifted(code: &PhaseCode, n: i64) -> Result<Vec<f64>, RadarError> {
    let len = code.len() as i64;
    if n.abs() >= len {
        return Err(RadarError::ShiftOutOfRange { n, len: code.len() });
    }
    let mut out = vec![0.0f64; code.len()];
    for i in 0..len {
        let src = i + n;
        if (0..len).contains(&src) {
            out[i as usize] = code.s[src as usize] as f64;
        }
    }
    Ok(out)
}

/// Aperiodic autocorrelation s^T J_n s at lag |n|; a_0 = N.
fn autocorrelation(code: &PhaseCode, lag: usize) -> i64 {
    let n = code.len();
    debug_assert!(lag < n);
    let mut acc = 0i64;
    for i in 0..(n - lag) {
        acc += (code.s[i] * code.s[i + lag]) as i64;
    }
    acc
}

/// The clutter covariance surrogate R = sum over n != 0 of (J_n s)(J_n s)^T,
/// built term by term from the definition. Symmetric positive definite.
pub fn build_r(code: &PhaseCode) -> Vec<f64> {
    let n = code.len();
    let mut r = vec![0.0f64; n * n];
    for shift in 1..n as i64 {
        for signed in [shift, -shift] {
            let v = shifted(code, signed).expect("shift in range");
            for i in 0..n {
                if v[i] == 0.0 {
                    continue;
                }
                for j in 0..n {
                    r[i * n + j] += v[i] * v[j];
                }
            }
        }
    }
    r
}

/// O(N^2) form of [`build_r`]: R[i][j] = a_|i-j| - s[i] s[j], with a_0 = N.
/// Used on the metric hot path; equality with the definitional sum is
/// covered by tests.
fn build_r_fast(code: &PhaseCode) -> Vec<f64> {
    let n = code.len();
    let auto: Vec<f64> = (0..n)
        .map(|lag| autocorrelation(code, lag) as f64)
        .collect();
    let mut r = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            let d = i.abs_diff(j);
            r[i * n + j] = auto[d] - (code.s[i] * code.s[j]) as f64;
        }
    }
    r
}

/// Cached Cholesky factorization of R for one code, shared by the metric and
/// the filter weights.
pub struct MmfSolver {
    code: PhaseCode,
    factor: Cholesky,
}

impl MmfSolver {
    pub fn new(code: &PhaseCode) -> Result<Self, RadarError> {
        let r = build_r_fast(code);
        let factor =
            Cholesky::factor(&r, code.len()).map_err(|source| RadarError::Factorization {
                code: code.entries().to_vec(),
                source,
            })?;
        Ok(Self {
            code: code.clone(),
            factor,
        })
    }

    /// Mismatched-filter weights x* = R^-1 s.
    pub fn weights(&self) -> Vec<f64> {
        let s: Vec<f64> = self.code.s.iter().map(|&e| e as f64).collect();
        self.factor.solve(&s).expect("dimensions agree")
    }

    /// SIR metric s^T R^-1 s.
    pub fn metric(&self) -> f64 {
        let s: Vec<f64> = self.code.s.iter().map(|&e| e as f64).collect();
        dot(&s, &self.factor.solve(&s).expect("dimensions agree"))
    }
}

/// Mismatched-filter SIR metric s^T R^-1 s via the SPD solve.
pub fn metric_mmf(code: &PhaseCode) -> Result<f64, RadarError> {
    Ok(MmfSolver::new(code)?.metric())
}

/// Optimal mismatched-filter weights R^-1 s.
pub fn mmf_weights(code: &PhaseCode) -> Result<Vec<f64>, RadarError> {
    Ok(MmfSolver::new(code)?.weights())
}

/// SIR of an arbitrary filter x against code s:
/// (x^T s)^2 / sum over n != 0 of (x^T J_n s)^2.
pub fn sir_of_filter(filter: &[f64], code: &PhaseCode) -> f64 {
    assert_eq!(filter.len(), code.len());
    let signal = {
        let s: Vec<f64> = code.s.iter().map(|&e| e as f64).collect();
        dot(filter, &s)
    };
    let mut interference = 0.0;
    for shift in 1..code.len() as i64 {
        for signed in [shift, -shift] {
            let v = shifted(code, signed).expect("shift in range");
            let leak = dot(filter, &v);
            interference += leak * leak;
        }
    }
    signal * signal / interference
}

/// Matched-filter merit factor (s^T s)^2 / sum over n != 0 of (s^T J_n s)^2.
pub fn merit_factor_mf(code: &PhaseCode) -> f64 {
    let n = code.len();
    let mut sidelobes = 0i64;
    for lag in 1..n {
        let a = autocorrelation(code, lag);
        sidelobes += a * a;
    }
    // The lag N-1 term is s[0]*s[N-1] = +-1, so the denominator never
    // vanishes for N >= 2.
    (n as f64 * n as f64) / (2.0 * sidelobes as f64)
}

/// Bounds on the MMF metric: the proven range [16/(9 N^3), N^3 2^(N-4)] and
/// the conjectured tight upper bound 37 attained by the length-13 Barker code.
pub fn bounds_mmf(n: usize) -> (f64, f64, f64) {
    assert!(n >= 2);
    let nf = n as f64;
    let lower = 16.0 / (9.0 * nf * nf * nf);
    let upper = nf * nf * nf * 2.0f64.powi(n as i32 - 4);
    (lower, upper, 37.0)
}

/// Search window for the linear radar reward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadarRewardSpec {
    pub ml: f64,
    pub mu: f64,
}

impl RadarRewardSpec {
    pub fn new(ml: f64, mu: f64) -> Result<Self, RadarError> {
        if !(ml < mu) {
            return Err(RadarError::BadRewardBounds { ml, mu });
        }
        Ok(Self { ml, mu })
    }
}

/// Linear reward (2 m - Mu - Ml) / (Mu - Ml), clamped to [-1, 1] outside the
/// window.
pub fn reward_radar(metric: f64, spec: &RadarRewardSpec) -> f64 {
    ((2.0 * metric - spec.mu - spec.ml) / (spec.mu - spec.ml)).clamp(-1.0, 1.0)
}

/// Gaussian clutter model: every range-bin coefficient h_n is i.i.d.
/// N(0, sigma2); receiver noise is ignored.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ClutterModel {
    pub sigma2: f64,
    pub trials: usize,
}

/// Monte-Carlo estimate of the mismatched-filter estimation error.
#[derive(Debug, Clone, Copy)]
pub struct MseEstimate {
    pub mse: f64,
    /// Standard error of the MSE estimate itself.
    pub std_err: f64,
    pub trials: usize,
}

/// Simulate `trials` pulses through the clutter model and estimate h_0 with
/// the mismatched filter; returns the mean square error. Deterministic for a
/// fixed seed.
pub fn simulate_mse(
    code: &PhaseCode,
    model: &ClutterModel,
    seed: u64,
) -> Result<MseEstimate, RadarError> {
    assert!(model.trials >= 1);
    assert!(model.sigma2 > 0.0);
    let n = code.len();
    let solver = MmfSolver::new(code)?;
    let weights = solver.weights();
    let s: Vec<f64> = code.s.iter().map(|&e| e as f64).collect();
    let gain = dot(&weights, &s);

    // Columns J_n s for all shifts, n = 0 included (the signal itself).
    let mut columns = Vec::with_capacity(2 * n - 1);
    for shift in (1 - (n as i64))..n as i64 {
        if shift == 0 {
            columns.push(s.clone());
        } else {
            columns.push(shifted(code, shift)?);
        }
    }
    let h0_index = n - 1;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, model.sigma2.sqrt()).expect("valid sigma");
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut received = vec![0.0f64; n];
    for _ in 0..model.trials {
        received.iter_mut().for_each(|y| *y = 0.0);
        let mut h0 = 0.0;
        for (idx, column) in columns.iter().enumerate() {
            let h: f64 = normal.sample(&mut rng);
            if idx == h0_index {
                h0 = h;
            }
            for (y, c) in received.iter_mut().zip(column) {
                *y += h * c;
            }
        }
        let estimate = dot(&weights, &received) / gain;
        let err = h0 - estimate;
        let sq = err * err;
        sum += sq;
        sum_sq += sq * sq;
    }
    let t = model.trials as f64;
    let mse = sum / t;
    let var = (sum_sq / t - mse * mse).max(0.0);
    Ok(MseEstimate {
        mse,
        std_err: (var / t).sqrt(),
        trials: model.trials,
    })
}

/// The phase codes printed in the source material, hard-coded verbatim.
pub mod benchmarks {
    use super::PhaseCode;

    /// Legendre code of length 59; MMF SIR ~ 10.98, merit factor ~ 6.19.
    pub fn legendre_59() -> PhaseCode {
        PhaseCode::new(vec![
            1, 1, -1, 1, 1, -1, 1, -1, 1, -1, -1, -1, //
            1, -1, 1, 1, -1, 1, 1, 1, -1, 1, -1, 1, //
            -1, -1, 1, -1, -1, 1, 1, 1, -1, 1, 1, 1, //
            1, -1, -1, 1, 1, 1, 1, 1, -1, -1, -1, -1, //
            -1, 1, 1, -1, -1, -1, -1, 1, -1, -1, -1,
        ])
        .expect("valid code")
    }

    /// Length-59 code found by the self-play search; MMF SIR ~ 33.45.
    pub fn discovered_59() -> PhaseCode {
        PhaseCode::new(vec![
            1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, //
            1, 1, 1, 1, -1, -1, -1, -1, -1, -1, -1, -1, //
            1, 1, 1, -1, -1, 1, 1, -1, 1, 1, -1, 1, //
            -1, -1, 1, -1, 1, -1, 1, -1, -1, 1, -1, 1, //
            -1, 1, -1, 1, -1, 1, -1, 1, -1, 1, -1,
        ])
        .expect("valid code")
    }

    /// Barker code of length 13; attains the conjectured MMF bound 37.
    pub fn barker_13() -> PhaseCode {
        PhaseCode::new(vec![1, 1, 1, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1]).expect("valid code")
    }

    /// Exhaustive-search optimum for N = 28; MMF SIR ~ 30.02.
    pub fn optimal_28() -> PhaseCode {
        PhaseCode::new(vec![
            -1, 1, -1, 1, -1, 1, -1, //
            1, -1, -1, 1, -1, -1, 1, //
            1, 1, 1, -1, -1, -1, -1, //
            -1, -1, -1, -1, -1, -1, -1,
        ])
        .expect("valid code")
    }

    /// Best length-59 code found by the Q-learning baseline.
    ///
    /// The matrix is reproduced verbatim; it evaluates to an MMF SIR of
    /// 24.09, not the 23.64 quoted alongside it in the original report.
    pub fn dql_59() -> PhaseCode {
        PhaseCode::new(vec![
            1, -1, 1, 1, -1, 1, -1, 1, 1, -1, 1, -1, //
            1, 1, -1, 1, -1, 1, 1, -1, 1, 1, 1, -1, //
            -1, -1, 1, 1, -1, 1, -1, -1, -1, 1, -1, 1, //
            1, 1, 1, 1, -1, -1, -1, -1, -1, -1, -1, -1, //
            -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1,
        ])
        .expect("valid code")
    }

    /// All named codes with their labels.
    pub fn all() -> Vec<(&'static str, PhaseCode)> {
        vec![
            ("legendre-59", legendre_59()),
            ("discovered-59", discovered_59()),
            ("barker-13", barker_13()),
            ("optimal-28", optimal_28()),
            ("dql-59", dql_59()),
        ]
    }
}
