//! The trainable policy/value function: a small convolutional network over
//! the three-plane board image, with a softmax move head and a tanh reward
//! head, trained by plain SGD on squared-error + cross-entropy loss with L2
//! regularization.
//!
//! Everything is f64 on the CPU. Parameters live in one flat vector so that
//! checkpointing, regularization, SGD and finite-difference checks all
//! operate on a single buffer; layers are views into it described by
//! [`Layout`]. The same trunk doubles as the Q-network of the DQL baseline
//! by reading the policy head's pre-softmax outputs as action values.

use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::ops::Range;
use thiserror::Error;

const BN_EPS: f64 = 1e-5;
const CHECKPOINT_MAGIC: &[u8; 8] = b"SEQNET01";
const CHECKPOINT_FORMAT: u32 = 1;

#[derive(Debug, Error)]
pub enum NetError {
    #[error("invalid network config: {0}")]
    InvalidConfig(String),
    #[error("input has {got} values, network expects {want}")]
    InputSize { got: usize, want: usize },
    #[error("batch is malformed: {0}")]
    BadBatch(String),
    #[error("loss is not finite ({loss}); step {version} aborted")]
    NonFiniteLoss { loss: f64, version: u64 },
    #[error("checkpoint i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("checkpoint is corrupt: {0}")]
    Corrupt(String),
    #[error("checkpoint config does not match the expected one")]
    ConfigMismatch,
}

/// Architecture and optimizer settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    /// Input image rows.
    pub kp: usize,
    /// Input image columns.
    pub np: usize,
    /// Trunk depth; batch normalization and a rectifier follow every layer.
    pub conv_layers: usize,
    /// Filters per trunk layer (width is a local choice, the depth and
    /// normalization scheme are fixed).
    pub filters: usize,
    /// Policy width: one output per move code.
    pub actions: usize,
    /// L2 coefficient on all trainable parameters.
    pub l2: f64,
    pub learning_rate: f64,
    /// Decay of the running batch-norm statistics used at prediction time.
    pub bn_decay: f64,
}

impl NetworkConfig {
    /// Full-size network: six 3x3 conv layers of 64 filters.
    pub fn standard(kp: usize, np: usize, actions: usize) -> Self {
        Self {
            kp,
            np,
            conv_layers: 6,
            filters: 64,
            actions,
            l2: 1e-4,
            learning_rate: 1e-4,
            bn_decay: 0.99,
        }
    }

    pub fn validate(&self) -> Result<(), NetError> {
        if self.kp == 0 || self.np == 0 {
            return Err(NetError::InvalidConfig("empty input image".into()));
        }
        if self.conv_layers == 0 || self.filters == 0 {
            return Err(NetError::InvalidConfig("trunk must be nonempty".into()));
        }
        if self.actions < 2 {
            return Err(NetError::InvalidConfig("need at least two actions".into()));
        }
        if !(self.learning_rate > 0.0) || self.l2 < 0.0 {
            return Err(NetError::InvalidConfig("bad optimizer constants".into()));
        }
        if !(0.0..1.0).contains(&self.bn_decay) {
            return Err(NetError::InvalidConfig("bn_decay must be in [0,1)".into()));
        }
        Ok(())
    }

    pub fn input_len(&self) -> usize {
        3 * self.kp * self.np
    }
}

/// One conv + batch-norm block's slices into the parameter vector.
#[derive(Debug, Clone)]
struct BlockRanges {
    weights: Range<usize>,
    gamma: Range<usize>,
    beta: Range<usize>,
    /// Index of this block's running-stat slot.
    stat: usize,
    c_in: usize,
    c_out: usize,
    kernel: usize,
}

#[derive(Debug, Clone)]
struct DenseRanges {
    weights: Range<usize>,
    bias: Range<usize>,
    inputs: usize,
    outputs: usize,
}

/// Offsets of every layer in the flat parameter and running-stat vectors.
#[derive(Debug, Clone)]
struct Layout {
    trunk: Vec<BlockRanges>,
    policy_conv: BlockRanges,
    policy_dense: DenseRanges,
    value_conv: BlockRanges,
    value_dense: DenseRanges,
    params: usize,
    /// (mean, var) ranges per batch-norm block, same order as `stat` ids.
    stats: Vec<(Range<usize>, Range<usize>)>,
    stats_len: usize,
}

impl Layout {
    fn build(cfg: &NetworkConfig) -> Self {
        let mut p = 0usize;
        let mut s = 0usize;
        let mut stats = Vec::new();
        let mut block = |c_in: usize, c_out: usize, kernel: usize, p: &mut usize, s: &mut usize| {
            let weights = *p..*p + c_out * c_in * kernel * kernel;
            *p = weights.end;
            let gamma = *p..*p + c_out;
            *p = gamma.end;
            let beta = *p..*p + c_out;
            *p = beta.end;
            let mean = *s..*s + c_out;
            *s = mean.end;
            let var = *s..*s + c_out;
            *s = var.end;
            stats.push((mean, var));
            BlockRanges {
                weights,
                gamma,
                beta,
                stat: stats.len() - 1,
                c_in,
                c_out,
                kernel,
            }
        };
        let mut trunk = Vec::with_capacity(cfg.conv_layers);
        for layer in 0..cfg.conv_layers {
            let c_in = if layer == 0 { 3 } else { cfg.filters };
            trunk.push(block(c_in, cfg.filters, 3, &mut p, &mut s));
        }
        let policy_conv = block(cfg.filters, 2, 1, &mut p, &mut s);
        let value_conv = block(cfg.filters, 1, 1, &mut p, &mut s);
        let pixels = cfg.kp * cfg.np;
        let dense = |inputs: usize, outputs: usize, p: &mut usize| {
            let weights = *p..*p + outputs * inputs;
            *p = weights.end;
            let bias = *p..*p + outputs;
            *p = bias.end;
            DenseRanges {
                weights,
                bias,
                inputs,
                outputs,
            }
        };
        let policy_dense = dense(2 * pixels, cfg.actions, &mut p);
        let value_dense = dense(pixels, 1, &mut p);
        Layout {
            trunk,
            policy_conv,
            policy_dense,
            value_conv,
            value_dense,
            params: p,
            stats,
            stats_len: s,
        }
    }
}

/// Immutable parameter set, safe to share across search workers. Training
/// never mutates a snapshot; each step publishes a new one.
#[derive(Debug, Clone)]
pub struct NetworkSnapshot {
    cfg: NetworkConfig,
    version: u64,
    params: Vec<f64>,
    /// Running batch-norm means and variances, used at prediction time.
    stats: Vec<f64>,
}

/// Network output for one state.
#[derive(Debug, Clone)]
pub struct Prediction {
    /// Move distribution, strictly positive, sums to one.
    pub policy: Vec<f64>,
    /// Reward estimate in [-1, 1].
    pub value: f64,
}

/// A training mini-batch of (board image, search policy, terminal reward).
#[derive(Debug, Clone)]
pub struct TrainBatch {
    pub inputs: Vec<Vec<f64>>,
    pub policies: Vec<Vec<f64>>,
    pub rewards: Vec<f64>,
}

impl TrainBatch {
    fn validate(&self, cfg: &NetworkConfig) -> Result<(), NetError> {
        let b = self.inputs.len();
        if b == 0 || self.policies.len() != b || self.rewards.len() != b {
            return Err(NetError::BadBatch(format!(
                "lengths {} / {} / {}",
                self.inputs.len(),
                self.policies.len(),
                self.rewards.len()
            )));
        }
        for x in &self.inputs {
            if x.len() != cfg.input_len() {
                return Err(NetError::BadBatch("input size mismatch".into()));
            }
        }
        for pi in &self.policies {
            if pi.len() != cfg.actions {
                return Err(NetError::BadBatch("policy width mismatch".into()));
            }
            let sum: f64 = pi.iter().sum();
            if (sum - 1.0).abs() > 1e-6 || pi.iter().any(|&p| p < 0.0) {
                return Err(NetError::BadBatch(format!(
                    "policy not a distribution (sum {sum})"
                )));
            }
        }
        if self.rewards.iter().any(|r| !(-1.0..=1.0).contains(r)) {
            return Err(NetError::BadBatch("reward outside [-1, 1]".into()));
        }
        Ok(())
    }
}

/// A Q-learning mini-batch of (board image, taken action, terminal reward).
#[derive(Debug, Clone)]
pub struct QBatch {
    pub inputs: Vec<Vec<f64>>,
    pub actions: Vec<usize>,
    pub targets: Vec<f64>,
}

/// Deterministic random initialization.
pub fn init_random(cfg: &NetworkConfig, seed: u64) -> Result<NetworkSnapshot, NetError> {
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};
    cfg.validate()?;
    let layout = Layout::build(cfg);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut params = vec![0.0f64; layout.params];
    let mut he_fill = |range: Range<usize>, fan_in: usize, params: &mut Vec<f64>| {
        let normal = Normal::new(0.0, (2.0 / fan_in as f64).sqrt()).expect("finite std");
        for i in range {
            params[i] = normal.sample(&mut rng);
        }
    };
    for blk in layout
        .trunk
        .iter()
        .chain([&layout.policy_conv, &layout.value_conv])
    {
        he_fill(
            blk.weights.clone(),
            blk.c_in * blk.kernel * blk.kernel,
            &mut params,
        );
        params[blk.gamma.clone()].fill(1.0);
        // beta stays 0
    }
    for dense in [&layout.policy_dense, &layout.value_dense] {
        he_fill(dense.weights.clone(), dense.inputs, &mut params);
        // bias stays 0
    }
    // Running stats start at zero and are debiased by 1 - decay^version at
    // prediction time; an untrained net falls back to (mean 0, var 1).
    let stats = vec![0.0f64; layout.stats_len];
    Ok(NetworkSnapshot {
        cfg: cfg.clone(),
        version: 0,
        params,
        stats,
    })
}

impl NetworkSnapshot {
    pub fn config(&self) -> &NetworkConfig {
        &self.cfg
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Copy of this snapshot with replaced parameters (same shape); used by
    /// gradient checks and checkpoint surgery.
    pub fn with_params(&self, params: Vec<f64>) -> NetworkSnapshot {
        assert_eq!(params.len(), self.params.len());
        NetworkSnapshot {
            cfg: self.cfg.clone(),
            version: self.version,
            params,
            stats: self.stats.clone(),
        }
    }

    /// Evaluate one board image with the running normalization statistics.
    pub fn predict(&self, input: &[f64]) -> Result<Prediction, NetError> {
        if input.len() != self.cfg.input_len() {
            return Err(NetError::InputSize {
                got: input.len(),
                want: self.cfg.input_len(),
            });
        }
        let (logits, value) = self.heads_infer(input);
        Ok(Prediction {
            policy: softmax(&logits),
            value: value.tanh(),
        })
    }

    /// Convenience batch form; identical to mapping [`predict`].
    pub fn predict_batch(&self, inputs: &[Vec<f64>]) -> Result<Vec<Prediction>, NetError> {
        inputs.iter().map(|x| self.predict(x)).collect()
    }

    /// Action values for the Q-learning baseline: the policy head's
    /// pre-softmax outputs.
    pub fn q_values(&self, input: &[f64]) -> Result<Vec<f64>, NetError> {
        if input.len() != self.cfg.input_len() {
            return Err(NetError::InputSize {
                got: input.len(),
                want: self.cfg.input_len(),
            });
        }
        Ok(self.heads_infer(input).0)
    }

    fn heads_infer(&self, input: &[f64]) -> (Vec<f64>, f64) {
        let layout = Layout::build(&self.cfg);
        let (h, w) = (self.cfg.kp, self.cfg.np);
        let mut x = input.to_vec();
        for blk in &layout.trunk {
            x = self.block_infer(&layout, blk, &x, h, w);
            relu_inplace(&mut x);
        }
        let mut pol = self.block_infer(&layout, &layout.policy_conv, &x, h, w);
        relu_inplace(&mut pol);
        let logits = dense_forward(&self.params, &layout.policy_dense, &pol);
        let mut val = self.block_infer(&layout, &layout.value_conv, &x, h, w);
        relu_inplace(&mut val);
        let value = dense_forward(&self.params, &layout.value_dense, &val)[0];
        (logits, value)
    }

    fn block_infer(
        &self,
        layout: &Layout,
        blk: &BlockRanges,
        x: &[f64],
        h: usize,
        w: usize,
    ) -> Vec<f64> {
        let mut y = conv_forward(&self.params[blk.weights.clone()], blk, x, 1, h, w);
        let (mean_r, var_r) = &layout.stats[blk.stat];
        let mean = &self.stats[mean_r.clone()];
        let var = &self.stats[var_r.clone()];
        let gamma = &self.params[blk.gamma.clone()];
        let beta = &self.params[blk.beta.clone()];
        // Debias the exponential averages; a never-trained net normalizes
        // with (0, 1).
        let debias = 1.0 - self.cfg.bn_decay.powi(self.version.min(1 << 30) as i32);
        let hw = h * w;
        for ch in 0..blk.c_out {
            let (m, v) = if debias > 0.0 {
                (mean[ch] / debias, var[ch] / debias)
            } else {
                (0.0, 1.0)
            };
            let inv = 1.0 / (v + BN_EPS).sqrt();
            for p in 0..hw {
                let idx = ch * hw + p;
                y[idx] = gamma[ch] * (y[idx] - m) * inv + beta[ch];
            }
        }
        y
    }
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|&e| e / sum).collect()
}

fn relu_inplace(x: &mut [f64]) {
    for v in x {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
}

/// y[b,f,i,j] = sum_c sum_uv W[f,c,u,v] x[b,c,i+u-pad,j+v-pad], zero padded.
fn conv_forward(
    weights: &[f64],
    blk: &BlockRanges,
    x: &[f64],
    batch: usize,
    h: usize,
    w: usize,
) -> Vec<f64> {
    let k = blk.kernel;
    let pad = k / 2;
    let hw = h * w;
    let mut y = vec![0.0f64; batch * blk.c_out * hw];
    for b in 0..batch {
        let xb = &x[b * blk.c_in * hw..(b + 1) * blk.c_in * hw];
        let yb = &mut y[b * blk.c_out * hw..(b + 1) * blk.c_out * hw];
        for f in 0..blk.c_out {
            let wf = &weights[f * blk.c_in * k * k..(f + 1) * blk.c_in * k * k];
            for c in 0..blk.c_in {
                let xc = &xb[c * hw..(c + 1) * hw];
                let wfc = &wf[c * k * k..(c + 1) * k * k];
                for i in 0..h {
                    for u in 0..k {
                        let si = i as isize + u as isize - pad as isize;
                        if si < 0 || si >= h as isize {
                            continue;
                        }
                        let row = si as usize * w;
                        for v in 0..k {
                            let wgt = wfc[u * k + v];
                            if wgt == 0.0 {
                                continue;
                            }
                            let off = v as isize - pad as isize;
                            let lo = (-off).max(0) as usize;
                            let hi = (w as isize - off).min(w as isize) as usize;
                            for j in lo..hi {
                                yb[f * hw + i * w + j] +=
                                    wgt * xc[row + (j as isize + off) as usize];
                            }
                        }
                    }
                }
            }
        }
    }
    y
}

/// Gradients of [`conv_forward`] with respect to inputs and weights.
fn conv_backward(
    weights: &[f64],
    blk: &BlockRanges,
    x: &[f64],
    dy: &[f64],
    batch: usize,
    h: usize,
    w: usize,
) -> (Vec<f64>, Vec<f64>) {
    let k = blk.kernel;
    let pad = k / 2;
    let hw = h * w;
    let mut dx = vec![0.0f64; batch * blk.c_in * hw];
    let mut dw = vec![0.0f64; weights.len()];
    for b in 0..batch {
        let xb = &x[b * blk.c_in * hw..(b + 1) * blk.c_in * hw];
        let dyb = &dy[b * blk.c_out * hw..(b + 1) * blk.c_out * hw];
        let dxb = &mut dx[b * blk.c_in * hw..(b + 1) * blk.c_in * hw];
        for f in 0..blk.c_out {
            let wf = &weights[f * blk.c_in * k * k..(f + 1) * blk.c_in * k * k];
            let dyf = &dyb[f * hw..(f + 1) * hw];
            for c in 0..blk.c_in {
                let xc = &xb[c * hw..(c + 1) * hw];
                let wfc = &wf[c * k * k..(c + 1) * k * k];
                let dwfc = f * blk.c_in * k * k + c * k * k;
                for i in 0..h {
                    for u in 0..k {
                        let si = i as isize + u as isize - pad as isize;
                        if si < 0 || si >= h as isize {
                            continue;
                        }
                        let row = si as usize * w;
                        for v in 0..k {
                            let off = v as isize - pad as isize;
                            let lo = (-off).max(0) as usize;
                            let hi = (w as isize - off).min(w as isize) as usize;
                            let wgt = wfc[u * k + v];
                            let mut grad_w = 0.0;
                            for j in lo..hi {
                                let g = dyf[i * w + j];
                                let src = row + (j as isize + off) as usize;
                                grad_w += g * xc[src];
                                dxb[c * hw + src] += g * wgt;
                            }
                            dw[dwfc + u * k + v] += grad_w;
                        }
                    }
                }
            }
        }
    }
    (dx, dw)
}

struct BnCache {
    xhat: Vec<f64>,
    inv_std: Vec<f64>,
    batch_mean: Vec<f64>,
    batch_var: Vec<f64>,
}

/// Training-mode batch norm over (batch, pixels) per channel.
fn bn_forward_train(
    x: &[f64],
    gamma: &[f64],
    beta: &[f64],
    batch: usize,
    channels: usize,
    hw: usize,
) -> (Vec<f64>, BnCache) {
    let m = (batch * hw) as f64;
    let mut mean = vec![0.0f64; channels];
    let mut var = vec![0.0f64; channels];
    for b in 0..batch {
        for ch in 0..channels {
            let base = (b * channels + ch) * hw;
            for p in 0..hw {
                mean[ch] += x[base + p];
            }
        }
    }
    for v in &mut mean {
        *v /= m;
    }
    for b in 0..batch {
        for ch in 0..channels {
            let base = (b * channels + ch) * hw;
            for p in 0..hw {
                let d = x[base + p] - mean[ch];
                var[ch] += d * d;
            }
        }
    }
    for v in &mut var {
        *v /= m;
    }
    let inv_std: Vec<f64> = var.iter().map(|&v| 1.0 / (v + BN_EPS).sqrt()).collect();
    let mut y = vec![0.0f64; x.len()];
    let mut xhat = vec![0.0f64; x.len()];
    for b in 0..batch {
        for ch in 0..channels {
            let base = (b * channels + ch) * hw;
            for p in 0..hw {
                let h = (x[base + p] - mean[ch]) * inv_std[ch];
                xhat[base + p] = h;
                y[base + p] = gamma[ch] * h + beta[ch];
            }
        }
    }
    (
        y,
        BnCache {
            xhat,
            inv_std,
            batch_mean: mean,
            batch_var: var,
        },
    )
}

/// dL/dx, dL/dgamma, dL/dbeta for training-mode batch norm.
fn bn_backward(
    dy: &[f64],
    cache: &BnCache,
    gamma: &[f64],
    batch: usize,
    channels: usize,
    hw: usize,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let m = (batch * hw) as f64;
    let mut dgamma = vec![0.0f64; channels];
    let mut dbeta = vec![0.0f64; channels];
    for b in 0..batch {
        for ch in 0..channels {
            let base = (b * channels + ch) * hw;
            for p in 0..hw {
                dgamma[ch] += dy[base + p] * cache.xhat[base + p];
                dbeta[ch] += dy[base + p];
            }
        }
    }
    let mut dx = vec![0.0f64; dy.len()];
    for b in 0..batch {
        for ch in 0..channels {
            let base = (b * channels + ch) * hw;
            let scale = gamma[ch] * cache.inv_std[ch];
            for p in 0..hw {
                let dxhat_sum = dbeta[ch]; // sum of dy
                let dxhat_dot = dgamma[ch]; // sum of dy * xhat
                dx[base + p] =
                    scale * (dy[base + p] - dxhat_sum / m - cache.xhat[base + p] * dxhat_dot / m);
            }
        }
    }
    (dx, dgamma, dbeta)
}

fn dense_forward(params: &[f64], dense: &DenseRanges, x: &[f64]) -> Vec<f64> {
    debug_assert_eq!(x.len(), dense.inputs);
    let w = &params[dense.weights.clone()];
    let b = &params[dense.bias.clone()];
    (0..dense.outputs)
        .map(|o| {
            let row = &w[o * dense.inputs..(o + 1) * dense.inputs];
            b[o] + row.iter().zip(x).map(|(wi, xi)| wi * xi).sum::<f64>()
        })
        .collect()
}

fn dense_forward_batch(params: &[f64], dense: &DenseRanges, x: &[f64], batch: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(batch * dense.outputs);
    for b in 0..batch {
        out.extend(dense_forward(
            params,
            dense,
            &x[b * dense.inputs..(b + 1) * dense.inputs],
        ));
    }
    out
}

fn dense_backward_batch(
    params: &[f64],
    dense: &DenseRanges,
    x: &[f64],
    dy: &[f64],
    batch: usize,
    grad: &mut [f64],
) -> Vec<f64> {
    let w = &params[dense.weights.clone()];
    let mut dx = vec![0.0f64; batch * dense.inputs];
    for b in 0..batch {
        let xb = &x[b * dense.inputs..(b + 1) * dense.inputs];
        let dyb = &dy[b * dense.outputs..(b + 1) * dense.outputs];
        for o in 0..dense.outputs {
            let g = dyb[o];
            if g == 0.0 {
                continue;
            }
            grad[dense.bias.start + o] += g;
            let wrow = &w[o * dense.inputs..(o + 1) * dense.inputs];
            let grow = dense.weights.start + o * dense.inputs;
            let dxb = &mut dx[b * dense.inputs..(b + 1) * dense.inputs];
            for i in 0..dense.inputs {
                grad[grow + i] += g * xb[i];
                dxb[i] += g * wrow[i];
            }
        }
    }
    dx
}

/// What the loss drives the heads toward.
enum Target<'a> {
    /// Match (policy, reward): (R - R')^2 - Pi . log P, mean over the batch.
    PolicyValue {
        policies: &'a [Vec<f64>],
        rewards: &'a [f64],
    },
    /// Match action values: mean squared error on the taken action's Q.
    QValue {
        actions: &'a [usize],
        targets: &'a [f64],
    },
}

struct TrainForward {
    loss: f64,
    /// dL/dtheta including the L2 term.
    grad: Vec<f64>,
    /// Per-block batch statistics for the running-average update.
    batch_stats: Vec<(Vec<f64>, Vec<f64>)>,
    /// Training-mode head outputs (softmax policy or raw Q) per example.
    head_out: Vec<Vec<f64>>,
    /// Training-mode value output per example (policy/value target only).
    value_out: Vec<f64>,
}

fn forward_backward(
    snap: &NetworkSnapshot,
    inputs: &[Vec<f64>],
    target: Target<'_>,
    l2: f64,
) -> TrainForward {
    let cfg = &snap.cfg;
    let layout = Layout::build(cfg);
    let (h, w) = (cfg.kp, cfg.np);
    let hw = h * w;
    let batch = inputs.len();
    let params = &snap.params;

    let mut x: Vec<f64> = Vec::with_capacity(batch * cfg.input_len());
    for input in inputs {
        x.extend_from_slice(input);
    }

    // Trunk forward, caching per block.
    struct BlockCache {
        input: Vec<f64>,
        bn: BnCache,
        activated: Vec<f64>,
    }
    let mut caches: Vec<BlockCache> = Vec::with_capacity(layout.trunk.len());
    for blk in &layout.trunk {
        let conv = conv_forward(&params[blk.weights.clone()], blk, &x, batch, h, w);
        let (mut y, bn) = bn_forward_train(
            &conv,
            &params[blk.gamma.clone()],
            &params[blk.beta.clone()],
            batch,
            blk.c_out,
            hw,
        );
        relu_inplace(&mut y);
        caches.push(BlockCache {
            input: x,
            bn,
            activated: y.clone(),
        });
        x = y;
    }
    let trunk_out = x;

    // Policy head forward.
    let pconv = conv_forward(
        &params[layout.policy_conv.weights.clone()],
        &layout.policy_conv,
        &trunk_out,
        batch,
        h,
        w,
    );
    let (mut pact, pbn) = bn_forward_train(
        &pconv,
        &params[layout.policy_conv.gamma.clone()],
        &params[layout.policy_conv.beta.clone()],
        batch,
        2,
        hw,
    );
    relu_inplace(&mut pact);
    let logits = dense_forward_batch(params, &layout.policy_dense, &pact, batch);

    // Value head forward.
    let vconv = conv_forward(
        &params[layout.value_conv.weights.clone()],
        &layout.value_conv,
        &trunk_out,
        batch,
        h,
        w,
    );
    let (mut vact, vbn) = bn_forward_train(
        &vconv,
        &params[layout.value_conv.gamma.clone()],
        &params[layout.value_conv.beta.clone()],
        batch,
        1,
        hw,
    );
    relu_inplace(&mut vact);
    let zs = dense_forward_batch(params, &layout.value_dense, &vact, batch);

    // Loss and head gradients.
    let bf = batch as f64;
    let mut grad = vec![0.0f64; layout.params];
    let mut dlogits = vec![0.0f64; logits.len()];
    let mut dz = vec![0.0f64; batch];
    let mut loss = 0.0f64;
    let mut head_out = Vec::with_capacity(batch);
    let mut value_out = Vec::with_capacity(batch);
    match target {
        Target::PolicyValue { policies, rewards } => {
            for b in 0..batch {
                let lb = &logits[b * cfg.actions..(b + 1) * cfg.actions];
                let probs = softmax(lb);
                let value = zs[b].tanh();
                let reward = rewards[b];
                loss += (reward - value) * (reward - value);
                for j in 0..cfg.actions {
                    if policies[b][j] > 0.0 {
                        loss -= policies[b][j] * probs[j].ln();
                    }
                    dlogits[b * cfg.actions + j] = (probs[j] - policies[b][j]) / bf;
                }
                dz[b] = 2.0 * (value - reward) * (1.0 - value * value) / bf;
                head_out.push(probs);
                value_out.push(value);
            }
        }
        Target::QValue { actions, targets } => {
            for b in 0..batch {
                let lb = &logits[b * cfg.actions..(b + 1) * cfg.actions];
                let q = lb[actions[b]];
                let err = q - targets[b];
                loss += err * err;
                dlogits[b * cfg.actions + actions[b]] = 2.0 * err / bf;
                head_out.push(lb.to_vec());
                value_out.push(zs[b].tanh());
            }
        }
    }
    loss /= bf;
    if l2 > 0.0 {
        loss += l2 * params.iter().map(|&t| t * t).sum::<f64>();
    }

    // Value head backward (Q target sends nothing through this head).
    let dvact = if matches!(target, Target::PolicyValue { .. }) {
        dense_backward_batch(params, &layout.value_dense, &vact, &dz, batch, &mut grad)
    } else {
        vec![0.0f64; vact.len()]
    };
    let mut dvbn = dvact;
    for (g, &a) in dvbn.iter_mut().zip(&vact) {
        if a <= 0.0 {
            *g = 0.0;
        }
    }
    let (dvconv, dvgamma, dvbeta) = bn_backward(
        &dvbn,
        &vbn,
        &params[layout.value_conv.gamma.clone()],
        batch,
        1,
        hw,
    );
    grad[layout.value_conv.gamma.clone()].copy_from_slice(&dvgamma);
    grad[layout.value_conv.beta.clone()].copy_from_slice(&dvbeta);
    let (dtrunk_v, dwv) = conv_backward(
        &params[layout.value_conv.weights.clone()],
        &layout.value_conv,
        &trunk_out,
        &dvconv,
        batch,
        h,
        w,
    );
    grad[layout.value_conv.weights.clone()].copy_from_slice(&dwv);

    // Policy head backward.
    let dpact = dense_backward_batch(
        params,
        &layout.policy_dense,
        &pact,
        &dlogits,
        batch,
        &mut grad,
    );
    let mut dpbn = dpact;
    for (g, &a) in dpbn.iter_mut().zip(&pact) {
        if a <= 0.0 {
            *g = 0.0;
        }
    }
    let (dpconv, dpgamma, dpbeta) = bn_backward(
        &dpbn,
        &pbn,
        &params[layout.policy_conv.gamma.clone()],
        batch,
        2,
        hw,
    );
    grad[layout.policy_conv.gamma.clone()].copy_from_slice(&dpgamma);
    grad[layout.policy_conv.beta.clone()].copy_from_slice(&dpbeta);
    let (dtrunk_p, dwp) = conv_backward(
        &params[layout.policy_conv.weights.clone()],
        &layout.policy_conv,
        &trunk_out,
        &dpconv,
        batch,
        h,
        w,
    );
    grad[layout.policy_conv.weights.clone()].copy_from_slice(&dwp);

    // Merge head gradients and walk the trunk backwards.
    let mut dx: Vec<f64> = dtrunk_v.iter().zip(&dtrunk_p).map(|(a, b)| a + b).collect();
    let mut batch_stats = vec![(Vec::new(), Vec::new()); layout.stats.len()];
    batch_stats[layout.policy_conv.stat] = (pbn.batch_mean.clone(), pbn.batch_var.clone());
    batch_stats[layout.value_conv.stat] = (vbn.batch_mean.clone(), vbn.batch_var.clone());
    for (blk, cache) in layout.trunk.iter().zip(&caches).rev() {
        for (g, &a) in dx.iter_mut().zip(&cache.activated) {
            if a <= 0.0 {
                *g = 0.0;
            }
        }
        let (dconv, dgamma, dbeta) = bn_backward(
            &dx,
            &cache.bn,
            &params[blk.gamma.clone()],
            batch,
            blk.c_out,
            hw,
        );
        grad[blk.gamma.clone()].copy_from_slice(&dgamma);
        grad[blk.beta.clone()].copy_from_slice(&dbeta);
        let (dinput, dwconv) = conv_backward(
            &params[blk.weights.clone()],
            blk,
            &cache.input,
            &dconv,
            batch,
            h,
            w,
        );
        grad[blk.weights.clone()].copy_from_slice(&dwconv);
        batch_stats[blk.stat] = (cache.bn.batch_mean.clone(), cache.bn.batch_var.clone());
        dx = dinput;
    }

    if l2 > 0.0 {
        for (g, &t) in grad.iter_mut().zip(params.iter()) {
            *g += 2.0 * l2 * t;
        }
    }

    TrainForward {
        loss,
        grad,
        batch_stats,
        head_out,
        value_out,
    }
}

/// Loss of Eq-style squared error + cross entropy + L2 on one batch,
/// evaluated in training mode (batch statistics). Used by gradient checks.
pub fn batch_loss(snap: &NetworkSnapshot, batch: &TrainBatch) -> Result<f64, NetError> {
    batch.validate(&snap.cfg)?;
    let fwd = forward_backward(
        snap,
        &batch.inputs,
        Target::PolicyValue {
            policies: &batch.policies,
            rewards: &batch.rewards,
        },
        snap.cfg.l2,
    );
    Ok(fwd.loss)
}

/// Loss plus its analytic gradient with respect to every parameter.
pub fn loss_gradient(
    snap: &NetworkSnapshot,
    batch: &TrainBatch,
) -> Result<(f64, Vec<f64>), NetError> {
    batch.validate(&snap.cfg)?;
    let fwd = forward_backward(
        snap,
        &batch.inputs,
        Target::PolicyValue {
            policies: &batch.policies,
            rewards: &batch.rewards,
        },
        snap.cfg.l2,
    );
    Ok((fwd.loss, fwd.grad))
}

/// Training-mode action values (pre-softmax policy outputs under batch
/// statistics); the Q analogue of [`forward_train`].
pub fn q_values_train(snap: &NetworkSnapshot, inputs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let actions = vec![0usize; inputs.len()];
    let targets = vec![0.0f64; inputs.len()];
    let fwd = forward_backward(
        snap,
        inputs,
        Target::QValue {
            actions: &actions,
            targets: &targets,
        },
        0.0,
    );
    fwd.head_out
}

/// Training-mode head outputs for a batch (policy distributions and values);
/// handy for stationarity checks and diagnostics.
pub fn forward_train(snap: &NetworkSnapshot, inputs: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let uniform = vec![vec![1.0 / snap.cfg.actions as f64; snap.cfg.actions]; inputs.len()];
    let rewards = vec![0.0f64; inputs.len()];
    let fwd = forward_backward(
        snap,
        inputs,
        Target::PolicyValue {
            policies: &uniform,
            rewards: &rewards,
        },
        0.0,
    );
    (fwd.head_out, fwd.value_out)
}

fn apply_step(snap: &NetworkSnapshot, fwd: &TrainForward) -> Result<NetworkSnapshot, NetError> {
    if !fwd.loss.is_finite() || fwd.grad.iter().any(|g| !g.is_finite()) {
        return Err(NetError::NonFiniteLoss {
            loss: fwd.loss,
            version: snap.version,
        });
    }
    let layout = Layout::build(&snap.cfg);
    let lr = snap.cfg.learning_rate;
    let mut params = snap.params.clone();
    for (p, g) in params.iter_mut().zip(&fwd.grad) {
        *p -= lr * g;
    }
    let mut stats = snap.stats.clone();
    let decay = snap.cfg.bn_decay;
    for (slot, (mean, var)) in fwd.batch_stats.iter().enumerate() {
        let (mean_r, var_r) = &layout.stats[slot];
        for (i, &m) in mean.iter().enumerate() {
            stats[mean_r.start + i] = decay * stats[mean_r.start + i] + (1.0 - decay) * m;
        }
        for (i, &v) in var.iter().enumerate() {
            stats[var_r.start + i] = decay * stats[var_r.start + i] + (1.0 - decay) * v;
        }
    }
    Ok(NetworkSnapshot {
        cfg: snap.cfg.clone(),
        version: snap.version + 1,
        params,
        stats,
    })
}

/// One SGD step on the policy/value loss; returns the new snapshot and the
/// pre-step loss.
pub fn train_step(
    snap: &NetworkSnapshot,
    batch: &TrainBatch,
) -> Result<(NetworkSnapshot, f64), NetError> {
    batch.validate(&snap.cfg)?;
    let fwd = forward_backward(
        snap,
        &batch.inputs,
        Target::PolicyValue {
            policies: &batch.policies,
            rewards: &batch.rewards,
        },
        snap.cfg.l2,
    );
    Ok((apply_step(snap, &fwd)?, fwd.loss))
}

/// One SGD step on the Q-value regression loss (no L2 term, matching the
/// plain terminal-reward regressor).
pub fn train_q_step(
    snap: &NetworkSnapshot,
    batch: &QBatch,
) -> Result<(NetworkSnapshot, f64), NetError> {
    let b = batch.inputs.len();
    if b == 0 || batch.actions.len() != b || batch.targets.len() != b {
        return Err(NetError::BadBatch("q-batch length mismatch".into()));
    }
    for x in &batch.inputs {
        if x.len() != snap.cfg.input_len() {
            return Err(NetError::BadBatch("input size mismatch".into()));
        }
    }
    if batch.actions.iter().any(|&a| a >= snap.cfg.actions) {
        return Err(NetError::BadBatch("action index out of range".into()));
    }
    let fwd = forward_backward(
        snap,
        &batch.inputs,
        Target::QValue {
            actions: &batch.actions,
            targets: &batch.targets,
        },
        0.0,
    );
    Ok((apply_step(snap, &fwd)?, fwd.loss))
}

// ---- checkpoint container ----------------------------------------------

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

impl NetworkSnapshot {
    /// Serialize to the versioned container: magic, format version, config
    /// echo, little-endian f64 payloads, trailing checksum.
    pub fn save(&self, writer: &mut impl Write) -> Result<(), NetError> {
        let mut buf = Vec::new();
        buf.extend_from_slice(CHECKPOINT_MAGIC);
        buf.extend_from_slice(&CHECKPOINT_FORMAT.to_le_bytes());
        let cfg = serde_json::to_vec(&self.cfg).expect("config serializes");
        buf.extend_from_slice(&(cfg.len() as u32).to_le_bytes());
        buf.extend_from_slice(&cfg);
        buf.extend_from_slice(&self.version.to_le_bytes());
        buf.extend_from_slice(&(self.params.len() as u64).to_le_bytes());
        for &p in &self.params {
            buf.extend_from_slice(&p.to_le_bytes());
        }
        buf.extend_from_slice(&(self.stats.len() as u64).to_le_bytes());
        for &s in &self.stats {
            buf.extend_from_slice(&s.to_le_bytes());
        }
        let checksum = fnv1a(&buf);
        writer.write_all(&buf)?;
        writer.write_all(&checksum.to_le_bytes())?;
        Ok(())
    }

    pub fn load(reader: &mut impl Read) -> Result<NetworkSnapshot, NetError> {
        let mut bytes = Vec::new();
        reader.read_to_end(&mut bytes)?;
        if bytes.len() < 8 + 4 + 4 + 8 {
            return Err(NetError::Corrupt("truncated container".into()));
        }
        let (body, tail) = bytes.split_at(bytes.len() - 8);
        let stored = u64::from_le_bytes(tail.try_into().expect("8 bytes"));
        if fnv1a(body) != stored {
            return Err(NetError::Corrupt("checksum mismatch".into()));
        }
        let mut at = 0usize;
        let mut take = |n: usize| -> Result<&[u8], NetError> {
            if at + n > body.len() {
                return Err(NetError::Corrupt("truncated body".into()));
            }
            let s = &body[at..at + n];
            at += n;
            Ok(s)
        };
        if take(8)? != CHECKPOINT_MAGIC {
            return Err(NetError::Corrupt("bad magic".into()));
        }
        let format = u32::from_le_bytes(take(4)?.try_into().unwrap());
        if format != CHECKPOINT_FORMAT {
            return Err(NetError::Corrupt(format!("unsupported format {format}")));
        }
        let cfg_len = u32::from_le_bytes(take(4)?.try_into().unwrap()) as usize;
        let cfg: NetworkConfig = serde_json::from_slice(take(cfg_len)?)
            .map_err(|e| NetError::Corrupt(format!("config echo: {e}")))?;
        let version = u64::from_le_bytes(take(8)?.try_into().unwrap());
        let n_params = u64::from_le_bytes(take(8)?.try_into().unwrap()) as usize;
        let layout = Layout::build(&cfg);
        if n_params != layout.params {
            return Err(NetError::Corrupt(
                "parameter count disagrees with config".into(),
            ));
        }
        let mut params = Vec::with_capacity(n_params);
        for chunk in take(8 * n_params)?.chunks_exact(8) {
            params.push(f64::from_le_bytes(chunk.try_into().unwrap()));
        }
        let n_stats = u64::from_le_bytes(take(8)?.try_into().unwrap()) as usize;
        if n_stats != layout.stats_len {
            return Err(NetError::Corrupt("stat count disagrees with config".into()));
        }
        let mut stats = Vec::with_capacity(n_stats);
        for chunk in take(8 * n_stats)?.chunks_exact(8) {
            stats.push(f64::from_le_bytes(chunk.try_into().unwrap()));
        }
        Ok(NetworkSnapshot {
            cfg,
            version,
            params,
            stats,
        })
    }

    /// Load and reject any container whose config differs from `expected`.
    pub fn load_matching(
        reader: &mut impl Read,
        expected: &NetworkConfig,
    ) -> Result<NetworkSnapshot, NetError> {
        let snap = Self::load(reader)?;
        if &snap.cfg != expected {
            return Err(NetError::ConfigMismatch);
        }
        Ok(snap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_cfg() -> NetworkConfig {
        NetworkConfig {
            kp: 2,
            np: 3,
            conv_layers: 2,
            filters: 4,
            actions: 4,
            l2: 1e-4,
            learning_rate: 1e-2,
            bn_decay: 0.9,
        }
    }

    fn tiny_batch(cfg: &NetworkConfig, seed: u64) -> TrainBatch {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let b = 3;
        let mut inputs = Vec::new();
        let mut policies = Vec::new();
        let mut rewards = Vec::new();
        for _ in 0..b {
            // Valid three-plane indicator images.
            let px = cfg.kp * cfg.np;
            let mut img = vec![0.0; 3 * px];
            for p in 0..px {
                let plane = rng.gen_range(0..3);
                img[plane * px + p] = 1.0;
            }
            inputs.push(img);
            let raw: Vec<f64> = (0..cfg.actions).map(|_| rng.gen_range(0.1..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            policies.push(raw.iter().map(|r| r / sum).collect());
            rewards.push(rng.gen_range(-1.0..1.0));
        }
        TrainBatch {
            inputs,
            policies,
            rewards,
        }
    }

    #[test]
    fn init_deterministic_and_seed_sensitive() {
        let cfg = tiny_cfg();
        let a = init_random(&cfg, 42).unwrap();
        let b = init_random(&cfg, 42).unwrap();
        let c = init_random(&cfg, 43).unwrap();
        let input = tiny_batch(&cfg, 9).inputs.remove(0);
        let pa = a.predict(&input).unwrap();
        let pb = b.predict(&input).unwrap();
        let pc = c.predict(&input).unwrap();
        assert_eq!(pa.policy, pb.policy);
        assert_eq!(pa.value, pb.value);
        assert_ne!(pa.policy, pc.policy);
    }

    #[test]
    fn prediction_invariants() {
        let cfg = tiny_cfg();
        let snap = init_random(&cfg, 7).unwrap();
        let batch = tiny_batch(&cfg, 1);
        for input in &batch.inputs {
            let p = snap.predict(input).unwrap();
            let sum: f64 = p.policy.iter().sum();
            assert!((sum - 1.0).abs() < 1e-9);
            assert!(
                p.policy.iter().all(|&x| x > 0.0),
                "softmax has full support"
            );
            assert!(p.value.abs() <= 1.0);
        }
        // Batch predict is exactly the mapped single predict.
        let batched = snap.predict_batch(&batch.inputs).unwrap();
        for (one, many) in batch.inputs.iter().zip(&batched) {
            let single = snap.predict(one).unwrap();
            assert_eq!(single.policy, many.policy);
            assert_eq!(single.value, many.value);
        }
        assert!(snap.predict(&[0.0; 5]).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let cfg = tiny_cfg();
        let snap = init_random(&cfg, 5).unwrap();
        let batch = tiny_batch(&cfg, 2);
        let (_, grad) = loss_gradient(&snap, &batch).unwrap();
        let h = 1e-5;
        let mut worst: f64 = 0.0;
        for i in 0..snap.params().len() {
            let mut plus = snap.params().to_vec();
            plus[i] += h;
            let mut minus = snap.params().to_vec();
            minus[i] -= h;
            let lp = batch_loss(&snap.with_params(plus), &batch).unwrap();
            let lm = batch_loss(&snap.with_params(minus), &batch).unwrap();
            let numeric = (lp - lm) / (2.0 * h);
            let denom = numeric.abs().max(grad[i].abs()).max(1e-6);
            worst = worst.max((numeric - grad[i]).abs() / denom);
        }
        assert!(worst <= 1e-4, "worst relative gradient error {worst}");
    }

    #[test]
    fn q_gradient_matches_finite_differences() {
        use rand::{Rng, SeedableRng};
        let cfg = tiny_cfg();
        let snap = init_random(&cfg, 6).unwrap();
        let pv = tiny_batch(&cfg, 3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let batch = QBatch {
            inputs: pv.inputs.clone(),
            actions: (0..pv.inputs.len())
                .map(|_| rng.gen_range(0..cfg.actions))
                .collect(),
            targets: (0..pv.inputs.len())
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect(),
        };
        let fwd = forward_backward(
            &snap,
            &batch.inputs,
            Target::QValue {
                actions: &batch.actions,
                targets: &batch.targets,
            },
            0.0,
        );
        let q_loss = |s: &NetworkSnapshot| {
            forward_backward(
                s,
                &batch.inputs,
                Target::QValue {
                    actions: &batch.actions,
                    targets: &batch.targets,
                },
                0.0,
            )
            .loss
        };
        let h = 1e-5;
        let mut worst: f64 = 0.0;
        // Spot-check a spread of parameters.
        for i in (0..snap.params().len()).step_by(7) {
            let mut plus = snap.params().to_vec();
            plus[i] += h;
            let mut minus = snap.params().to_vec();
            minus[i] -= h;
            let numeric =
                (q_loss(&snap.with_params(plus)) - q_loss(&snap.with_params(minus))) / (2.0 * h);
            let denom = numeric.abs().max(fwd.grad[i].abs()).max(1e-6);
            worst = worst.max((numeric - fwd.grad[i]).abs() / denom);
        }
        assert!(worst <= 1e-4, "worst relative q-gradient error {worst}");
    }

    #[test]
    fn overfits_one_batch() {
        let cfg = tiny_cfg();
        let mut snap = init_random(&cfg, 11).unwrap();
        // One-hot policies keep the cross-entropy floor at zero, so the
        // batch is fittable and the halving bar is meaningful.
        let mut batch = tiny_batch(&cfg, 12);
        for (i, p) in batch.policies.iter_mut().enumerate() {
            p.fill(0.0);
            p[i % cfg.actions] = 1.0;
        }
        let initial = batch_loss(&snap, &batch).unwrap();
        for _ in 0..200 {
            let (next, _) = train_step(&snap, &batch).unwrap();
            snap = next;
        }
        let final_loss = batch_loss(&snap, &batch).unwrap();
        assert!(
            final_loss <= 0.5 * initial,
            "loss went {initial} -> {final_loss}"
        );
        assert_eq!(snap.version(), 200);
    }

    #[test]
    fn matched_targets_have_small_gradient() {
        // With l2 = 0 and targets equal to the current outputs, the data
        // terms sit at a stationary point.
        let mut cfg = tiny_cfg();
        cfg.l2 = 0.0;
        let snap = init_random(&cfg, 13).unwrap();
        let probe = tiny_batch(&cfg, 14);
        let (policies, values) = forward_train(&snap, &probe.inputs);
        let batch = TrainBatch {
            inputs: probe.inputs.clone(),
            policies,
            rewards: values,
        };
        let (_, grad) = loss_gradient(&snap, &batch).unwrap();
        let max = grad.iter().fold(0.0f64, |a, &g| a.max(g.abs()));
        assert!(max < 1e-9, "gradient should vanish, max component {max}");
    }

    #[test]
    fn poisoned_params_abort_training() {
        let cfg = tiny_cfg();
        let snap = init_random(&cfg, 15).unwrap();
        let mut params = snap.params().to_vec();
        params[0] = f64::NAN;
        let bad = snap.with_params(params);
        let batch = tiny_batch(&cfg, 16);
        assert!(matches!(
            train_step(&bad, &batch),
            Err(NetError::NonFiniteLoss { .. })
        ));
    }

    #[test]
    fn checkpoint_roundtrip() {
        let cfg = tiny_cfg();
        let snap = init_random(&cfg, 21).unwrap();
        let (snap, _) = train_step(&snap, &tiny_batch(&cfg, 22)).unwrap();
        let mut bytes = Vec::new();
        snap.save(&mut bytes).unwrap();
        let loaded = NetworkSnapshot::load(&mut bytes.as_slice()).unwrap();
        assert_eq!(loaded.params(), snap.params());
        assert_eq!(loaded.version(), snap.version());
        let probe = vec![0.0; cfg.input_len()];
        assert_eq!(
            loaded.predict(&probe).unwrap().policy,
            snap.predict(&probe).unwrap().policy
        );

        // Config mismatch rejected.
        let mut other = cfg.clone();
        other.filters = 8;
        assert!(matches!(
            NetworkSnapshot::load_matching(&mut bytes.as_slice(), &other),
            Err(NetError::ConfigMismatch)
        ));

        // Bit flip detected by the checksum.
        let mut corrupt = bytes.clone();
        let mid = corrupt.len() / 2;
        corrupt[mid] ^= 0x40;
        assert!(matches!(
            NetworkSnapshot::load(&mut corrupt.as_slice()),
            Err(NetError::Corrupt(_))
        ));
    }

    #[test]
    fn config_validation() {
        let mut cfg = tiny_cfg();
        cfg.actions = 1;
        assert!(init_random(&cfg, 0).is_err());
        let mut cfg = tiny_cfg();
        cfg.learning_rate = 0.0;
        assert!(cfg.validate().is_err());
    }
}
