//! Weight learning: the one-shot Hebbian rule and contrastive divergence.
//!
//! Contrastive divergence of order `n` clamps the network to a pattern,
//! records the pairwise products `x_i x_j`, lets the dynamics run `n` Euler
//! steps and records the products again. The weights move by the learning
//! rate times the difference. A pattern that is already a fixed point leaves
//! the weights untouched.

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{euler_step, StateVector, WeightMatrix};
use crate::error::{ensure_dims, Error, Result};
use crate::patterns::BipolarPattern;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    /// Number of Euler steps between the clamped and the free phase.
    pub cd_order: usize,
    /// Hebbian scale factor.
    pub hebb_beta: f64,
    /// Initial weights are drawn uniformly from `[-init_scale, init_scale]`.
    pub init_scale: f64,
    pub rng_seed: u64,
    pub cd_step_size: f64,
    /// Ends training early once an epoch's largest weight change drops below
    /// this value. `None` always runs the full epoch budget.
    pub stop_threshold: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            epochs: 50,
            cd_order: 1,
            hebb_beta: 1.0,
            init_scale: 0.01,
            rng_seed: 0,
            cd_step_size: 0.1,
            stop_threshold: None,
        }
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be positive, got {v}"),
        })
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        positive("learning_rate", self.learning_rate)?;
        positive("hebb_beta", self.hebb_beta)?;
        positive("init_scale", self.init_scale)?;
        positive("cd_step_size", self.cd_step_size)?;
        if self.epochs == 0 {
            return Err(Error::InvalidParameter {
                name: "epochs",
                reason: "must be at least 1".into(),
            });
        }
        if self.cd_order == 0 {
            return Err(Error::InvalidParameter {
                name: "cd_order",
                reason: "must be at least 1".into(),
            });
        }
        if let Some(t) = self.stop_threshold {
            if t.is_nan() || t < 0.0 {
                return Err(Error::InvalidParameter {
                    name: "stop_threshold",
                    reason: format!("must be non-negative, got {t}"),
                });
            }
        }
        Ok(())
    }
}

/// Pairwise products `x_i x_j` of one state, diagonal included.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl CorrelationMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }
}

pub fn correlation(state: &StateVector) -> CorrelationMatrix {
    let x = state.as_slice();
    let size = x.len();
    let mut entries = Vec::with_capacity(size * size);
    for &a in x {
        entries.extend(x.iter().map(|&b| a * b));
    }
    CorrelationMatrix { size, entries }
}

/// Symmetric random weights in `[-scale, scale]` with a zero diagonal.
///
/// The upper triangle is filled row by row from a ChaCha8 stream seeded with
/// `seed` and mirrored below the diagonal.
pub fn init_weights(n_neurons: usize, scale: f64, seed: u64) -> Result<WeightMatrix> {
    if n_neurons == 0 {
        return Err(Error::InvalidParameter {
            name: "n_neurons",
            reason: "must be at least 1".into(),
        });
    }
    positive("init_scale", scale)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Uniform::new_inclusive(-scale, scale);
    let mut entries = vec![0.0; n_neurons * n_neurons];
    for i in 0..n_neurons {
        for j in i + 1..n_neurons {
            let w = dist.sample(&mut rng);
            entries[i * n_neurons + j] = w;
            entries[j * n_neurons + i] = w;
        }
    }
    Ok(WeightMatrix::from_trusted(n_neurons, entries))
}

fn common_len(patterns: &[BipolarPattern]) -> Result<usize> {
    let first = patterns.first().ok_or(Error::EmptyPatterns)?;
    let n = first.len();
    for p in patterns {
        ensure_dims(n, p.len())?;
    }
    Ok(n)
}

/// Hebbian weights `w_ij = β/p Σ_k x_i(k) x_j(k)` with the diagonal cleared.
pub fn hebbian_weights(patterns: &[BipolarPattern], beta: f64) -> Result<WeightMatrix> {
    let n = common_len(patterns)?;
    positive("beta", beta)?;
    // Integer accumulation keeps the sum exact and independent of order.
    let mut sums = vec![0i64; n * n];
    for p in patterns {
        let v = p.values();
        for i in 0..n {
            let row = &mut sums[i * n..(i + 1) * n];
            let vi = i64::from(v[i]);
            for (s, &vj) in row.iter_mut().zip(v) {
                *s += vi * i64::from(vj);
            }
        }
    }
    let scale = beta / patterns.len() as f64;
    let mut entries: Vec<f64> = sums.into_iter().map(|s| scale * s as f64).collect();
    for i in 0..n {
        entries[i * n + i] = 0.0;
    }
    Ok(WeightMatrix::from_trusted(n, entries))
}

fn symmetrize_in_place(size: usize, m: &mut [f64]) {
    for i in 0..size {
        m[i * size + i] = 0.0;
        for j in i + 1..size {
            let avg = 0.5 * (m[i * size + j] + m[j * size + i]);
            m[i * size + j] = avg;
            m[j * size + i] = avg;
        }
    }
}

/// Replaces a raw square matrix by `(M + Mᵀ)/2` with the diagonal zeroed.
pub fn enforce_constraints(raw: &[Vec<f64>]) -> Result<WeightMatrix> {
    let size = raw.len();
    if let Some(bad) = raw.iter().find(|r| r.len() != size) {
        return Err(Error::NotSquare {
            rows: size,
            cols: bad.len(),
        });
    }
    let mut entries = raw.concat();
    symmetrize_in_place(size, &mut entries);
    if entries.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidWeights("non-finite entry".into()));
    }
    Ok(WeightMatrix::from_trusted(size, entries))
}

/// One contrastive-divergence step on a single pattern.
///
/// Returns the new weights and the largest absolute off-diagonal change.
pub fn cd_update(
    weights: &WeightMatrix,
    pattern: &BipolarPattern,
    cfg: &TrainConfig,
) -> Result<(WeightMatrix, f64)> {
    let n = weights.size();
    ensure_dims(n, pattern.len())?;

    let clamped = StateVector::from(pattern);
    let mut free = clamped.clone();
    for _ in 0..cfg.cd_order {
        free = euler_step(&free, weights, cfg.cd_step_size)?;
    }
    let c0 = correlation(&clamped);
    let cn = correlation(&free);

    let eta = cfg.learning_rate;
    let mut entries: Vec<f64> = weights
        .as_slice()
        .iter()
        .zip(c0.as_slice().iter().zip(cn.as_slice()))
        .map(|(w, (a, b))| w + eta * (a - b))
        .collect();
    symmetrize_in_place(n, &mut entries);
    if entries.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidWeights(
            "update produced a non-finite weight".into(),
        ));
    }

    let delta = entries
        .iter()
        .zip(weights.as_slice())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok((WeightMatrix::from_trusted(n, entries), delta))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub weights: WeightMatrix,
    /// Largest weight change seen in each completed epoch.
    pub history: Vec<f64>,
}

/// Trains from `init_weights(N, init_scale, rng_seed)`, presenting the
/// patterns in order once per epoch.
pub fn cd_train(patterns: &[BipolarPattern], cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    let n = common_len(patterns)?;
    let initial = init_weights(n, cfg.init_scale, cfg.rng_seed)?;
    cd_train_from(initial, patterns, cfg)
}

/// Same as [`cd_train`] but starting from caller-supplied weights.
pub fn cd_train_from(
    initial: WeightMatrix,
    patterns: &[BipolarPattern],
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    let n = common_len(patterns)?;
    ensure_dims(initial.size(), n)?;

    let mut weights = initial;
    let mut history = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        let mut epoch_max = 0.0f64;
        for p in patterns {
            let (next, delta) = cd_update(&weights, p, cfg)?;
            weights = next;
            epoch_max = epoch_max.max(delta);
        }
        history.push(epoch_max);
        if cfg.stop_threshold.is_some_and(|t| epoch_max < t) {
            break;
        }
    }
    Ok(TrainOutcome { weights, history })
}
