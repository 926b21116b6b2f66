//! Recurrent bistable gradient networks.
//!
//! A network of continuous neurons, each with two stable states at ±1, coupled
//! through symmetric weights. The state descends the network energy by Euler
//! integration, so stored patterns act as fixed-point attractors that clean
//! up noisy probes.
//!
//! - [`dynamics`]: energy, drift, Euler steps and relaxation to a fixed point
//! - [`learning`]: Hebbian weights and contrastive-divergence training
//! - [`patterns`]: bipolar patterns, flip noise and pattern generators
//! - [`mnist`]: IDX parsing, image binarization and PGM output

pub mod dynamics;
pub mod error;
pub mod learning;
pub mod mnist;
pub mod patterns;

pub use dynamics::{
    binarize, drift, energy, euler_step, relax, EnergyBreakdown, IntegratorConfig, Relaxation,
    Snapshot, StateVector, WeightMatrix,
};
pub use error::{Error, Result};
pub use learning::{
    cd_train, cd_train_from, cd_update, correlation, enforce_constraints, hebbian_weights,
    init_weights, CorrelationMatrix, TrainConfig, TrainOutcome,
};
pub use patterns::{
    error_rate, flip_noise, overlap_family, random_patterns, BipolarPattern, NoiseSpec,
};
