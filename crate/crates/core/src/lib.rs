//! Simulation of a restricted Boltzmann machine trained with contrastive
//! divergence on differential phase-change-memory synapses.
//!
//! The crate is organized bottom-up:
//!
//! - [`device`]: a single PCM cell with gradual, saturating partial-SET.
//! - [`crossbar`]: pairs of cells mapped to signed weights.
//! - [`rbm`]: the RBM and its CD-k trainers (sign-only on hardware, full
//!   gradient on ideal weights).
//! - [`analysis`]: exact enumeration, AIS, and missing-pixel inference.
//! - [`datasets`]: 3x3 bars and stripes.
//! - [`energy`]: per-epoch energy ledger and analytical comparisons.
//! - [`experiments`]: multi-trial drivers writing CSV output.

pub mod analysis;
pub mod config;
pub mod crossbar;
pub mod datasets;
pub mod device;
pub mod energy;
pub mod error;
pub mod experiments;
pub mod rbm;
pub mod seed;

pub use analysis::{
    ais_log_z, exact_distribution, infer_missing_pixels, kl_divergence, recovery_error_rate, recovery_scores,
    AisConfig, Inference, ModelDistribution, RecoveryScore,
};
pub use config::ExperimentConfig;
pub use crossbar::{ArrayOptions, Direction, SynapseArray, WeightMatrix};
pub use datasets::{enumerate_distinct, make_training_set, sample_bars_stripes, DataSet, DatasetMode, Pattern};
pub use device::{DeviceParams, PcmCell};
pub use energy::{EnergyLedger, EnergyPreset};
pub use error::{Error, Result};
pub use rbm::{CdStats, HiddenStatistic, RbmModel, TrainConfig};
