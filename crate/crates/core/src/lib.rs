//! Fairness and diversity auditing for deep ensembles.
//!
//! The crate reads per-member predicted probabilities for binary tasks with a
//! binary protected attribute, and measures how ensembling changes accuracy,
//! group fairness gaps, predictive diversity, and calibration. It also fits
//! group-dependent randomized thresholds under relaxed fairness constraints.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the common `f64` instantiations.

pub mod calibration;
pub mod chart;
pub mod cli;
pub mod data;
pub mod diversity;
pub mod ensemble;
pub mod error;
pub mod metrics;
pub mod postprocess;
pub mod rng;
pub mod scalar;
pub mod stats;
pub mod synthetic;

pub use data::{EnsembleWeights, Format, LabeledPredictions, RunManifest, RunSet, ValidationSummary};
pub use error::{Error, Result};
pub use metrics::{FairnessReport, Metric};
pub use scalar::Scalar;

pub type LabeledPredictionsF64 = LabeledPredictions<f64>;
pub type LabeledPredictionsF32 = LabeledPredictions<f32>;
pub type RunSetF64 = RunSet<f64>;
pub type RunSetF32 = RunSet<f32>;
pub type EnsembleWeightsF64 = EnsembleWeights<f64>;
pub type FairnessReportF64 = FairnessReport<f64>;
pub type FairnessReportF32 = FairnessReport<f32>;
pub type DiversityTableF64 = diversity::DiversityTable<f64>;
pub use synthetic::{generate_synthetic, SyntheticConfig};
