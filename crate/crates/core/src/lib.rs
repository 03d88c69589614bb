//! Causal ordering discovery for linear non-Gaussian acyclic models.
//!
//! The search follows the DirectLiNGAM loop: find the most exogenous
//! variable, regress it out of the others, repeat on the residuals. Both
//! ingredients are pluggable:
//!
//! * the simple slope used for the residuals ([`slopes`]): OLS, Theil-Sen
//!   or the repeated median;
//! * the dependence measure between a candidate and its residuals
//!   ([`independence`]): kernel mutual information or distance correlation.
//!
//! [`scm`] generates and samples random models, [`discovery`] runs the search
//! and the final (optionally pruned) regression, and [`harness`] drives the
//! simulation experiments exposed by the `rlingam` binary.

pub mod discovery;
pub mod error;
pub mod harness;
pub mod independence;
pub mod rng;
pub mod scm;
pub mod slopes;
mod stats;

pub use discovery::{
    discover, estimate_causal_order, estimate_connection_matrix, independence_statistic,
    prune_adaptive_lasso, DiscoveryConfig, DiscoveryResult,
};
pub use error::{Error, Result};
pub use independence::{DependenceScore, KbiConfig, Measure};
pub use scm::{CausalOrdering, ConnectionMatrix, DataMatrix, NoiseDistribution, ScmSpec};
pub use slopes::{PairedSample, SlopeEstimate, SlopeEstimator};
