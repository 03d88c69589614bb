//! The DirectLiNGAM-style search.
//!
//! [`estimate_causal_order`] repeatedly picks the remaining variable that is
//! most independent of its residuals and regresses it out of the rest.
//! [`estimate_connection_matrix`] then fits the fully connected model under
//! the found order, and [`prune_adaptive_lasso`] removes redundant edges.

mod export;
mod lasso;
mod regression;
mod search;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::independence::{KbiConfig, Measure};
use crate::scm::{CausalOrdering, DataMatrix};
use crate::slopes::SlopeEstimator;

pub use crate::scm::ConnectionMatrix;
pub use export::to_dot;
pub use lasso::{default_lambda_grid, prune_adaptive_lasso};
pub use regression::estimate_connection_matrix;
pub use search::{estimate_causal_order, independence_statistic};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaSelection {
    #[default]
    Bic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscoveryConfig {
    pub slope: SlopeEstimator,
    pub measure: Measure,
    /// Kernel settings; `None` picks the sample-size dependent defaults.
    #[serde(default)]
    pub kbi: Option<KbiConfig>,
    #[serde(default = "default_true")]
    pub prune: bool,
    #[serde(default = "default_gamma")]
    pub lasso_gamma: f64,
    /// Penalty grid; `None` uses [`default_lambda_grid`] per response.
    #[serde(default)]
    pub lasso_lambda_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub lambda_selection: LambdaSelection,
}

fn default_true() -> bool {
    true
}

fn default_gamma() -> f64 {
    1.0
}

impl DiscoveryConfig {
    pub fn new(slope: SlopeEstimator, measure: Measure) -> Self {
        Self {
            slope,
            measure,
            kbi: None,
            prune: true,
            lasso_gamma: 1.0,
            lasso_lambda_grid: None,
            lambda_selection: LambdaSelection::Bic,
        }
    }

    /// OLS slopes with the kernel measure.
    pub fn direct_lingam() -> Self {
        Self::new(SlopeEstimator::Ols, Measure::Kbi)
    }

    /// Theil-Sen slopes with the kernel measure.
    pub fn theil_sen() -> Self {
        Self::new(SlopeEstimator::TheilSen, Measure::Kbi)
    }

    pub fn without_pruning(mut self) -> Self {
        self.prune = false;
        self
    }

    /// Method label such as `ts-kbi`.
    pub fn label(&self) -> String {
        format!("{}-{}", self.slope.tag(), self.measure.tag())
    }

    /// Parses `ols-kbi`, `ts-dcorr`, `rm-kbi`, ... ; `direct` and `tslingam`
    /// name the two kernel-based classics.
    pub fn from_label(label: &str) -> Result<Self> {
        let l = label.trim().to_ascii_lowercase();
        match l.as_str() {
            "direct" | "directlingam" => return Ok(Self::direct_lingam()),
            "tslingam" => return Ok(Self::theil_sen()),
            _ => {}
        }
        let bad = || Error::InvalidInput(format!("unknown method '{label}'"));
        let (s, m) = l.split_once(['-', '+']).ok_or_else(bad)?;
        let slope = SlopeEstimator::from_tag(s).ok_or_else(bad)?;
        let measure = Measure::from_tag(m).ok_or_else(bad)?;
        Ok(Self::new(slope, measure))
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(k) = &self.kbi {
            k.validate()?;
        }
        if !(self.lasso_gamma.is_finite() && self.lasso_gamma > 0.0) {
            return Err(Error::InvalidInput("lasso_gamma must be positive".into()));
        }
        if let Some(grid) = &self.lasso_lambda_grid {
            if grid.is_empty() || grid.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
                return Err(Error::InvalidInput("lambda grid must hold positive values".into()));
            }
        }
        Ok(())
    }

    pub(crate) fn kbi_for(&self, n: usize) -> KbiConfig {
        self.kbi.unwrap_or_else(|| KbiConfig::for_sample_size(n))
    }
}

/// Statistic of one candidate in one search round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateScore {
    /// 0-based variable index.
    pub var: usize,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscoveryResult {
    pub ordering: CausalOrdering,
    pub b: ConnectionMatrix,
    /// One entry per round; round `r` scores the `p - r` remaining variables.
    pub statistics: Vec<Vec<CandidateScore>>,
    pub pruned: bool,
    pub config: DiscoveryConfig,
}

/// Order search, full regression and (if configured) pruning, on
/// median-centered data.
pub fn discover(data: &DataMatrix, cfg: &DiscoveryConfig) -> Result<DiscoveryResult> {
    let centered = data.median_centered();
    let (ordering, statistics) = estimate_causal_order(&centered, cfg)?;
    let full = estimate_connection_matrix(&centered, &ordering)?;
    let b = if cfg.prune {
        prune_adaptive_lasso(&centered, &ordering, &full, cfg)?
    } else {
        full
    };
    Ok(DiscoveryResult {
        ordering,
        b,
        statistics,
        pruned: cfg.prune,
        config: cfg.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_labels() {
        for label in ["ols-kbi", "ts-kbi", "rm-kbi", "ols-dcorr", "ts-dcorr", "rm-dcorr"] {
            assert_eq!(DiscoveryConfig::from_label(label).unwrap().label(), label);
        }
        assert_eq!(DiscoveryConfig::from_label("TS+KBI").unwrap().label(), "ts-kbi");
        assert_eq!(DiscoveryConfig::from_label("direct").unwrap().label(), "ols-kbi");
        assert!(DiscoveryConfig::from_label("ts").is_err());
        assert!(DiscoveryConfig::from_label("lasso-kbi").is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = DiscoveryConfig::theil_sen();
        assert!(cfg.validate().is_ok());
        cfg.lasso_lambda_grid = Some(vec![]);
        assert!(cfg.validate().is_err());
        cfg.lasso_lambda_grid = None;
        cfg.lasso_gamma = -1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_json_defaults() {
        let cfg: DiscoveryConfig = serde_json::from_str(r#"{"slope":"rm","measure":"dcorr"}"#).unwrap();
        assert_eq!(cfg, DiscoveryConfig::new(SlopeEstimator::RepeatedMedian, Measure::DCorr));
    }
}
