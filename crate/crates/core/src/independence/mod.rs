//! Scalar dependence measures between two samples.

mod dcorr;
mod kernel;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use dcorr::{distance_correlation, fast_distance_correlation};
pub use kernel::{kernel_mutual_information, KbiConfig, KernelBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Measure {
    /// Kernel mutual information.
    #[serde(rename = "kbi")]
    Kbi,
    /// Distance correlation.
    #[serde(rename = "dcorr")]
    DCorr,
}

impl Measure {
    pub fn tag(self) -> &'static str {
        match self {
            Self::Kbi => "kbi",
            Self::DCorr => "dcorr",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag.to_ascii_lowercase().as_str() {
            "kbi" | "kernel" => Some(Self::Kbi),
            "dcorr" | "dcor" => Some(Self::DCorr),
            _ => None,
        }
    }
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// A nonnegative dependence value; distance correlation also stays below 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DependenceScore {
    pub value: f64,
    pub measure: Measure,
}

fn check_pair(u: &[f64], v: &[f64], min_len: usize) -> Result<()> {
    if u.len() != v.len() {
        return Err(Error::InvalidInput(format!(
            "length mismatch: {} vs {}",
            u.len(),
            v.len()
        )));
    }
    if u.len() < min_len {
        return Err(Error::InvalidInput(format!("need at least {min_len} observations")));
    }
    if u.iter().chain(v).any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("non-finite value".into()));
    }
    let constant = |w: &[f64]| w.iter().all(|&x| x == w[0]);
    if constant(u) || constant(v) {
        return Err(Error::ConstantInput);
    }
    Ok(())
}
