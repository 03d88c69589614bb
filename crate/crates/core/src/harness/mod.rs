//! Experiment drivers: random-model simulation, the bivariate outlier grid
//! and the timing benchmark, plus their reports.

mod experiments;
mod report;

use serde::{Deserialize, Serialize};

use crate::discovery::DiscoveryConfig;
use crate::error::{Error, Result};
use crate::scm::NoiseDistribution;

pub use experiments::{benchmark, run_outlier_grid, run_simulation, OUTLIER_ROW};
pub use report::{CellResult, ExperimentKind, ExperimentReport, TimingRatio};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSettings {
    pub p: usize,
    pub sample_sizes: Vec<usize>,
    /// Edge probability of the random DAG.
    pub q: f64,
    pub noise: NoiseDistribution,
    pub methods: Vec<DiscoveryConfig>,
    pub replications: usize,
    pub master_seed: u64,
}

impl SimulationSettings {
    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::InvalidInput("p must be positive".into()));
        }
        if self.replications == 0 {
            return Err(Error::InvalidInput("replications must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.q) {
            return Err(Error::InvalidInput("q must lie in [0, 1]".into()));
        }
        let min_n = (self.p + 1).max(3);
        if let Some(n) = self.sample_sizes.iter().find(|&&n| n < min_n) {
            return Err(Error::InvalidInput(format!("sample size {n} is below {min_n}")));
        }
        self.noise.validate()?;
        self.methods.iter().try_for_each(DiscoveryConfig::validate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierGridSettings {
    pub n: usize,
    /// Exponents `i` of the outlier magnitudes `2^i`, each in `0..=10`.
    pub exponents: Vec<u32>,
    pub methods: Vec<DiscoveryConfig>,
    pub replications: usize,
    pub base_seed: u64,
    pub noise: NoiseDistribution,
}

impl OutlierGridSettings {
    /// Chain with t5 noise.
    pub fn new(n: usize, exponents: Vec<u32>, methods: Vec<DiscoveryConfig>, replications: usize, base_seed: u64) -> Self {
        Self {
            n,
            exponents,
            methods,
            replications,
            base_seed,
            noise: NoiseDistribution::student_t(5.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::InvalidInput("n must be at least 3".into()));
        }
        if self.replications == 0 {
            return Err(Error::InvalidInput("replications must be at least 1".into()));
        }
        if let Some(e) = self.exponents.iter().find(|&&e| e > 10) {
            return Err(Error::InvalidInput(format!("exponent {e} outside 0..=10")));
        }
        self.noise.validate()?;
        self.methods.iter().try_for_each(DiscoveryConfig::validate)
    }
}

/// Runs `f` on a dedicated pool of `threads` workers (all cores when 0).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
