//! Single-regressor, intercept-free slope estimators.
//!
//! All estimators regress `y` on `x`. Theil-Sen and the repeated median are
//! built from the pairwise slopes `(y_j - y_i) / (x_j - x_i)`; pairs with
//! `x_i == x_j` are skipped. Even-sized medians average the two middle order
//! statistics.

mod fast;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::StreamRng;
use crate::stats::{mean, median_in_place};

pub use fast::theil_sen_slope_fast;

/// Sample size from which [`SlopeEstimator::estimate`] switches Theil-Sen to
/// the randomized selection path.
pub const FAST_THEIL_SEN_MIN_N: usize = 1000;

/// Borrowed `(x, y)` pairs with validated shape.
#[derive(Debug, Clone, Copy)]
pub struct PairedSample<'a> {
    x: &'a [f64],
    y: &'a [f64],
}

impl<'a> PairedSample<'a> {
    pub fn new(x: &'a [f64], y: &'a [f64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidInput(format!(
                "x has {} values but y has {}",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::InvalidInput("need at least two pairs".into()));
        }
        if x.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite value in sample".into()));
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &'a [f64] {
        self.x
    }

    pub fn y(&self) -> &'a [f64] {
        self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SlopeEstimator {
    #[serde(rename = "ols")]
    Ols,
    #[serde(rename = "ts")]
    TheilSen,
    #[serde(rename = "rm")]
    RepeatedMedian,
}

impl SlopeEstimator {
    pub const ALL: [SlopeEstimator; 3] = [Self::Ols, Self::TheilSen, Self::RepeatedMedian];

    /// Short tag used on the command line and in reports.
    pub fn tag(self) -> &'static str {
        match self {
            Self::Ols => "ols",
            Self::TheilSen => "ts",
            Self::RepeatedMedian => "rm",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag.to_ascii_lowercase().as_str() {
            "ols" => Some(Self::Ols),
            "ts" | "theilsen" | "theil-sen" => Some(Self::TheilSen),
            "rm" | "repeatedmedian" | "repeated-median" => Some(Self::RepeatedMedian),
            _ => None,
        }
    }

    /// Slope of `y` on `x`. Large Theil-Sen problems go through the randomized
    /// selection path with a generator seeded from the sample size, so the
    /// result is a pure function of the input.
    pub fn estimate(self, sample: &PairedSample<'_>) -> Result<SlopeEstimate> {
        match self {
            Self::Ols => ols_slope(sample),
            Self::TheilSen if sample.len() >= FAST_THEIL_SEN_MIN_N => {
                let mut rng = StreamRng::seed_from_u64(sample.len() as u64);
                theil_sen_slope_fast(sample, &mut rng)
            }
            Self::TheilSen => theil_sen_slope(sample),
            Self::RepeatedMedian => repeated_median_slope(sample),
        }
    }
}

impl std::fmt::Display for SlopeEstimator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeEstimate {
    pub value: f64,
    pub estimator: SlopeEstimator,
    /// Number of pairs with distinct `x` (Theil-Sen only, 0 otherwise).
    pub n_pairs_used: usize,
}

fn all_equal(values: &[f64]) -> bool {
    values.iter().all(|&v| v == values[0])
}

/// Least-squares slope `cov(x, y) / var(x)`.
pub fn ols_slope(sample: &PairedSample<'_>) -> Result<SlopeEstimate> {
    let (x, y) = (sample.x, sample.y);
    if all_equal(x) {
        return Err(Error::ConstantPredictor);
    }
    let mx = mean(x);
    let my = mean(y);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mx;
        sxy += dx * (yi - my);
        sxx += dx * dx;
    }
    if sxx == 0.0 {
        return Err(Error::ConstantPredictor);
    }
    Ok(SlopeEstimate {
        value: sxy / sxx,
        estimator: SlopeEstimator::Ols,
        n_pairs_used: 0,
    })
}

/// Median of all pairwise slopes, by explicit enumeration.
pub fn theil_sen_slope(sample: &PairedSample<'_>) -> Result<SlopeEstimate> {
    let (x, y) = (sample.x, sample.y);
    let n = x.len();
    let mut slopes = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            if x[j] != x[i] {
                slopes.push((y[j] - y[i]) / (x[j] - x[i]));
            }
        }
    }
    if slopes.is_empty() {
        return Err(Error::ConstantPredictor);
    }
    let used = slopes.len();
    Ok(SlopeEstimate {
        value: median_in_place(&mut slopes),
        estimator: SlopeEstimator::TheilSen,
        n_pairs_used: used,
    })
}

/// Siegel's repeated median: median over points of the median slope through
/// that point.
pub fn repeated_median_slope(sample: &PairedSample<'_>) -> Result<SlopeEstimate> {
    let (x, y) = (sample.x, sample.y);
    let n = x.len();
    let mut inner = Vec::with_capacity(n - 1);
    let mut outer = Vec::with_capacity(n);
    for i in 0..n {
        inner.clear();
        inner.extend(
            (0..n)
                .filter(|&j| j != i && x[j] != x[i])
                .map(|j| (y[i] - y[j]) / (x[i] - x[j])),
        );
        if inner.is_empty() {
            return Err(Error::ConstantPredictor);
        }
        outer.push(median_in_place(&mut inner));
    }
    Ok(SlopeEstimate {
        value: median_in_place(&mut outer),
        estimator: SlopeEstimator::RepeatedMedian,
        n_pairs_used: 0,
    })
}

/// `target - slope * regressor` for each target, where the slope regresses the
/// target on `regressor`. No intercept is fitted.
pub fn residuals<T: AsRef<[f64]>>(
    regressor: &[f64],
    targets: &[T],
    estimator: SlopeEstimator,
) -> Result<Vec<Vec<f64>>> {
    targets
        .iter()
        .map(|t| residual(regressor, t.as_ref(), estimator))
        .collect()
}

pub fn residual(regressor: &[f64], target: &[f64], estimator: SlopeEstimator) -> Result<Vec<f64>> {
    let sample = PairedSample::new(regressor, target)?;
    let beta = estimator.estimate(&sample)?.value;
    Ok(target
        .iter()
        .zip(regressor)
        .map(|(t, r)| t - beta * r)
        .collect())
}
