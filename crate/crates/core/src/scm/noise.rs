use rand::Rng;
use rand_distr::{Distribution, Exp, LogNormal, Pareto, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Continuous non-Gaussian noise, shifted to mean zero where a mean exists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseDistribution {
    StudentT { df: f64 },
    #[serde(rename = "lognormal")]
    LognormalCentered { mu: f64, sigma: f64 },
    #[serde(rename = "pareto")]
    ParetoCentered { shape: f64, scale: f64 },
    #[serde(rename = "exponential")]
    ExponentialCentered { rate: f64 },
}

impl NoiseDistribution {
    pub fn student_t(df: f64) -> Self {
        Self::StudentT { df }
    }

    pub fn lognormal() -> Self {
        Self::LognormalCentered { mu: 0.0, sigma: 1.0 }
    }

    pub fn pareto() -> Self {
        Self::ParetoCentered {
            shape: 1.5,
            scale: 1.0,
        }
    }

    pub fn exponential() -> Self {
        Self::ExponentialCentered { rate: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        let ok = match *self {
            Self::StudentT { df } => pos(df),
            Self::LognormalCentered { mu, sigma } => mu.is_finite() && pos(sigma),
            Self::ParetoCentered { shape, scale } => shape.is_finite() && shape > 1.0 && pos(scale),
            Self::ExponentialCentered { rate } => pos(rate),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid noise parameters {self:?}")))
        }
    }

    /// Mean of the raw (unshifted) distribution, subtracted from every draw.
    pub fn raw_mean(&self) -> f64 {
        match *self {
            Self::StudentT { .. } => 0.0,
            Self::LognormalCentered { mu, sigma } => (mu + sigma * sigma / 2.0).exp(),
            Self::ParetoCentered { shape, scale } => shape * scale / (shape - 1.0),
            Self::ExponentialCentered { rate } => 1.0 / rate,
        }
    }

    /// One centered draw. Parameters must have passed [`validate`](Self::validate).
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::StudentT { df } => StudentT::new(df).expect("validated").sample(rng),
            Self::LognormalCentered { mu, sigma } => {
                LogNormal::new(mu, sigma).expect("validated").sample(rng) - self.raw_mean()
            }
            Self::ParetoCentered { shape, scale } => {
                Pareto::new(scale, shape).expect("validated").sample(rng) - self.raw_mean()
            }
            Self::ExponentialCentered { rate } => {
                Exp::new(rate).expect("validated").sample(rng) - self.raw_mean()
            }
        }
    }

    /// `n` centered draws.
    pub fn draw_n<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        match *self {
            Self::StudentT { df } => {
                let d = StudentT::new(df).expect("validated");
                (0..n).map(|_| d.sample(rng)).collect()
            }
            _ => (0..n).map(|_| self.draw(rng)).collect(),
        }
    }

    /// Parses the command-line form: `t5`, `t:2.5`, `lognormal[:mu:sigma]`,
    /// `pareto[:shape:scale]`, `exponential[:rate]` (or `exp`).
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("unrecognized noise spec '{spec}'"));
        let parts: Vec<&str> = spec.trim().split(':').collect();
        let nums: Vec<f64> = parts[1..]
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let name = parts[0].to_ascii_lowercase();
        let dist = match (name.as_str(), nums.as_slice()) {
            ("t", [df]) => Self::student_t(*df),
            (t, []) if t.len() > 1 && t.starts_with('t') => {
                Self::student_t(t[1..].parse().map_err(|_| bad())?)
            }
            ("lognormal", []) => Self::lognormal(),
            ("lognormal", [mu, sigma]) => Self::LognormalCentered { mu: *mu, sigma: *sigma },
            ("pareto", []) => Self::pareto(),
            ("pareto", [shape, scale]) => Self::ParetoCentered {
                shape: *shape,
                scale: *scale,
            },
            ("exp" | "exponential", []) => Self::exponential(),
            ("exp" | "exponential", [rate]) => Self::ExponentialCentered { rate: *rate },
            _ => return Err(bad()),
        };
        dist.validate()?;
        Ok(dist)
    }

    /// Short label for reports, e.g. `t1` or `pareto(1.5,1)`.
    pub fn label(&self) -> String {
        match *self {
            Self::StudentT { df } => format!("t{df}"),
            Self::LognormalCentered { mu, sigma } => format!("lognormal({mu},{sigma})"),
            Self::ParetoCentered { shape, scale } => format!("pareto({shape},{scale})"),
            Self::ExponentialCentered { rate } => format!("exponential({rate})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(NoiseDistribution::parse("t1").unwrap(), NoiseDistribution::student_t(1.0));
        assert_eq!(NoiseDistribution::parse("t:2.5").unwrap(), NoiseDistribution::student_t(2.5));
        assert_eq!(NoiseDistribution::parse("pareto").unwrap(), NoiseDistribution::pareto());
        assert_eq!(
            NoiseDistribution::parse("lognormal:0.5:0.25").unwrap(),
            NoiseDistribution::LognormalCentered { mu: 0.5, sigma: 0.25 }
        );
        assert_eq!(NoiseDistribution::parse("exp").unwrap(), NoiseDistribution::exponential());
        assert!(NoiseDistribution::parse("gaussian").is_err());
        assert!(NoiseDistribution::parse("pareto:1.0:1").is_err());
        assert!(NoiseDistribution::parse("t0").is_err());
    }

    #[test]
    fn analytic_means_of_centered_variants_vanish() {
        // E[lognormal(0,1)] = e^{1/2}, E[pareto(1.5,1)] = 3, E[exp(1)] = 1
        assert!((NoiseDistribution::lognormal().raw_mean() - 0.5f64.exp()).abs() < 1e-15);
        assert_eq!(NoiseDistribution::pareto().raw_mean(), 3.0);
        assert_eq!(NoiseDistribution::exponential().raw_mean(), 1.0);
        assert_eq!(NoiseDistribution::student_t(1.0).raw_mean(), 0.0);
    }

    #[test]
    fn json_shape() {
        let s = serde_json::to_string(&NoiseDistribution::pareto()).unwrap();
        assert_eq!(s, r#"{"kind":"pareto","shape":1.5,"scale":1.0}"#);
        let t: NoiseDistribution = serde_json::from_str(r#"{"kind":"student_t","df":5}"#).unwrap();
        assert_eq!(t, NoiseDistribution::student_t(5.0));
    }
}
