use super::regression::{centered, check_ordering};
use super::DiscoveryConfig;
use crate::error::{Error, Result};
use crate::scm::{CausalOrdering, ConnectionMatrix, DataMatrix};

/// Initial coefficients at or below this magnitude are forced to zero.
const ZERO_WEIGHT: f64 = 1e-12;
const TOLERANCE: f64 = 1e-8;
const MAX_SWEEPS: usize = 100_000;
const GRID_LEN: usize = 50;
const GRID_RATIO: f64 = 1e-4;

/// 50 log-spaced penalties from `lambda_max` down to `lambda_max * 1e-4`.
pub fn default_lambda_grid(lambda_max: f64) -> Vec<f64> {
    let step = GRID_RATIO.ln() / (GRID_LEN - 1) as f64;
    (0..GRID_LEN).map(|k| lambda_max * (step * k as f64).exp()).collect()
}

/// Lasso path over a descending grid by cyclic coordinate descent on
/// `(1/2n) |y - X b|^2 + lambda |b|_1`; returns the BIC-optimal coefficients.
fn lasso_bic(x: &[Vec<f64>], y: &[f64], grid: &[f64]) -> Vec<f64> {
    let n = y.len() as f64;
    let k = x.len();
    let sq: Vec<f64> = x.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>() / n).collect();
    let y_scale = (y.iter().map(|v| v * v).sum::<f64>() / n).sqrt().max(f64::MIN_POSITIVE);
    let mut beta = vec![0.0; k];
    let mut resid = y.to_vec();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for &lambda in grid {
        for _ in 0..MAX_SWEEPS {
            let mut max_change: f64 = 0.0;
            for j in 0..k {
                if sq[j] == 0.0 {
                    continue;
                }
                let old = beta[j];
                let rho = x[j].iter().zip(&resid).map(|(a, r)| a * r).sum::<f64>() / n + sq[j] * old;
                let new = soft_threshold(rho, lambda) / sq[j];
                if new != old {
                    let d = new - old;
                    resid.iter_mut().zip(&x[j]).for_each(|(r, a)| *r -= d * a);
                    beta[j] = new;
                    max_change = max_change.max(d.abs() * sq[j].sqrt());
                }
            }
            if max_change <= TOLERANCE * y_scale {
                break;
            }
        }
        let rss = resid.iter().map(|r| r * r).sum::<f64>().max(f64::MIN_POSITIVE);
        let df = beta.iter().filter(|b| **b != 0.0).count() as f64;
        let bic = n * (rss / n).ln() + n.ln() * df;
        if best.as_ref().is_none_or(|(b, _)| bic < *b) {
            best = Some((bic, beta.clone()));
        }
    }
    best.map(|(_, b)| b).unwrap_or(beta)
}

fn soft_threshold(z: f64, lambda: f64) -> f64 {
    if z > lambda {
        z - lambda
    } else if z < -lambda {
        z + lambda
    } else {
        0.0
    }
}

/// Adaptive lasso per response over its predecessors, with weights
/// `1 / |b_init|^gamma` and BIC selection of the penalty.
pub fn prune_adaptive_lasso(
    data: &DataMatrix,
    ordering: &CausalOrdering,
    b_init: &ConnectionMatrix,
    cfg: &DiscoveryConfig,
) -> Result<ConnectionMatrix> {
    check_ordering(data, ordering)?;
    cfg.validate()?;
    let p = data.p();
    if b_init.p() != p {
        return Err(Error::InvalidInput("initial matrix has the wrong size".into()));
    }
    if !b_init.respects(ordering) {
        return Err(Error::InvalidInput("initial matrix does not respect the ordering".into()));
    }
    let n = data.n() as f64;
    let cols: Vec<Vec<f64>> = data.columns().iter().map(|c| centered(c)).collect();
    let mut b = ConnectionMatrix::zeros(p);
    let order = ordering.as_slice();
    for (pos, &child) in order.iter().enumerate().skip(1) {
        let active: Vec<(usize, f64)> = order[..pos]
            .iter()
            .map(|&j| (j, b_init.get(child, j).abs().powf(cfg.lasso_gamma)))
            .filter(|&(j, _)| b_init.get(child, j).abs() > ZERO_WEIGHT)
            .collect();
        if active.is_empty() {
            continue;
        }
        let x: Vec<Vec<f64>> = active
            .iter()
            .map(|&(j, s)| cols[j].iter().map(|v| v * s).collect())
            .collect();
        let y = &cols[child];
        let grid = match &cfg.lasso_lambda_grid {
            Some(g) => {
                let mut g = g.clone();
                g.sort_by(|a, b| b.total_cmp(a));
                g
            }
            None => {
                let lambda_max = x
                    .iter()
                    .map(|c| (c.iter().zip(y).map(|(a, r)| a * r).sum::<f64>() / n).abs())
                    .fold(0.0, f64::max);
                if lambda_max == 0.0 {
                    continue;
                }
                default_lambda_grid(lambda_max)
            }
        };
        let scaled = lasso_bic(&x, y, &grid);
        for (&(j, s), v) in active.iter().zip(scaled) {
            b.set(child, j, v * s);
        }
    }
    Ok(b)
}
