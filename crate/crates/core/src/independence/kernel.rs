//! Kernel generalized variance estimate of mutual information.
//!
//! Each variable is centered at its median, scaled by its normalized MAD (the
//! standard deviation when the MAD is zero) and mapped to a Gaussian-kernel Gram matrix,
//! approximated by a pivoted incomplete Cholesky factor `G` (`K ~ G G^T`).
//! After centering, the eigen-decomposition of `G^T G` gives an orthonormal
//! basis `V` and eigenvalues `l`, so that the regularized operator
//! `K (K + n kappa / 2 I)^-1` is `V diag(d) V^T` with `d = l / (l + n kappa / 2)`.
//! The kernel canonical correlations are the singular values `s` of
//! `diag(d_u) V_u^T V_v diag(d_v)`, and the statistic is
//! `-1/2 sum log(1 - s^2)`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{check_pair, DependenceScore, Measure};
use crate::error::{Error, Result};
use crate::stats::{mean, median};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KbiConfig {
    /// Gaussian kernel bandwidth on robustly standardized data.
    pub kernel_width: f64,
    /// Regularization `kappa`.
    pub regularization: f64,
    /// Incomplete Cholesky stops once the residual trace falls below this.
    pub cholesky_tolerance: f64,
    /// Hard cap on the factor rank.
    pub max_rank: usize,
}

impl KbiConfig {
    pub const DEFAULT_MAX_RANK: usize = 60;

    /// Defaults used for a sample of size `n`: wider kernel and stronger
    /// regularization up to 1000 observations.
    pub fn for_sample_size(n: usize) -> Self {
        let (kernel_width, regularization) = if n <= 1000 { (1.0, 2e-2) } else { (0.5, 2e-3) };
        Self {
            kernel_width,
            regularization,
            cholesky_tolerance: 1e-4 * n as f64,
            max_rank: Self::DEFAULT_MAX_RANK,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if ok(self.kernel_width)
            && ok(self.regularization)
            && ok(self.cholesky_tolerance)
            && self.max_rank > 0
        {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid kernel configuration {self:?}")))
        }
    }
}

/// Spectral summary of one variable's centered, regularized Gram matrix.
#[derive(Debug, Clone)]
pub struct KernelBasis {
    vectors: DMatrix<f64>,
    shrink: Vec<f64>,
}

impl KernelBasis {
    pub fn new(u: &[f64], cfg: &KbiConfig) -> Result<Self> {
        let z = standardize(u)?;
        let n = z.len();
        let g = incomplete_cholesky(&z, cfg.kernel_width, cfg.cholesky_tolerance, cfg.max_rank);
        let mut g = g;
        for mut col in g.column_iter_mut() {
            let m = col.mean();
            col.add_scalar_mut(-m);
        }
        let eig = SymmetricEigen::new(g.transpose() * &g);
        let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
        let keep: Vec<usize> = (0..eig.eigenvalues.len())
            .filter(|&k| eig.eigenvalues[k] > top * 1e-12 && eig.eigenvalues[k] > 0.0)
            .collect();
        let half_reg = n as f64 * cfg.regularization / 2.0;
        let mut basis = DMatrix::zeros(g.ncols(), keep.len());
        let mut shrink = Vec::with_capacity(keep.len());
        for (c, &k) in keep.iter().enumerate() {
            let l = eig.eigenvalues[k];
            basis.set_column(c, &(eig.eigenvectors.column(k) / l.sqrt()));
            shrink.push(l / (l + half_reg));
        }
        Ok(Self {
            vectors: g * basis,
            shrink,
        })
    }

    pub fn rank(&self) -> usize {
        self.shrink.len()
    }

    /// Kernel generalized variance between two bases of the same sample size.
    pub fn mutual_information(&self, other: &KernelBasis) -> f64 {
        if self.rank() == 0 || other.rank() == 0 {
            return 0.0;
        }
        let mut c = self.vectors.transpose() * &other.vectors;
        for (i, di) in self.shrink.iter().enumerate() {
            for (j, dj) in other.shrink.iter().enumerate() {
                c[(i, j)] *= di * dj;
            }
        }
        let sv = c.singular_values();
        let value: f64 = sv
            .iter()
            .map(|s| (1.0 - s * s).max(f64::MIN_POSITIVE).ln())
            .sum::<f64>()
            * -0.5;
        value.max(0.0)
    }
}

fn standardize(u: &[f64]) -> Result<Vec<f64>> {
    let m = median(u);
    let dev: Vec<f64> = u.iter().map(|x| (x - m).abs()).collect();
    let mut s = 1.4826 * median(&dev);
    if !(s > 0.0) {
        let mu = mean(u);
        s = (u.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / u.len() as f64).sqrt();
    }
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::ConstantInput);
    }
    Ok(u.iter().map(|x| (x - m) / s).collect())
}

/// Pivoted incomplete Cholesky factor of the Gaussian Gram matrix of `z`:
/// an `n x r` matrix `G` with `K ~ G G^T`, `r <= max_rank`.
fn incomplete_cholesky(z: &[f64], width: f64, tolerance: f64, max_rank: usize) -> DMatrix<f64> {
    let n = z.len();
    let cap = max_rank.min(n);
    let inv = -0.5 / (width * width);
    // row-major n x cap storage
    let mut g = vec![0.0; n * cap];
    let mut diag = vec![1.0; n];
    let mut pivoted = vec![false; n];
    let mut rank = 0;
    while rank < cap {
        let (residual, pivot) = diag
            .iter()
            .enumerate()
            .filter(|&(i, _)| !pivoted[i])
            .fold((0.0, usize::MAX), |(sum, best), (i, &d)| {
                let best = if best == usize::MAX || d > diag[best] { i } else { best };
                (sum + d, best)
            });
        if pivot == usize::MAX || residual <= tolerance || diag[pivot] <= 0.0 {
            break;
        }
        let k = rank;
        let root = diag[pivot].sqrt();
        pivoted[pivot] = true;
        g[pivot * cap + k] = root;
        diag[pivot] = 0.0;
        let zp = z[pivot];
        for j in 0..n {
            if pivoted[j] {
                continue;
            }
            let dz = z[j] - zp;
            let kernel = (inv * dz * dz).exp();
            let dot: f64 = (0..k).map(|l| g[j * cap + l] * g[pivot * cap + l]).sum();
            let val = (kernel - dot) / root;
            g[j * cap + k] = val;
            diag[j] = (diag[j] - val * val).max(0.0);
        }
        rank += 1;
    }
    DMatrix::from_fn(n, rank, |i, k| g[i * cap + k])
}

/// Kernel mutual information between `u` and `v`.
pub fn kernel_mutual_information(u: &[f64], v: &[f64], cfg: &KbiConfig) -> Result<DependenceScore> {
    check_pair(u, v, 3)?;
    cfg.validate()?;
    let a = KernelBasis::new(u, cfg)?;
    let b = KernelBasis::new(v, cfg)?;
    Ok(DependenceScore {
        value: a.mutual_information(&b),
        measure: Measure::Kbi,
    })
}
