//! Sample distance correlation (exponent 1, V-statistic form).

use super::{check_pair, DependenceScore, Measure};
use crate::error::{Error, Result};
use crate::stats::cmp_f64;

/// Distance correlation from explicitly double-centered distance matrices.
/// `O(n^2)` time and memory.
pub fn distance_correlation(u: &[f64], v: &[f64]) -> Result<DependenceScore> {
    check_pair(u, v, 2)?;
    let a = centered_distances(u);
    let b = centered_distances(v);
    let nn = (u.len() * u.len()) as f64;
    let dot = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(x, y)| x * y).sum::<f64>() / nn;
    finish(dot(&a, &b), dot(&a, &a), dot(&b, &b))
}

fn centered_distances(u: &[f64]) -> Vec<f64> {
    let n = u.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            d[i * n + j] = (u[i] - u[j]).abs();
        }
    }
    let row_means: Vec<f64> = (0..n)
        .map(|i| d[i * n..(i + 1) * n].iter().sum::<f64>() / n as f64)
        .collect();
    // distance matrices are symmetric, so column means equal row means
    let grand = row_means.iter().sum::<f64>() / n as f64;
    for i in 0..n {
        for j in 0..n {
            d[i * n + j] += grand - row_means[i] - row_means[j];
        }
    }
    d
}

fn finish(dcov2: f64, dvar_u: f64, dvar_v: f64) -> Result<DependenceScore> {
    if dvar_u <= 0.0 || dvar_v <= 0.0 {
        return Err(Error::ConstantInput);
    }
    let dcov2 = dcov2.max(0.0);
    let value = (dcov2 / (dvar_u * dvar_v).sqrt()).sqrt().min(1.0);
    Ok(DependenceScore {
        value,
        measure: Measure::DCorr,
    })
}

/// Same statistic as [`distance_correlation`] in `O(n log n)` time and `O(n)`
/// memory, from the expansion
/// `dCov^2 = S1/n^2 - 2 S2/n^3 + S3/n^4` with `S1 = sum_ij a_ij b_ij`,
/// `S2 = sum_i a_i. b_i.` and `S3 = a.. b..`.
pub fn fast_distance_correlation(u: &[f64], v: &[f64]) -> Result<DependenceScore> {
    check_pair(u, v, 2)?;
    let mu = u.iter().sum::<f64>() / u.len() as f64;
    let mv = v.iter().sum::<f64>() / v.len() as f64;
    let u: Vec<f64> = u.iter().map(|x| x - mu).collect();
    let v: Vec<f64> = v.iter().map(|x| x - mv).collect();
    let ru = RowSums::new(&u);
    let rv = RowSums::new(&v);
    let n = u.len() as f64;
    let combine = |s1: f64, a: &RowSums, b: &RowSums| {
        let s2: f64 = a.sums.iter().zip(&b.sums).map(|(x, y)| x * y).sum();
        s1 / (n * n) - 2.0 * s2 / (n * n * n) + a.total * b.total / (n * n * n * n)
    };
    let dcov2 = combine(cross_sum(&u, &v), &ru, &rv);
    let dvar_u = combine(self_sum(&u), &ru, &ru);
    let dvar_v = combine(self_sum(&v), &rv, &rv);
    finish(dcov2, dvar_u, dvar_v)
}

/// Row sums `a_i. = sum_j |u_i - u_j|` via one sort.
struct RowSums {
    sums: Vec<f64>,
    total: f64,
}

impl RowSums {
    fn new(u: &[f64]) -> Self {
        let n = u.len();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| cmp_f64(&u[a], &u[b]));
        let total_sum: f64 = u.iter().sum();
        let mut sums = vec![0.0; n];
        let mut prefix = 0.0;
        for (k, &i) in idx.iter().enumerate() {
            let x = u[i];
            // k values at or below x precede it, n - k - 1 follow
            let below = k as f64 * x - prefix;
            let above = (total_sum - prefix - x) - (n - k - 1) as f64 * x;
            sums[i] = below + above;
            prefix += x;
        }
        let total = sums.iter().sum();
        Self { sums, total }
    }
}

/// `sum_ij (u_i - u_j)^2`.
fn self_sum(u: &[f64]) -> f64 {
    let n = u.len() as f64;
    let s: f64 = u.iter().sum();
    let s2: f64 = u.iter().map(|x| x * x).sum();
    2.0 * n * s2 - 2.0 * s * s
}

/// Fenwick tree over `k` parallel accumulators.
struct SumTree<const K: usize> {
    tree: Vec<[f64; K]>,
}

impl<const K: usize> SumTree<K> {
    fn new(n: usize) -> Self {
        Self {
            tree: vec![[0.0; K]; n + 1],
        }
    }

    fn add(&mut self, i: usize, val: [f64; K]) {
        let mut k = i + 1;
        while k < self.tree.len() {
            for (t, v) in self.tree[k].iter_mut().zip(val) {
                *t += v;
            }
            k += k & k.wrapping_neg();
        }
    }

    /// Sums over slots `< i`.
    fn prefix(&self, i: usize) -> [f64; K] {
        let mut out = [0.0; K];
        let mut k = i;
        while k > 0 {
            for (o, t) in out.iter_mut().zip(self.tree[k]) {
                *o += t;
            }
            k &= k - 1;
        }
        out
    }
}

/// `sum_ij |u_i - u_j| |v_i - v_j|`.
///
/// Walk the points in increasing `u`; for each point `j`, the earlier points
/// `i` contribute `(u_j - u_i) * sign(v_j - v_i) * (v_j - v_i)`. Splitting the
/// earlier points by whether `v_i` lies below `v_j` turns the sum into four
/// running totals (count, `u`, `v`, `uv`) queried by `v`-rank.
fn cross_sum(u: &[f64], v: &[f64]) -> f64 {
    let n = u.len();
    let mut by_u: Vec<usize> = (0..n).collect();
    by_u.sort_by(|&a, &b| cmp_f64(&u[a], &u[b]));
    let mut by_v: Vec<usize> = (0..n).collect();
    by_v.sort_by(|&a, &b| cmp_f64(&v[a], &v[b]));
    let mut v_rank = vec![0usize; n];
    for (r, &i) in by_v.iter().enumerate() {
        v_rank[i] = r;
    }

    let mut tree = SumTree::<4>::new(n);
    let mut all = [0.0f64; 4];
    let mut acc = 0.0;
    for &j in &by_u {
        let (uj, vj) = (u[j], v[j]);
        // ties in v contribute zero either way
        let [c_lo, u_lo, v_lo, uv_lo] = tree.prefix(v_rank[j]);
        let [c_hi, u_hi, v_hi, uv_hi] = [all[0] - c_lo, all[1] - u_lo, all[2] - v_lo, all[3] - uv_lo];
        // sum over lower v: (uj - ui)(vj - vi)
        let lower = c_lo * uj * vj - uj * v_lo - vj * u_lo + uv_lo;
        // sum over higher v: (uj - ui)(vi - vj)
        let higher = uj * v_hi - c_hi * uj * vj - uv_hi + vj * u_hi;
        acc += lower + higher;
        let entry = [1.0, uj, vj, uj * vj];
        tree.add(v_rank[j], entry);
        for (a, e) in all.iter_mut().zip(entry) {
            *a += e;
        }
    }
    2.0 * acc
}
