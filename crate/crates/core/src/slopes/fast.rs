//! Randomized slope selection for Theil-Sen in `O(n log n)` expected time.
//!
//! For a threshold `t`, the pair `(a, b)` has slope `<= t` exactly when its
//! orientation under the key `y - t x` differs from its orientation under `x`.
//! So the number of pairwise slopes inside an interval `(lo, hi]` is the number
//! of inversions between the point orderings at `lo` and at `hi`, which a
//! Fenwick tree counts in `O(n log n)`. The search keeps an interval that
//! contains the target rank, shrinks it around order statistics of a random
//! sample of the slopes inside it, and enumerates the interval once it holds
//! `O(n)` slopes.
//!
//! Secondary sort keys make the orderings total: slopes equal to a bound land
//! on the correct side, and pairs with tied `x` never count as inversions.

use std::cmp::Ordering;

use rand::Rng;

use super::{theil_sen_slope, PairedSample, SlopeEstimate, SlopeEstimator};
use crate::error::{Error, Result};
use crate::stats::{cmp_f64, midpoint};

const MAX_ROUNDS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Bound {
    NegInf,
    At(f64),
    PosInf,
}

/// Which side of a threshold a key orders for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    /// Lower end of `(t, ..`, or inclusive upper end `.., t]`.
    Closed,
    /// Exclusive upper end `.., t)`.
    Open,
}

type Key = (f64, f64, f64);

fn key(bound: Bound, side: Side, x: f64, y: f64) -> Key {
    match bound {
        Bound::NegInf => (x, y, 0.0),
        Bound::PosInf => (-x, y, 0.0),
        Bound::At(t) => match side {
            Side::Closed => (y - t * x, -x, y),
            Side::Open => (y - t * x, x, y),
        },
    }
}

fn cmp_key(a: &Key, b: &Key) -> Ordering {
    cmp_f64(&a.0, &b.0)
        .then_with(|| cmp_f64(&a.1, &b.1))
        .then_with(|| cmp_f64(&a.2, &b.2))
}

struct Fenwick {
    tree: Vec<u32>,
    log: usize,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        let mut log = 1;
        while (1usize << log) <= n {
            log += 1;
        }
        Self {
            tree: vec![0; n + 1],
            log,
        }
    }

    /// Marks 0-based slot `i`.
    fn insert(&mut self, i: usize) {
        let mut k = i + 1;
        while k < self.tree.len() {
            self.tree[k] += 1;
            k += k & k.wrapping_neg();
        }
    }

    /// Number of marked slots `< i`.
    fn count_below(&self, i: usize) -> usize {
        let mut k = i;
        let mut total = 0usize;
        while k > 0 {
            total += self.tree[k] as usize;
            k &= k - 1;
        }
        total
    }

    /// 0-based slot of the `r`-th marked slot (`r` is 1-based).
    fn kth(&self, mut r: usize) -> usize {
        let mut pos = 0usize;
        for step in (0..self.log).rev() {
            let next = pos + (1 << step);
            if next < self.tree.len() && (self.tree[next] as usize) < r {
                pos = next;
                r -= self.tree[next] as usize;
            }
        }
        pos
    }
}

/// Points ordered at the lower bound, with their rank at the upper bound.
struct Inversions {
    /// `order[p]` is the point at position `p` of the lower ordering.
    order: Vec<usize>,
    /// `upper_rank[p]` is the upper-ordering rank of `order[p]`.
    upper_rank: Vec<usize>,
    /// `point_at_rank[r]` is the point with upper rank `r`.
    point_at_rank: Vec<usize>,
}

impl Inversions {
    fn new(x: &[f64], y: &[f64], lo: Bound, hi: Bound, hi_side: Side) -> Self {
        let n = x.len();
        let lo_keys: Vec<Key> = (0..n).map(|i| key(lo, Side::Closed, x[i], y[i])).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| cmp_key(&lo_keys[a], &lo_keys[b]).then(a.cmp(&b)));

        let hi_keys: Vec<Key> = order.iter().map(|&i| key(hi, hi_side, x[i], y[i])).collect();
        // ties at the upper bound keep the lower order, so identical points
        // never form an inversion
        let mut by_hi: Vec<usize> = (0..n).collect();
        by_hi.sort_by(|&a, &b| cmp_key(&hi_keys[a], &hi_keys[b]).then(a.cmp(&b)));
        let mut upper_rank = vec![0; n];
        let mut point_at_rank = vec![0; n];
        for (rank, &pos) in by_hi.iter().enumerate() {
            upper_rank[pos] = rank;
            point_at_rank[rank] = order[pos];
        }
        Self {
            order,
            upper_rank,
            point_at_rank,
        }
    }

    /// For each lower position, the number of earlier points ranked above it
    /// at the upper bound.
    fn per_position(&self) -> Vec<usize> {
        let n = self.order.len();
        let mut fw = Fenwick::new(n);
        let mut counts = Vec::with_capacity(n);
        for (seen, &rank) in self.upper_rank.iter().enumerate() {
            counts.push(seen - fw.count_below(rank + 1));
            fw.insert(rank);
        }
        counts
    }

    fn total(&self) -> usize {
        self.per_position().iter().sum()
    }

    /// Visits the requested inversions. `requests` holds `(position, offset)`
    /// sorted by position, with `offset` below that position's count.
    fn resolve(&self, requests: &[(usize, usize)], mut visit: impl FnMut(usize, usize)) {
        let n = self.order.len();
        let mut fw = Fenwick::new(n);
        let mut next = 0;
        for (pos, &rank) in self.upper_rank.iter().enumerate() {
            while next < requests.len() && requests[next].0 == pos {
                let below = fw.count_below(rank + 1);
                let partner_rank = fw.kth(below + 1 + requests[next].1);
                visit(self.point_at_rank[partner_rank], self.order[pos]);
                next += 1;
            }
            fw.insert(rank);
        }
    }
}

struct Selector<'a> {
    x: &'a [f64],
    y: &'a [f64],
}

impl Selector<'_> {
    fn slope(&self, a: usize, b: usize) -> f64 {
        (self.y[b] - self.y[a]) / (self.x[b] - self.x[a])
    }

    fn count(&self, lo: Bound, hi: Bound, side: Side) -> usize {
        Inversions::new(self.x, self.y, lo, hi, side).total()
    }

    /// `m` slopes drawn uniformly (with replacement) from `(lo, hi]`.
    fn sample<R: Rng + ?Sized>(&self, lo: Bound, hi: Bound, m: usize, rng: &mut R) -> Vec<f64> {
        let inv = Inversions::new(self.x, self.y, lo, hi, Side::Closed);
        let counts = inv.per_position();
        let mut cumulative = Vec::with_capacity(counts.len());
        let mut acc = 0usize;
        for &c in &counts {
            acc += c;
            cumulative.push(acc);
        }
        if acc == 0 {
            return Vec::new();
        }
        let mut requests: Vec<(usize, usize)> = (0..m)
            .map(|_| {
                let r = rng.random_range(0..acc);
                let pos = cumulative.partition_point(|&c| c <= r);
                let before = if pos == 0 { 0 } else { cumulative[pos - 1] };
                (pos, r - before)
            })
            .collect();
        requests.sort_unstable();
        let mut out = Vec::with_capacity(m);
        inv.resolve(&requests, |a, b| out.push(self.slope(a, b)));
        out
    }

    fn enumerate(&self, lo: Bound, hi: Bound) -> Vec<f64> {
        let inv = Inversions::new(self.x, self.y, lo, hi, Side::Closed);
        let counts = inv.per_position();
        let requests: Vec<(usize, usize)> = counts
            .iter()
            .enumerate()
            .flat_map(|(pos, &c)| (0..c).map(move |o| (pos, o)))
            .collect();
        let mut out = Vec::with_capacity(requests.len());
        inv.resolve(&requests, |a, b| out.push(self.slope(a, b)));
        out
    }

    /// The `k`-th smallest pairwise slope (1-based) out of `total`, or `None`
    /// when the search could not make progress.
    fn select<R: Rng + ?Sized>(&self, k: usize, total: usize, rng: &mut R) -> Option<f64> {
        let n = self.x.len();
        let enumerate_below = (2 * n).max(64);
        let mut lo = Bound::NegInf;
        let mut hi = Bound::PosInf;
        let mut below = 0usize; // slopes <= lo
        let mut inside = total; // slopes in (lo, hi]

        for _ in 0..MAX_ROUNDS {
            if inside <= enumerate_below {
                let mut slopes = self.enumerate(lo, hi);
                if slopes.len() != inside || k <= below || k - below > slopes.len() {
                    return None;
                }
                let idx = k - below - 1;
                let (_, v, _) = slopes.select_nth_unstable_by(idx, cmp_f64);
                return Some(*v);
            }

            let m = n.min(inside);
            let mut sample = self.sample(lo, hi, m, rng);
            if sample.is_empty() {
                return None;
            }
            sample.sort_unstable_by(cmp_f64);
            let m = sample.len();
            let target = (k - below) as f64 / inside as f64 * m as f64;
            let spread = 1.5 * (m as f64).sqrt();
            let ia = (target - spread).floor();
            let ib = (target + spread).ceil();
            let new_lo = if ia >= 0.0 {
                Bound::At(sample[ia as usize])
            } else {
                lo
            };
            let new_hi = if (ib as usize) < m {
                Bound::At(sample[ib as usize])
            } else {
                hi
            };

            // `c_low`: slopes in (lo, new_lo], `c_mid`: slopes in (new_lo, new_hi]
            let c_low = if new_lo == lo {
                0
            } else {
                self.count(lo, new_lo, Side::Closed)
            };
            let rank = k - below;
            if let (Bound::At(t), true) = (new_lo, c_low > 0) {
                let strictly_below = self.count(lo, new_lo, Side::Open);
                if strictly_below < rank && rank <= c_low {
                    return Some(t);
                }
            }
            if rank <= c_low {
                hi = new_lo;
                inside = c_low;
                continue;
            }
            let c_mid = self.count(new_lo, new_hi, Side::Closed);
            if rank <= c_low + c_mid {
                if let Bound::At(t) = new_hi {
                    let strictly_below = self.count(new_lo, new_hi, Side::Open);
                    if c_low + strictly_below < rank {
                        return Some(t);
                    }
                }
                lo = new_lo;
                hi = new_hi;
                below += c_low;
                inside = c_mid;
            } else {
                lo = new_hi;
                below += c_low + c_mid;
                inside -= c_low + c_mid;
            }
        }
        None
    }
}

/// Theil-Sen slope by randomized selection over the implicit pairwise slopes.
///
/// Agrees with [`theil_sen_slope`](super::theil_sen_slope). The generator
/// only steers pivot choice; it does not affect the result.
pub fn theil_sen_slope_fast<R: Rng + ?Sized>(
    sample: &PairedSample<'_>,
    rng: &mut R,
) -> Result<SlopeEstimate> {
    let (x, y) = (sample.x(), sample.y());
    let n = x.len();
    let total_pairs = n * (n - 1) / 2;
    let mut sorted_x = x.to_vec();
    sorted_x.sort_unstable_by(cmp_f64);
    let mut tied = 0usize;
    let mut run = 1usize;
    for w in sorted_x.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            tied += run * (run - 1) / 2;
            run = 1;
        }
    }
    tied += run * (run - 1) / 2;
    let total = total_pairs - tied;
    if total == 0 {
        return Err(Error::ConstantPredictor);
    }
    if n < 8 {
        return theil_sen_slope(sample);
    }

    let selector = Selector { x, y };
    let value = if total % 2 == 1 {
        selector.select(total / 2 + 1, total, rng)
    } else {
        selector
            .select(total / 2, total, rng)
            .zip(selector.select(total / 2 + 1, total, rng))
            .map(|(a, b)| midpoint(a, b))
    };
    match value {
        Some(value) => Ok(SlopeEstimate {
            value,
            estimator: SlopeEstimator::TheilSen,
            n_pairs_used: total,
        }),
        None => theil_sen_slope(sample),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand_distr::{Distribution, StandardNormal};

    fn naive(x: &[f64], y: &[f64]) -> f64 {
        theil_sen_slope(&PairedSample::new(x, y).unwrap()).unwrap().value
    }

    fn fast(x: &[f64], y: &[f64], seed: u64) -> f64 {
        let mut rng = stream(seed, 0);
        theil_sen_slope_fast(&PairedSample::new(x, y).unwrap(), &mut rng)
            .unwrap()
            .value
    }

    #[test]
    fn counts_match_brute_force() {
        let mut rng = stream(11, 0);
        let n = 40;
        let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let y: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let sel = Selector { x: &x, y: &y };
        let slopes: Vec<f64> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| (y[j] - y[i]) / (x[j] - x[i]))
            .collect();
        for &t in &[-1.0, -0.2, 0.0, 0.4, 3.0, slopes[5]] {
            let le = slopes.iter().filter(|&&s| s <= t).count();
            let lt = slopes.iter().filter(|&&s| s < t).count();
            assert_eq!(sel.count(Bound::NegInf, Bound::At(t), Side::Closed), le);
            assert_eq!(sel.count(Bound::NegInf, Bound::At(t), Side::Open), lt);
            let gt = slopes.len() - le;
            assert_eq!(sel.count(Bound::At(t), Bound::PosInf, Side::Closed), gt);
        }
        assert_eq!(sel.count(Bound::NegInf, Bound::PosInf, Side::Closed), slopes.len());
        let mut all = sel.enumerate(Bound::At(-0.2), Bound::At(0.4));
        let mut expected: Vec<f64> = slopes.iter().copied().filter(|&s| s > -0.2 && s <= 0.4).collect();
        all.sort_by(cmp_f64);
        expected.sort_by(cmp_f64);
        assert_eq!(all, expected);
    }

    #[test]
    fn tied_x_pairs_are_never_counted() {
        let x = [0.0, 0.0, 0.0, 1.0, 1.0, 2.0, 2.0, 2.0, 3.0, 5.0];
        let y = [1.0, -4.0, 2.0, 0.0, 7.0, 3.0, 3.0, -1.0, 2.0, 9.0];
        let sel = Selector { x: &x, y: &y };
        let total = sel.count(Bound::NegInf, Bound::PosInf, Side::Closed);
        assert_eq!(total, 45 - 3 - 1 - 3);
        assert_eq!(fast(&x, &y, 1), naive(&x, &y));
    }

    #[test]
    fn agrees_with_naive_on_random_data() {
        let mut rng = stream(2024, 0);
        for (trial, &n) in [8usize, 9, 50, 301, 1000].iter().enumerate() {
            let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let y: Vec<f64> = x
                .iter()
                .map(|v| {
                    let e: f64 = StandardNormal.sample(&mut rng);
                    0.7 * v + e
                })
                .collect();
            assert_eq!(fast(&x, &y, trial as u64), naive(&x, &y), "n = {n}");
        }
    }

    #[test]
    fn lattice_duplicates() {
        // integer grid: massive numbers of identical slopes and tied x
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..15 {
            for j in 0..15 {
                x.push(i as f64);
                y.push(((i * 7 + j * 3) % 5) as f64);
            }
        }
        assert_eq!(fast(&x, &y, 3), naive(&x, &y));
        // every point on one line: all slopes equal
        let x: Vec<f64> = (0..300).map(|i| (i % 37) as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert_eq!(fast(&x, &y, 4), 2.0);
    }
}
