//! Small order-statistic helpers shared by the estimators.

use std::cmp::Ordering;

#[inline]
pub(crate) fn cmp_f64(a: &f64, b: &f64) -> Ordering {
    a.total_cmp(b)
}

/// Median with the even-count convention of averaging the two middle order
/// statistics. Reorders `values`. Panics on an empty slice.
pub(crate) fn median_in_place(values: &mut [f64]) -> f64 {
    let len = values.len();
    assert!(len > 0, "median of an empty set");
    let mid = len / 2;
    let (left, upper, _) = values.select_nth_unstable_by(mid, cmp_f64);
    let upper = *upper;
    if len % 2 == 1 {
        upper
    } else {
        let lower = left.iter().copied().max_by(cmp_f64).expect("non-empty left half");
        midpoint(lower, upper)
    }
}

pub(crate) fn median(values: &[f64]) -> f64 {
    let mut buf = values.to_vec();
    median_in_place(&mut buf)
}

/// `(a + b) / 2` without overflow for huge magnitudes.
#[inline]
pub(crate) fn midpoint(a: f64, b: f64) -> f64 {
    if a == b {
        a
    } else {
        a / 2.0 + b / 2.0
    }
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Largest absolute deviation from the median.
pub(crate) fn spread(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let med = median(values);
    values.iter().map(|v| (v - med).abs()).fold(0.0, f64::max)
}
