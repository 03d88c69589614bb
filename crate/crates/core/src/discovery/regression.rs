use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scm::{CausalOrdering, ConnectionMatrix, DataMatrix};
use crate::stats::mean;

/// Relative pivot tolerance of the QR factorization.
const PIVOT_TOLERANCE: f64 = 1e-10;

pub(super) fn centered(column: &[f64]) -> Vec<f64> {
    let m = mean(column);
    column.iter().map(|v| v - m).collect()
}

pub(super) fn check_ordering(data: &DataMatrix, ordering: &CausalOrdering) -> Result<()> {
    if ordering.len() != data.p() {
        return Err(Error::InvalidInput(format!(
            "ordering has {} entries for {} columns",
            ordering.len(),
            data.p()
        )));
    }
    Ok(())
}

/// Least-squares coefficients of `y` on the columns of `x`, both centered.
/// `variable` labels the error.
pub(super) fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>, variable: usize) -> Result<Vec<f64>> {
    let k = x.ncols();
    if x.nrows() < k {
        return Err(Error::SingularDesign { variable });
    }
    let qr = x.clone().qr();
    let r = qr.r();
    let largest = (0..k).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if (0..k).any(|i| r[(i, i)].abs() <= PIVOT_TOLERANCE * largest) || largest == 0.0 {
        return Err(Error::SingularDesign { variable });
    }
    let qty = qr.q().transpose() * y;
    let mut beta = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = qty[i];
        for j in (i + 1)..k {
            s -= r[(i, j)] * beta[j];
        }
        beta[i] = s / r[(i, i)];
    }
    Ok(beta)
}

/// Regresses every variable on all of its predecessors in `ordering`
/// (with intercept), giving the fully connected `B` under that ordering.
pub fn estimate_connection_matrix(data: &DataMatrix, ordering: &CausalOrdering) -> Result<ConnectionMatrix> {
    check_ordering(data, ordering)?;
    let p = data.p();
    let n = data.n();
    let cols: Vec<Vec<f64>> = data.columns().iter().map(|c| centered(c)).collect();
    let mut b = ConnectionMatrix::zeros(p);
    let order = ordering.as_slice();
    for (pos, &child) in order.iter().enumerate().skip(1) {
        let parents = &order[..pos];
        let x = DMatrix::from_fn(n, parents.len(), |i, k| cols[parents[k]][i]);
        let y = DVector::from_column_slice(&cols[child]);
        let beta = least_squares(&x, &y, child)?;
        for (&j, v) in parents.iter().zip(beta) {
            b.set(child, j, v);
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_linear_system() {
        // x3 = 2 x1 - x2 + 5, so the fit is exact
        let x1 = vec![1.0, 2.0, 3.0, 4.0, 5.0, 7.0];
        let x2 = vec![0.5, -1.0, 2.0, 0.0, 3.0, 1.0];
        let x3: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| 2.0 * a - b + 5.0).collect();
        let d = DataMatrix::from_columns(vec![x3, x1, x2]).unwrap();
        let o = CausalOrdering::new(vec![1, 2, 0]).unwrap();
        let b = estimate_connection_matrix(&d, &o).unwrap();
        assert!((b.get(0, 1) - 2.0).abs() < 1e-12);
        assert!((b.get(0, 2) + 1.0).abs() < 1e-12);
        assert!(b.respects(&o));
    }

    #[test]
    fn single_variable_is_zero() {
        let d = DataMatrix::from_columns(vec![vec![1.0, 2.0, 3.0]]).unwrap();
        let b = estimate_connection_matrix(&d, &CausalOrdering::identity(1)).unwrap();
        assert_eq!(b, ConnectionMatrix::zeros(1));
    }

    #[test]
    fn collinear_predecessors() {
        let x1 = vec![1.0, 2.0, 3.0, 4.0];
        let x2: Vec<f64> = x1.iter().map(|v| 3.0 * v - 1.0).collect();
        let x3 = vec![0.0, 1.0, 0.0, 2.0];
        let d = DataMatrix::from_columns(vec![x1, x2, x3]).unwrap();
        assert!(matches!(
            estimate_connection_matrix(&d, &CausalOrdering::identity(3)),
            Err(Error::SingularDesign { variable: 2 })
        ));
    }
}
