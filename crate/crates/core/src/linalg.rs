//! Tiny dense linear solver. The crate only solves systems of dimension <= 4
//! (steady states, Newton steps), so Gaussian elimination with partial
//! pivoting is all that is needed.

use crate::error::{Error, Result};
use crate::scalar::{cst, Real};

/// Solves `a * x = rhs` in place, destroying both inputs.
///
/// `what` names the matrix in the singularity error.
pub(crate) fn solve_dense<T: Real>(
    mut a: Vec<Vec<T>>,
    mut rhs: Vec<T>,
    what: &'static str,
) -> Result<Vec<T>> {
    let n = a.len();
    assert!(a.iter().all(|row| row.len() == n) && rhs.len() == n);
    let scale = a
        .iter()
        .flatten()
        .fold(T::zero(), |m, &v| m.max(v.abs()))
        .max(T::min_positive_value());
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot_row][col].abs() <= cst::<T>(1e-14) * scale {
            return Err(Error::Singular(what));
        }
        a.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                let sub = factor * a[col][k];
                a[row][k] -= sub;
            }
            let sub = factor * rhs[col];
            rhs[row] -= sub;
        }
    }
    for col in (0..n).rev() {
        let mut acc = rhs[col];
        for k in col + 1..n {
            acc -= a[col][k] * rhs[k];
        }
        rhs[col] = acc / a[col][col];
    }
    Ok(rhs)
}
