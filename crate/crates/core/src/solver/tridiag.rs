use crate::error::{Error, Result};
use crate::scalar::Real;

/// Thomas algorithm for `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
///
/// `lower[0]` and `upper[n-1]` are ignored. `rhs` is overwritten with the
/// solution; `scratch` must have the same length.
pub fn solve_tridiagonal<T: Real>(
    lower: &[T],
    diag: &[T],
    upper: &[T],
    rhs: &mut [T],
    scratch: &mut [T],
) -> Result<()> {
    let n = rhs.len();
    debug_assert!(lower.len() == n && diag.len() == n && upper.len() == n && scratch.len() == n);
    if n == 0 {
        return Ok(());
    }
    let pivot = |d: T, i: usize| -> Result<T> {
        if d == T::zero() || !d.is_finite() {
            Err(Error::Solve(format!(
                "singular tridiagonal system at row {i} (pivot {d})"
            )))
        } else {
            Ok(d)
        }
    };
    let mut d = pivot(diag[0], 0)?;
    scratch[0] = upper[0] / d;
    rhs[0] = rhs[0] / d;
    for i in 1..n {
        d = pivot(diag[i] - lower[i] * scratch[i - 1], i)?;
        scratch[i] = if i + 1 < n { upper[i] / d } else { T::zero() };
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / d;
    }
    for i in (0..n - 1).rev() {
        rhs[i] = rhs[i] - scratch[i] * rhs[i + 1];
    }
    Ok(())
}
