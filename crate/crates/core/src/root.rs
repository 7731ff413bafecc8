//! Bracket scanning and bisection for one-dimensional roots.

use crate::error::{Error, Result};

const MAX_BISECTIONS: usize = 2000;

/// Bisects `f` on `[lo, hi]`, which must bracket a sign change, until the
/// bracket is no wider than `tol` and cannot be split further in `f64`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::ConvergenceFailure(format!(
            "[{lo}, {hi}] does not bracket a root"
        )));
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    if hi - lo > tol {
        return Err(Error::ConvergenceFailure(format!(
            "bracket [{lo}, {hi}] still wider than {tol}"
        )));
    }
    Ok(0.5 * (lo + hi))
}

/// Every root of `f` bracketed by consecutive points of the ascending `grid`.
///
/// Roots that land exactly on a grid point are reported once. Tangential
/// roots without a sign change are not detected.
pub fn bracketed_roots(f: impl Fn(f64) -> f64, grid: &[f64], tol: f64) -> Result<Vec<f64>> {
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let mut roots = Vec::new();
    for i in 0..grid.len() {
        if values[i] == 0.0 {
            roots.push(grid[i]);
            continue;
        }
        if let Some(&next) = values.get(i + 1) {
            if next != 0.0 && values[i].signum() != next.signum() {
                roots.push(bisect(&f, grid[i], grid[i + 1], tol)?);
            }
        }
    }
    Ok(roots)
}
