//! Bracketing root search for real scalar functions.

use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum RootError {
    /// `f(lo)` and `f(hi)` do not straddle zero.
    NoSignChange { lo: f64, hi: f64 },
    /// The function returned NaN inside the bracket.
    NotFinite { x: f64 },
    IterationLimit { lo: f64, hi: f64 },
}

impl fmt::Display for RootError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootError::NoSignChange { lo, hi } => {
                write!(f, "no sign change on bracket [{lo}, {hi}]")
            }
            RootError::NotFinite { x } => write!(f, "function is not finite at x = {x}"),
            RootError::IterationLimit { lo, hi } => {
                write!(f, "bisection did not converge; last bracket [{lo}, {hi}]")
            }
        }
    }
}

impl core::error::Error for RootError {}

/// Bisection on `[lo, hi]` until the bracket is narrower than `xtol`.
pub fn bisect<F>(mut lo: f64, mut hi: f64, f: F, xtol: f64) -> Result<f64, RootError>
where
    F: Fn(f64) -> f64,
{
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.is_nan() {
        return Err(RootError::NotFinite { x: lo });
    }
    if fhi.is_nan() {
        return Err(RootError::NotFinite { x: hi });
    }
    if flo.signum() == fhi.signum() {
        return Err(RootError::NoSignChange { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.is_nan() {
            return Err(RootError::NotFinite { x: mid });
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Err(RootError::IterationLimit { lo, hi })
}

/// Adjacent grid intervals `[x_i, x_{i+1}]` on which `f` changes sign.
/// Exact zeros at grid points are reported as degenerate brackets `[x, x]`.
pub fn sign_change_brackets<F>(grid: &[f64], f: F) -> Vec<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let mut out = Vec::new();
    for i in 0..grid.len() {
        if values[i] == 0.0 {
            out.push((grid[i], grid[i]));
            continue;
        }
        if i + 1 < grid.len()
            && values[i + 1] != 0.0
            && values[i].is_finite()
            && values[i + 1].is_finite()
            && values[i].signum() != values[i + 1].signum()
        {
            out.push((grid[i], grid[i + 1]));
        }
    }
    out
}
