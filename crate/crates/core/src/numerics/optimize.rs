//! Deterministic one-dimensional maximization.

use crate::error::{domain, CavityError, Result};
use crate::scalar::Scalar;

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
///
/// Returns `(x_max, f(x_max))` once the bracket is narrower than `tol`.
pub fn golden_section_max<T: Scalar>(f: impl Fn(T) -> T, mut lo: T, mut hi: T, tol: T) -> (T, T) {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) * T::half();
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = (lo + hi) * T::half();
    (x, f(x))
}

/// Coarse scan locating an interior maximum of `f` on `[lo, hi]`.
///
/// Returns the sub-bracket around the best scan point. Fails when the best
/// point sits on either end of the interval.
pub fn bracket_maximum<T: Scalar>(f: impl Fn(T) -> T, lo: T, hi: T, samples: usize) -> Result<(T, T)> {
    if !(lo < hi) || samples < 3 {
        return domain(format!("invalid bracket [{lo}, {hi}] with {samples} samples"));
    }
    let step = (hi - lo) / T::from_usize_lossy(samples - 1);
    let values: Vec<T> = (0..samples).map(|i| f(lo + step * T::from_usize_lossy(i))).collect();
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    if best == 0 || best == samples - 1 {
        return Err(CavityError::Bracket(format!(
            "maximum of the scan lies on the boundary of [{lo}, {hi}]"
        )));
    }
    let at = |i: usize| lo + step * T::from_usize_lossy(i);
    Ok((at(best - 1), at(best + 1)))
}

/// Scan then refine: the interior maximum of `f` on `[lo, hi]` to `tol`.
pub fn maximize<T: Scalar>(f: impl Fn(T) -> T, lo: T, hi: T, tol: T) -> Result<(T, T)> {
    let (a, b) = bracket_maximum(&f, lo, hi, 33)?;
    Ok(golden_section_max(&f, a, b, tol))
}
