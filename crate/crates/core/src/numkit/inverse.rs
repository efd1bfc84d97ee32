use crate::error::{Error, Result};

/// Default absolute/relative width tolerance for inverses.
pub const INVERSE_TOL: f64 = 1e-10;

const MONOTONE_SAMPLES: usize = 33;
const MAX_BISECTIONS: usize = 400;

/// Generalized inverse of a monotone `f` on `bracket`, located by bisection.
///
/// For nondecreasing `f` this is `sup{x : f(x) <= target}`, for
/// nonincreasing `f` it is `sup{x : f(x) >= target}`. When the set is empty
/// the value `0` is returned (`sup(∅) = 0`). Flat stretches of `f` are
/// resolved to their right end, which is what the generalized inverse asks for.
///
/// The bracket is sampled first; a sample that breaks monotonicity is
/// reported as [`Error::MonotonicityViolation`].
pub fn monotone_inverse<F>(f: F, target: f64, bracket: (f64, f64), tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (lo, hi) = bracket;
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "empty bracket [{lo}, {hi}]"
        )));
    }
    let flo = f(lo);
    let fhi = f(hi);
    let increasing = fhi >= flo;
    let mut prev = flo;
    for k in 1..=MONOTONE_SAMPLES {
        let x = lo + (hi - lo) * k as f64 / MONOTONE_SAMPLES as f64;
        let y = if k == MONOTONE_SAMPLES { fhi } else { f(x) };
        let noise = 1e-12 * (1.0 + prev.abs().max(y.abs()));
        let step = if increasing { y - prev } else { prev - y };
        if step < -noise || y.is_nan() {
            return Err(Error::MonotonicityViolation { lo, hi, at: x });
        }
        prev = y;
    }
    Ok(generalized_inverse(f, target, bracket, increasing, tol))
}

/// Bisection core of [`monotone_inverse`] without the monotonicity sampling.
/// Intended for hot loops where monotonicity is known by construction.
pub fn generalized_inverse<F>(f: F, target: f64, bracket: (f64, f64), increasing: bool, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = bracket;
    // `inside(x)` is the defining predicate of the sublevel set.
    let inside = |x: f64| {
        let y = f(x);
        if increasing {
            y <= target
        } else {
            y >= target
        }
    };
    if !inside(lo) {
        return 0.0;
    }
    if inside(hi) {
        return hi;
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= tol * (1.0 + lo.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Expands `hi` geometrically until `f(hi) < target` for a decreasing `f`
/// (e.g. a survival function on `[0, ∞)`), returning the bracket.
pub fn bracket_decreasing<F>(f: F, target: f64, start: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let mut hi = start.max(1e-3);
    for _ in 0..2000 {
        if f(hi) < target {
            return Ok((0.0, hi));
        }
        hi *= 2.0;
        if !hi.is_finite() {
            break;
        }
    }
    Err(Error::EvaluationOverflow { x: hi })
}
