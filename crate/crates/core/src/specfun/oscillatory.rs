use super::quad::{integrate, QuadValue, QuadratureResult, QuadratureSpec};
use crate::{Error, Result};

const MIN_TERMS: usize = 6;
const EULER_WINDOW: usize = 24;

/// Limit of a sequence of partial sums by repeated pairwise averaging
/// (the Euler transform of the underlying alternating series).
pub fn euler_limit<T: QuadValue>(partial_sums: &[T]) -> T {
    let mut level: Vec<T> = partial_sums.to_vec();
    while level.len() > 1 {
        level = level.windows(2).map(|w| (w[0] + w[1]) * 0.5).collect();
    }
    level.first().copied().unwrap_or_else(T::zero)
}

/// Integrates an oscillatory `f` over `[a, b]` by summing consecutive
/// half-periods of length `half_period`.
///
/// For finite `b` the pieces are added directly. For `b = +inf` the sequence
/// of partial sums is accelerated with [`euler_limit`]; the number of pieces
/// is capped at `spec.max_subdivisions`.
pub fn integrate_oscillatory<T, F>(
    f: F,
    a: f64,
    b: f64,
    half_period: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    spec.validate()?;
    if !(half_period > 0.0) || !half_period.is_finite() {
        return Err(Error::InvalidSpec("half_period must be positive and finite"));
    }
    if a.is_nan() || b.is_nan() || a.is_infinite() || b < a {
        return Err(Error::InvalidSpec("integration limits must satisfy a <= b"));
    }
    let piece_spec = QuadratureSpec {
        abs_tol: spec.abs_tol * 0.1,
        ..*spec
    };

    if b.is_finite() {
        let pieces = ((b - a) / half_period).ceil().max(1.0) as usize;
        let mut total = T::zero();
        let mut err = 0.0;
        let mut used = 0;
        let mut converged = true;
        for k in 0..pieces {
            let lo = a + k as f64 * half_period;
            let hi = if k + 1 == pieces {
                b
            } else {
                a + (k + 1) as f64 * half_period
            };
            let r = integrate(&f, lo, hi, &piece_spec)?;
            total = total + r.value;
            err += r.error_estimate;
            used += r.subdivisions_used;
            converged &= r.converged;
        }
        let converged = converged && err <= spec.tolerance_for(total.magnitude());
        return Ok(QuadratureResult {
            value: total,
            error_estimate: err,
            subdivisions_used: used,
            converged,
        });
    }

    let max_terms = spec.max_subdivisions.max(MIN_TERMS + 2);
    let mut partial = Vec::with_capacity(64);
    let mut running = T::zero();
    let mut piece_err = 0.0;
    let mut used = 0;
    let mut estimates: Vec<T> = Vec::new();
    for k in 0..max_terms {
        let lo = a + k as f64 * half_period;
        let hi = lo + half_period;
        let r = integrate(&f, lo, hi, &piece_spec)?;
        running = running + r.value;
        piece_err += r.error_estimate;
        used += r.subdivisions_used;
        partial.push(running);
        if partial.len() < MIN_TERMS {
            continue;
        }
        let start = partial.len().saturating_sub(EULER_WINDOW);
        estimates.push(euler_limit(&partial[start..]));
        let n = estimates.len();
        if n >= 3 {
            let last = estimates[n - 1];
            let d1 = (last - estimates[n - 2]).magnitude();
            let d2 = (estimates[n - 2] - estimates[n - 3]).magnitude();
            let tol = spec.tolerance_for(last.magnitude());
            if d1 <= tol && d2 <= tol {
                return Ok(QuadratureResult {
                    value: last,
                    error_estimate: d1.max(d2) + piece_err,
                    subdivisions_used: used,
                    converged: true,
                });
            }
        }
    }
    let n = estimates.len();
    let last = estimates[n - 1];
    let d1 = (last - estimates[n - 2]).magnitude();
    Ok(QuadratureResult {
        value: last,
        error_estimate: d1 + piece_err,
        subdivisions_used: used,
        converged: false,
    })
}
