//! Bracketed root finding for strictly monotone scalar functions.

use crate::error::{domain, Result};

const MAX_BRACKET_DOUBLINGS: usize = 64;
const MAX_BISECTIONS: usize = 200;

/// Signed power `sign(z) * |z|^p`, with `0^p := 0` for every `p`.
pub fn signed_pow(z: f64, p: f64) -> f64 {
    if z == 0.0 {
        0.0
    } else {
        z.signum() * z.abs().powf(p)
    }
}

/// Finds `x` with `f(x) = 0` for a strictly decreasing `f`.
///
/// The bracket starts at `center ± 1` and its half-width is doubled until
/// `f` changes sign. Bisection then runs until the bracket collapses to
/// adjacent floats or [`MAX_BISECTIONS`] halvings have been made.
pub fn root_decreasing(f: impl Fn(f64) -> f64, center: f64) -> Result<f64> {
    let f0 = f(center);
    if f0 == 0.0 {
        return Ok(center);
    }
    if f0.is_nan() {
        return Err(domain(format!("root search: function is NaN at {center}")));
    }

    let mut half = 1.0;
    let (mut lo, mut hi) = (center - half, center + half);
    let mut doublings = 0;
    while !(f(lo) >= 0.0 && f(hi) <= 0.0) {
        doublings += 1;
        if doublings > MAX_BRACKET_DOUBLINGS {
            return Err(domain(format!(
                "root search: no sign change around {center} after {MAX_BRACKET_DOUBLINGS} bracket doublings"
            )));
        }
        half *= 2.0;
        lo = center - half;
        hi = center + half;
    }

    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Pick whichever end has the smaller residual.
    if f(lo).abs() <= f(hi).abs() {
        Ok(lo)
    } else {
        Ok(hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_pow_conventions() {
        assert_eq!(signed_pow(0.0, 0.5), 0.0);
        assert_eq!(signed_pow(0.0, -1.0), 0.0);
        assert_eq!(signed_pow(4.0, 0.5), 2.0);
        assert_eq!(signed_pow(-4.0, 0.5), -2.0);
        assert_eq!(signed_pow(-2.0, 2.0), -4.0);
    }

    #[test]
    fn finds_linear_root() {
        let x = root_decreasing(|x| 3.0 - 2.0 * x, 0.0).unwrap();
        assert!((x - 1.5).abs() < 1e-15);
    }

    #[test]
    fn finds_root_far_from_center() {
        let x = root_decreasing(|x| 1e6 - x, 0.0).unwrap();
        assert!((x - 1e6).abs() < 1e-9);
    }

    #[test]
    fn steep_root_has_tiny_residual() {
        let f = |x: f64| -signed_pow(x, 0.5) + 1e-9;
        let x = root_decreasing(f, 0.0).unwrap();
        assert!(f(x).abs() < 1e-15);
    }

    #[test]
    fn bounded_function_fails_cleanly() {
        let err = root_decreasing(|x: f64| -x.tanh() + 2.0, 0.0).unwrap_err();
        assert!(matches!(err, crate::Error::NumericDomain(_)));
    }
}
