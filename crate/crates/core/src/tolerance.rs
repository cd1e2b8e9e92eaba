// SPDX-License-Identifier: Apache-2.0

//! Agreement bounds between a strategy's predictions and the double
//! precision sequential reference, as relative errors.
//!
//! Strategies differ from the reference only in summation order (pairwise
//! trees versus a left-to-right pass) and, at single precision, in the
//! rounding of inputs and every intermediate.

use crate::real::Precision;

/// Double precision, any size up to 10^6 samples.
pub const DOUBLE: f64 = 1e-9;
/// Single precision.
pub const SINGLE: f64 = 1e-3;
/// Single precision with at most [`SMALL_N`] samples.
pub const SINGLE_SMALL: f64 = 1e-4;
pub const SMALL_N: usize = 256;

pub fn relative(precision: Precision, n: usize) -> f64 {
    match precision {
        Precision::Double => DOUBLE,
        Precision::Single if n <= SMALL_N => SINGLE_SMALL,
        Precision::Single => SINGLE,
    }
}

/// `|a - b| / |b|`, or `|a - b|` when `b` is zero. Infinite when either
/// side is NaN.
pub fn relative_error(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let diff = (a - b).abs();
    let err = if b == 0.0 { diff } else { diff / b.abs() };
    if err.is_nan() {
        f64::INFINITY
    } else {
        err
    }
}

/// Largest [`relative_error`] over paired slices; infinite on a length
/// mismatch.
pub fn max_relative_error(got: &[f64], reference: &[f64]) -> f64 {
    if got.len() != reference.len() {
        return f64::INFINITY;
    }
    got.iter()
        .zip(reference)
        .map(|(&a, &b)| relative_error(a, b))
        .fold(0.0, f64::max)
}

/// Number of representable `f64` values between `a` and `b`; `u64::MAX` if
/// either is NaN.
pub fn ulps_between(a: f64, b: f64) -> u64 {
    if a.is_nan() || b.is_nan() {
        return u64::MAX;
    }
    // Map the sign-magnitude bit pattern onto a monotone integer line.
    let key = |v: f64| {
        let bits = v.to_bits() as i64;
        if bits < 0 {
            i64::MIN - bits
        } else {
            bits
        }
    };
    key(a).abs_diff(key(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ulps() {
        assert_eq!(ulps_between(1.0, 1.0), 0);
        assert_eq!(ulps_between(1.0, f64::from_bits(1.0f64.to_bits() + 1)), 1);
        assert_eq!(ulps_between(0.0, -0.0), 0);
        assert_eq!(
            ulps_between(-f64::MIN_POSITIVE, f64::MIN_POSITIVE),
            2 * f64::MIN_POSITIVE.to_bits()
        );
        assert_eq!(ulps_between(f64::NAN, 1.0), u64::MAX);
    }

    #[test]
    fn relative_errors() {
        assert_eq!(relative_error(2.0, 2.0), 0.0);
        assert_eq!(relative_error(1.0, 0.0), 1.0);
        assert_eq!(relative_error(f64::NAN, 1.0), f64::INFINITY);
        assert_eq!(max_relative_error(&[1.0, 2.2], &[1.0, 2.0]), 0.10000000000000009);
        assert_eq!(max_relative_error(&[1.0], &[]), f64::INFINITY);
        assert_eq!(relative(Precision::Single, 256), SINGLE_SMALL);
        assert_eq!(relative(Precision::Single, 257), SINGLE);
    }
}
