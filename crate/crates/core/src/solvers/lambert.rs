//! Principal branch of the Lambert W function.

use std::f64::consts::E;

use crate::error::{Error, Result};

const INV_E: f64 = 1.0 / E;
const MAX_ITER: usize = 64;

/// `W₀(x)`: the solution `w ≥ −1` of `w eʷ = x`, for `x ≥ −1/e`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() || x < -INV_E {
        return Err(Error::InvalidParameter(format!(
            "Lambert W0 needs x >= -1/e, got {x}"
        )));
    }
    if x == -INV_E {
        return Ok(-1.0);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    if x > E {
        return Ok(large_argument(x));
    }

    let mut w = if x < -0.25 {
        // expansion around the branch point in p = √(2(ex + 1))
        let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else {
        // log1p-based guess, exact to second order at 0
        let l = x.ln_1p();
        l * (1.0 - l.ln_1p() / (2.0 + l))
    };

    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        if f == 0.0 {
            break;
        }
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        // Halley step
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        let next = (w - step).max(-1.0);
        if (next - w).abs() <= 1e-16 * (1.0 + next.abs()) {
            w = next;
            break;
        }
        w = next;
    }
    Ok(w)
}

/// For `x > e` solve `w + ln w = ln x`, which never forms `eʷ`.
fn large_argument(x: f64) -> f64 {
    let lx = x.ln();
    let l2 = lx.ln();
    let mut w = lx - l2 + l2 / lx;
    for _ in 0..MAX_ITER {
        let g = w + w.ln() - lx;
        let dg = 1.0 + 1.0 / w;
        let ddg = -1.0 / (w * w);
        let step = g / (dg - 0.5 * g * ddg / dg);
        w -= step;
        if step.abs() <= 1e-16 * w {
            break;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Bisection on `w eʷ = x` over `[-1, hi]`; independent oracle.
    fn bisect_w(x: f64) -> f64 {
        let (mut lo, mut hi) = (-1.0f64, 1.0f64.max(x.ln_1p() + 1.0));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid * mid.exp() < x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn trivial_values() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(E).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(lambert_w0(-INV_E).unwrap(), -1.0);
    }

    #[test]
    fn omega_constant() {
        let oracle = bisect_w(1.0);
        assert!((oracle - 0.567_143_290_409_783_8).abs() < 1e-15);
        assert!((lambert_w0(1.0).unwrap() - oracle).abs() < 1e-15);
    }

    #[test]
    fn agrees_with_bisection() {
        for &x in &[-0.367, -0.3, -0.1, 1e-8, 0.5, 2.0, 2.8, 10.0, 1e3, 1e8] {
            let w = lambert_w0(x).unwrap();
            let o = bisect_w(x);
            assert!((w - o).abs() < 1e-12 * (1.0 + o.abs()), "x={x}: {w} vs {o}");
        }
    }

    #[test]
    fn defining_relation() {
        let mut x = -0.3678;
        while x < 50.0 {
            let w = lambert_w0(x).unwrap();
            assert!((w * w.exp() - x).abs() <= 1e-14 * x.abs().max(1.0), "x={x}");
            x += 0.0137;
        }
    }

    #[test]
    fn huge_arguments() {
        for &x in &[1e30, 1e100, 1e300, f64::MAX] {
            let w = lambert_w0(x).unwrap();
            assert!((w + w.ln() - x.ln()).abs() < 1e-13 * w);
        }
    }

    #[test]
    fn below_branch_point_is_an_error() {
        assert!(lambert_w0(-0.5).is_err());
        assert!(lambert_w0(f64::NAN).is_err());
    }
}
