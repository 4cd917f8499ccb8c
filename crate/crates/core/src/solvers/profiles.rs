//! Implicitly defined instanton profiles as [`RadialScalar`]s.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::geometry::BGGG_SINGULAR_ORBIT;
use crate::scalar::{Domain, RadialScalar};
use crate::solvers::lambert::lambert_w0;
use crate::solvers::tan_root::{implicit_slope, solve_tan_implicit};

/// `(16r²−81)(16r²−9)` as an expression.
fn bggg_radial_expr() -> RadialScalar {
    let r = RadialScalar::r();
    let r2 = &r * &r;
    (&r2 * 16.0 - 81.0) * (r2 * 16.0 - 9.0)
}

/// Principal (branch 0) solution of `24 f tan(f/3 + c) = 16r² − 81` on
/// `[9/4, ∞)`. Vanishes at `r = 9/4` with slope `3 cot c` there.
pub fn principal_profile(tan_c: f64) -> Result<RadialScalar> {
    if !(tan_c > 0.0 && tan_c < FRAC_PI_2) {
        return Err(Error::InvalidParameter(format!(
            "principal profile needs 0 < c < pi/2, got {tan_c}"
        )));
    }
    let domain = Domain::closed_from(BGGG_SINGULAR_ORBIT);
    let value = move |r: f64| solve_tan_implicit(r, tan_c, 0).map_or(f64::NAN, |root| root.f);
    Ok(RadialScalar::implicit("f_c", domain, value, move |f| {
        let f = f.clone();
        let slope_value = move |r: f64| {
            if r == BGGG_SINGULAR_ORBIT {
                3.0 / tan_c.tan()
            } else {
                implicit_slope(r, value(r))
            }
        };
        let closed = (RadialScalar::r() * &f * 2304.0) / (bggg_radial_expr() + f.powi(2) * 576.0);
        RadialScalar::implicit("f_c'", domain, slope_value, move |_| closed.derivative())
    }))
}

/// `f(r) = (1/c) exp(½ W(4c²r⁴ / (27 S)))` with `S = a₁² + a₂² + a₃²`,
/// the solution of `ln(c f) f² = 2r⁴/(27 S)`.
pub fn cone_profile(cone_c: f64, a: [f64; 3]) -> Result<RadialScalar> {
    let s: f64 = a.iter().map(|x| x * x).sum();
    if !(cone_c > 0.0) || !cone_c.is_finite() {
        return Err(Error::InvalidParameter(format!("cone constant must be positive, got {cone_c}")));
    }
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidParameter("cone direction must be nonzero".into()));
    }
    let domain = Domain::open_from(0.0);
    let value = move |r: f64| {
        let x = 4.0 * cone_c * cone_c * r.powi(4) / (27.0 * s);
        lambert_w0(x).map_or(f64::NAN, |w| (0.5 * w).exp() / cone_c)
    };
    Ok(RadialScalar::implicit("f_cone", domain, value, move |f| {
        let r = RadialScalar::r();
        (f * r.clone().powi(3) * 2.0) / (r.powi(4) + f.clone().powi(2) * (6.75 * s))
    }))
}

/// `ln(c f) f² − 2r⁴/(27 S)` relative to `max(1, 2r⁴/(27 S))`.
pub fn cone_implicit_residual(cone_c: f64, a: [f64; 3], r: f64, f: f64) -> f64 {
    let s: f64 = a.iter().map(|x| x * x).sum();
    let rhs = 2.0 * r.powi(4) / (27.0 * s);
    ((cone_c * f).ln() * f * f - rhs).abs() / rhs.max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instanton::{bggg_radial, bggg_reduced_residual};
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn principal_endpoint_data() {
        let f = principal_profile(FRAC_PI_4).unwrap();
        assert_eq!(f.value(2.25).unwrap(), 0.0);
        assert!((f.derivative_at(2.25).unwrap() - 3.0).abs() < 1e-14);
        let c = 0.7;
        let f = principal_profile(c).unwrap();
        let h = 1e-6;
        let q = f.value(2.25 + h).unwrap() / h;
        assert!((q - 3.0 / c.tan()).abs() < 1e-4);
    }

    #[test]
    fn principal_solves_reduced_ode() {
        let f = principal_profile(0.3).unwrap();
        let df = f.derivative();
        for r in [2.3, 3.0, 10.0, 100.0] {
            let (v, d) = (f.at(r), df.at(r));
            let scale = bggg_radial(r) * d.abs() + 2304.0 * r * v.abs();
            assert!(bggg_reduced_residual(v, d, r).abs() < 1e-13 * scale);
        }
    }

    #[test]
    fn principal_second_derivative_is_finite() {
        let f = principal_profile(1.0).unwrap();
        let h = 1e-4;
        let r = 4.0;
        let fd = (f.derivative_at(r + h).unwrap() - f.derivative_at(r - h).unwrap()) / (2.0 * h);
        assert!((f.derivative().derivative_at(r).unwrap() - fd).abs() < 1e-6);
    }

    #[test]
    fn principal_rejects_bad_constants() {
        assert!(principal_profile(0.0).is_err());
        assert!(principal_profile(FRAC_PI_2).is_err());
    }

    #[test]
    fn flat_limit() {
        let mut last = f64::INFINITY;
        for k in 1..6 {
            let v = principal_profile(FRAC_PI_2 - 10f64.powi(-k)).unwrap().at(10.0);
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn cone_small_r_and_relation() {
        let f = cone_profile(2.0, [1.0, 1.0, 1.0]).unwrap();
        assert!((f.at(1e-4) - 0.5).abs() < 1e-12);
        for r in [0.1, 1.0, 7.0, 50.0] {
            assert!(cone_implicit_residual(2.0, [1.0, 1.0, 1.0], r, f.at(r)) < 1e-13);
        }
    }

    #[test]
    fn cone_derivative_matches_difference_quotient() {
        let f = cone_profile(1.0, [1.0, 0.0, 0.0]).unwrap();
        let h = 1e-5;
        for r in [0.5, 2.0, 20.0] {
            let fd = (f.at(r + h) - f.at(r - h)) / (2.0 * h);
            assert!((f.derivative_at(r).unwrap() - fd).abs() < 1e-6 * fd.abs().max(1.0));
        }
    }
}
