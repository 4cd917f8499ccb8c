//! Branched roots of `24 f tan(f/3 + c) = T`, with `T = 16r² − 81` for the
//! BGGG deformed instantons.
//!
//! Branch `k` lives where `f/3 + c ∈ ((k−½)π, (k+½)π)`. On the part of that
//! window where `f ≥ 0` and `tan(f/3 + c) ≥ 0` the map `f ↦ f tan(f/3 + c)`
//! increases from 0 to ∞, so each branch has exactly one root for `T ≥ 0`.
//! The root is found from the pole-free form `24 f sin θ − T cos θ = 0`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};

/// Which half-line the root is sought on. Negative roots correspond to
/// `c ≤ 0` through `(f, c) ↦ (−f, −c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RootSign {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchedRoot {
    pub f: f64,
    pub branch: u32,
    /// Full branch window in `f`.
    pub window: (f64, f64),
    /// Sub-interval that was bracketed.
    pub bracket: (f64, f64),
    pub converged: bool,
    /// `|24 f sin θ − T cos θ| / (24|f| + |T|)` with `θ = f/3 + c`
    pub residual: f64,
    pub iterations: u32,
}

/// `16r² − 81` in factored form.
pub fn bggg_target(r: f64) -> f64 {
    16.0 * (r - 2.25) * (r + 2.25)
}

/// Branch window `(3((k−½)π − c), 3((k+½)π − c))`.
pub fn branch_window(c: f64, branch: u32) -> (f64, f64) {
    let k = branch as f64;
    (3.0 * ((k - 0.5) * PI - c), 3.0 * ((k + 0.5) * PI - c))
}

/// Root of `24 f tan(f/3 + c) = 16r² − 81` on branch `branch`, `f ≥ 0`.
pub fn solve_tan_implicit(r: f64, c: f64, branch: u32) -> Result<BranchedRoot> {
    solve_tan_implicit_signed(r, c, branch, RootSign::Positive)
}

pub fn solve_tan_implicit_signed(r: f64, c: f64, branch: u32, sign: RootSign) -> Result<BranchedRoot> {
    if !(r >= 2.25) {
        return Err(Error::InvalidParameter(format!("tan equation needs r >= 9/4, got {r}")));
    }
    solve_tan_target(bggg_target(r), c, branch, sign)
}

/// Root of `24 f tan(f/3 + c) = target` on the given branch and half-line.
pub fn solve_tan_target(target: f64, c: f64, branch: u32, sign: RootSign) -> Result<BranchedRoot> {
    match sign {
        RootSign::Positive => solve_positive(target, c, branch),
        RootSign::Negative => {
            let mut root = solve_positive(target, -c, branch)?;
            root.f = -root.f;
            root.window = (-root.window.1, -root.window.0);
            root.bracket = (-root.bracket.1, -root.bracket.0);
            Ok(root)
        }
    }
}

fn solve_positive(target: f64, c: f64, branch: u32) -> Result<BranchedRoot> {
    let window = branch_window(c, branch);
    if !(0.0..FRAC_PI_2).contains(&c) {
        return Err(Error::InvalidParameter(format!(
            "tan equation constant must satisfy 0 <= c < pi/2, got {c}"
        )));
    }
    if !(target >= 0.0) || !target.is_finite() {
        return Err(Error::NoRoot {
            branch,
            window,
            reason: "right-hand side must be finite and non-negative",
        });
    }
    let k = branch as f64;
    let lo = window.0.max(0.0).max(3.0 * (k * PI - c));
    let hi = window.1;
    if !(hi > lo) {
        return Err(Error::NoRoot {
            branch,
            window,
            reason: "empty admissible window",
        });
    }
    let parity = if branch % 2 == 0 { 1.0 } else { -1.0 };
    let g = |f: f64| {
        let th = f / 3.0 + c;
        parity * (24.0 * f * th.sin() - target * th.cos())
    };
    let dg = |f: f64| {
        let th = f / 3.0 + c;
        parity * ((24.0 + target / 3.0) * th.sin() + 8.0 * f * th.cos())
    };

    let residual_of = |f: f64| {
        let th = f / 3.0 + c;
        let scale = 24.0 * f.abs() + target;
        if scale == 0.0 {
            0.0
        } else {
            (24.0 * f * th.sin() - target * th.cos()).abs() / scale
        }
    };

    if g(lo) >= 0.0 {
        return Ok(BranchedRoot {
            f: lo,
            branch,
            window,
            bracket: (lo, hi),
            converged: true,
            residual: residual_of(lo),
            iterations: 0,
        });
    }

    // safeguarded Newton: g(a) < 0 < g(b)
    let (mut a, mut b) = (lo, hi);
    let mut x = if target > 24.0 * hi { hi - 72.0 * hi / target } else { 0.5 * (a + b) };
    if !(x > a && x < b) {
        x = 0.5 * (a + b);
    }
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=200 {
        iterations = it;
        let gx = g(x);
        if gx == 0.0 {
            converged = true;
            break;
        }
        if gx < 0.0 {
            a = x;
        } else {
            b = x;
        }
        let d = dg(x);
        let mut next = x - gx / d;
        if !(next > a && next < b) || !next.is_finite() {
            next = 0.5 * (a + b);
        }
        let tol = 4.0 * f64::EPSILON * next.abs().max(1e-300);
        if (next - x).abs() <= tol || (b - a) <= tol {
            x = next;
            converged = true;
            break;
        }
        x = next;
    }
    Ok(BranchedRoot {
        f: x,
        branch,
        window,
        bracket: (lo, hi),
        converged,
        residual: residual_of(x),
        iterations,
    })
}

/// `f′` along a solution of the tan equation, from implicit
/// differentiation: `2304 r f / ((16r²−81)(16r²−9) + 576 f²)`.
pub fn implicit_slope(r: f64, f: f64) -> f64 {
    2304.0 * r * f / (crate::instanton::bggg_radial(r) + 576.0 * f * f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    /// Plain bisection on the tan form over a bracket; independent oracle.
    fn bisect(target: f64, c: f64, mut lo: f64, mut hi: f64) -> f64 {
        let h = |f: f64| 24.0 * f * (f / 3.0 + c).tan() - target;
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if h(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn zero_at_singular_orbit() {
        for c in [0.1, 0.7, 1.5] {
            let root = solve_tan_implicit(2.25, c, 0).unwrap();
            assert_eq!(root.f, 0.0);
            assert!(root.converged);
        }
    }

    #[test]
    fn r_equals_three_c_zero() {
        let oracle = bisect(63.0, 0.0, 0.0, 1.5 * PI - 1e-12);
        let root = solve_tan_implicit(3.0, 0.0, 0).unwrap();
        assert!((root.f - oracle).abs() < 1e-13, "{} vs {oracle}", root.f);
        assert!(root.residual < 1e-13);
        assert!(root.f > 0.0 && root.f < 1.5 * PI);
    }

    #[test]
    fn asymptote_of_principal_branch() {
        let root = solve_tan_implicit(1e6, FRAC_PI_4, 0).unwrap();
        assert!((root.f - 0.75 * PI).abs() < 1e-9);
    }

    #[test]
    fn higher_branches_match_oracle() {
        for k in 1..4u32 {
            for &r in &[2.25, 2.5, 4.0, 30.0] {
                let c = 0.4;
                let root = solve_tan_implicit(r, c, k).unwrap();
                let (lo, hi) = (3.0 * (k as f64 * PI - c), branch_window(c, k).1);
                let oracle = bisect(bggg_target(r), c, lo, hi - 1e-13);
                assert!((root.f - oracle).abs() < 1e-11 * oracle, "k={k} r={r}");
                assert!(root.f >= lo && root.f < hi);
            }
        }
    }

    #[test]
    fn z2_symmetry() {
        for &r in &[2.3, 3.0, 10.0, 100.0] {
            let pos = solve_tan_implicit_signed(r, 0.6, 0, RootSign::Positive).unwrap();
            let neg = solve_tan_implicit_signed(r, -0.6, 0, RootSign::Negative).unwrap();
            assert!((pos.f + neg.f).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_inputs() {
        assert!(solve_tan_implicit(2.0, 0.5, 0).is_err());
        assert!(solve_tan_implicit(3.0, FRAC_PI_2, 0).is_err());
        assert!(solve_tan_implicit(3.0, -0.1, 0).is_err());
        assert!(solve_tan_target(-1.0, 0.5, 0, RootSign::Positive).is_err());
    }

    #[test]
    fn slope_matches_difference_quotient() {
        let c = 0.7;
        let r = 5.0;
        let h = 1e-5;
        let fp = solve_tan_implicit(r + h, c, 0).unwrap().f;
        let fm = solve_tan_implicit(r - h, c, 0).unwrap().f;
        let f = solve_tan_implicit(r, c, 0).unwrap().f;
        assert!(((fp - fm) / (2.0 * h) - implicit_slope(r, f)).abs() < 1e-8);
    }
}
