//! Explicit G2-instanton profiles.

use crate::geometry::GeometryTag;
use crate::instanton::ConnectionAnsatz;
use crate::scalar::{Domain, RadialScalar};

/// `d/dr ln f = Σ wₖ P′ₖ/Pₖ`, integrated to `f = Π Pₖ^{wₖ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialFractions {
    /// `(weight, ascending polynomial coefficients)`
    pub terms: Vec<(i32, Vec<f64>)>,
}

fn poly(c: &[f64], r: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &x| acc * r + x)
}

fn poly_derivative(c: &[f64], r: f64) -> f64 {
    c.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (k, &x)| acc * r + k as f64 * x)
}

impl PartialFractions {
    pub fn log_derivative(&self, r: f64) -> f64 {
        self.terms
            .iter()
            .map(|(w, c)| *w as f64 * poly_derivative(c, r) / poly(c, r))
            .sum()
    }

    pub fn integrate(&self, c0: f64) -> RadialScalar {
        self.terms.iter().fold(RadialScalar::constant(c0), |acc, (w, c)| {
            acc * RadialScalar::polynomial(c).powi(*w)
        })
    }
}

/// `(2r³+1)/(r⁴−r) = −1/r + 1/(r−1) + (2r+1)/(r²+r+1)`.
pub fn bs_partial_fractions() -> PartialFractions {
    PartialFractions {
        terms: vec![(-1, vec![0.0, 1.0]), (1, vec![-1.0, 1.0]), (1, vec![1.0, 1.0, 1.0])],
    }
}

/// `c₀ (16r²−81)/(16r²−9)`, the BGGG G2-instanton along `η₁⁺`.
pub fn bggg_g2_profile(c0: f64) -> RadialScalar {
    let r = RadialScalar::r();
    let r2 = &r * &r;
    ((&r2 * 16.0 - 81.0) / (r2 * 16.0 - 9.0) * c0).on(Domain::closed_from(2.25))
}

/// `c₀ eʳ (4r−9) / (√r (4r+9)²)`, solving the `η₂⁺, η₃⁺` rows of the BGGG
/// G2 system. Overflows for `r` beyond about 700.
pub fn bggg_transverse_g2_profile(c0: f64) -> RadialScalar {
    let r = RadialScalar::r();
    (r.clone().exp() * (&r * 4.0 - 9.0) * c0 / (r.clone().sqrt() * (r * 4.0 + 9.0).powi(2)))
        .on(Domain::closed_from(2.25))
}

/// Closed-form G2-instanton: `(c₀r², c₀r², c₀r²)` on the cone,
/// `f = c₀(r³−1)/r` on all three components for complete Bryant–Salamon, and
/// `(c₀(16r²−81)/(16r²−9), 0, 0)` on BGGG.
pub fn g2_closed_form(tag: GeometryTag, c0: f64) -> ConnectionAnsatz {
    match tag {
        GeometryTag::BsCone => {
            let f = (RadialScalar::r().powi(2) * c0).on(Domain::open_from(0.0));
            ConnectionAnsatz::new(f.clone(), f.clone(), f)
        }
        GeometryTag::BsComplete => {
            let f = bs_partial_fractions().integrate(c0).on(Domain::closed_from(1.0));
            ConnectionAnsatz::new(f.clone(), f.clone(), f)
        }
        GeometryTag::Bggg => ConnectionAnsatz::single(bggg_g2_profile(c0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instanton::{ode_residual, InstantonMode};

    #[test]
    fn bs_decomposition() {
        let pf = bs_partial_fractions();
        for r in [1.1f64, 2.0, 7.5, 100.0] {
            let exact = (2.0 * r.powi(3) + 1.0) / (r.powi(4) - r);
            assert!((pf.log_derivative(r) - exact).abs() < 1e-14 * exact);
        }
        let f = pf.integrate(2.0);
        assert!((f.at(3.0) - 2.0 * 26.0 / 3.0).abs() < 1e-13);
    }

    /// Trapezoid-free oracle: RK4 on the linear ODE from two starting points.
    fn rk4_bs(r0: f64, f0: f64, r1: f64) -> f64 {
        let rhs = |r: f64, f: f64| (2.0 * r.powi(3) + 1.0) / (r.powi(4) - r) * f;
        let n = 20000;
        let h = (r1 - r0) / n as f64;
        let (mut r, mut f) = (r0, f0);
        for _ in 0..n {
            let k1 = rhs(r, f);
            let k2 = rhs(r + h / 2.0, f + h / 2.0 * k1);
            let k3 = rhs(r + h / 2.0, f + h / 2.0 * k2);
            let k4 = rhs(r + h, f + h * k3);
            f += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            r += h;
        }
        f
    }

    #[test]
    fn bs_profile_against_integration_oracle() {
        let f = g2_closed_form(GeometryTag::BsComplete, 1.0).f[0].clone();
        for (r0, r1) in [(1.5, 6.0), (3.0, 40.0)] {
            let num = rk4_bs(r0, f.at(r0), r1);
            assert!((num - f.at(r1)).abs() < 1e-9 * f.at(r1));
        }
    }

    #[test]
    fn closed_forms_solve_g2_systems() {
        for tag in GeometryTag::ALL {
            let a = g2_closed_form(tag, 1.7);
            let lo = match tag {
                GeometryTag::Bggg => 2.251,
                GeometryTag::BsComplete => 1.001,
                GeometryTag::BsCone => 0.1,
            };
            for r in crate::grid::logspace(lo, 1e3, 50) {
                let jet = a.jet(r);
                let e = ode_residual(tag, InstantonMode::G2, &jet, r).unwrap();
                let scale = jet.iter().map(|(v, d)| v.abs() + d.abs() * r).fold(1.0, f64::max) * r.powi(3);
                assert!(e.iter().all(|x| x.abs() < 1e-13 * scale), "{tag} r={r} {e:?}");
            }
        }
    }

    #[test]
    fn cone_residual_is_exact() {
        let e = ode_residual(GeometryTag::BsCone, InstantonMode::G2, &[(2.0 * 9.0, 2.0 * 2.0 * 3.0); 3], 3.0).unwrap();
        assert_eq!(e, [0.0; 3]);
    }

    #[test]
    fn bggg_transverse_rows() {
        let g = bggg_transverse_g2_profile(1.0);
        for r in [2.3, 5.0, 40.0] {
            let jet = [(0.0, 0.0), (g.at(r), g.derivative_at(r).unwrap()), (0.0, 0.0)];
            let e = ode_residual(GeometryTag::Bggg, InstantonMode::G2, &jet, r).unwrap();
            assert!(e[1].abs() < 1e-12 * r.powi(3) * g.at(r).abs().max(1.0));
        }
    }
}
