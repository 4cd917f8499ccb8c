//! The three cohomogeneity-one G2-structures on ℝ⁴ × S³.
//!
//! Each structure is given by profile functions `A₁, A₂, B₁, B₂` (half-lengths
//! of the invariant coframe) and the warp `ds/dr`, from which the SU(3)
//! structure `(ω, Ω⁺, Ω⁻)` on the principal orbits and the G2 forms
//! `φ = ds∧ω + Ω⁺`, `ψ = ½ω∧ω − ds∧Ω⁻` are assembled.
//!
//! BGGG profiles (radial coordinate `r ∈ [9/4, ∞)`):
//!
//! ```text
//! A₁ = √((r−9/4)(r+9/4)) / √((r−3/4)(r+3/4))
//! A₂ = √((r−9/4)(r+3/4)/3)      B₁ = 2r/3
//! B₂ = √((r+9/4)(r−3/4)/3)      ds/dr = 1/A₁
//! ```
//!
//! These are the profiles for which `dφ = dψ = 0` holds; see the
//! `bggg_*` tests below.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{eta_minus as m, eta_plus as p, InvariantForm, DR};
use crate::scalar::{Domain, RadialScalar};

/// Radius of the singular orbit of the BGGG structure.
pub const BGGG_SINGULAR_ORBIT: f64 = 9.0 / 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GeometryTag {
    #[serde(rename = "bggg")]
    Bggg,
    #[serde(rename = "bs")]
    BsComplete,
    #[serde(rename = "cone")]
    BsCone,
}

impl GeometryTag {
    pub const ALL: [GeometryTag; 3] = [GeometryTag::Bggg, GeometryTag::BsComplete, GeometryTag::BsCone];

    pub fn name(self) -> &'static str {
        match self {
            GeometryTag::Bggg => "bggg",
            GeometryTag::BsComplete => "bs",
            GeometryTag::BsCone => "cone",
        }
    }
}

impl fmt::Display for GeometryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeometryTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bggg" => Ok(GeometryTag::Bggg),
            "bs" | "bs-complete" | "bs_complete" => Ok(GeometryTag::BsComplete),
            "cone" | "bs-cone" | "bs_cone" => Ok(GeometryTag::BsCone),
            other => Err(Error::InvalidParameter(format!("unknown geometry `{other}`"))),
        }
    }
}

/// Profile functions of one invariant G2-structure.
#[derive(Clone, Debug)]
pub struct ProfileSet {
    pub tag: GeometryTag,
    pub a1: RadialScalar,
    pub a2: RadialScalar,
    pub b1: RadialScalar,
    pub b2: RadialScalar,
    /// `ds/dr`
    pub warp: RadialScalar,
    pub domain: Domain,
}

/// Builds the profiles. `bs_scale` is the Bryant–Salamon constant `c`
/// (complete metric for `c > 0`, usually 1); it is ignored for the other
/// two structures.
pub fn make_profiles(tag: GeometryTag, bs_scale: f64) -> Result<ProfileSet> {
    let r = RadialScalar::r();
    let third = 1.0 / 3.0;
    match tag {
        GeometryTag::Bggg => {
            let domain = Domain::closed_from(BGGG_SINGULAR_ORBIT);
            let a1 = (((&r - 9.0 / 4.0) * (&r + 9.0 / 4.0)).sqrt()
                / ((&r - 3.0 / 4.0) * (&r + 3.0 / 4.0)).sqrt())
            .on(domain);
            let a2 = ((&r - 9.0 / 4.0) * (&r + 3.0 / 4.0) * third).sqrt().on(domain);
            let b1 = (&r * (2.0 / 3.0)).on(domain);
            let b2 = ((&r + 9.0 / 4.0) * (&r - 3.0 / 4.0) * third).sqrt().on(domain);
            let warp = (((&r - 3.0 / 4.0) * (&r + 3.0 / 4.0)).sqrt()
                / ((&r - 9.0 / 4.0) * (&r + 9.0 / 4.0)).sqrt())
            .on(domain);
            Ok(ProfileSet {
                tag,
                a1,
                a2,
                b1,
                b2,
                warp,
                domain,
            })
        }
        GeometryTag::BsComplete | GeometryTag::BsCone => {
            let c = if tag == GeometryTag::BsCone { 0.0 } else { bs_scale };
            if !(c.is_finite() && c >= 0.0) || (tag == GeometryTag::BsComplete && c == 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "Bryant–Salamon scale must be positive, got {bs_scale}"
                )));
            }
            let domain = if c == 0.0 {
                Domain::open_from(0.0)
            } else {
                Domain::closed_from(c)
            };
            let (a, warp) = if c == 0.0 {
                (&r * third, RadialScalar::one())
            } else {
                let root = (1.0 - c.powi(3) / r.clone().powi(3)).sqrt();
                (&r * third * &root, 1.0 / root)
            };
            let b = &r * (1.0 / 3f64.sqrt());
            Ok(ProfileSet {
                tag,
                a1: a.clone().on(domain),
                a2: a.on(domain),
                b1: b.clone().on(domain),
                b2: b.on(domain),
                warp: warp.on(domain),
                domain,
            })
        }
    }
}

impl ProfileSet {
    /// Radius where the fibres collapse and the warp diverges.
    pub fn singular_orbit(&self) -> Option<f64> {
        match self.tag {
            GeometryTag::BsCone => None,
            _ => Some(self.domain.lo),
        }
    }

    /// Smallest radius usable for interior evaluation given an offset from
    /// the singular orbit (or from 0 for the cone).
    pub fn interior_start(&self, offset: f64) -> f64 {
        self.domain.lo + offset
    }
}

/// SU(3)-structure `(ω, Ω⁺, Ω⁻)` on the principal orbits and the diagonal
/// metric coefficients `h` in coframe order `η₁⁺, η₂⁺, η₃⁺, η₁⁻, η₂⁻, η₃⁻`.
#[derive(Clone, Debug)]
pub struct Su3Structure {
    pub omega: InvariantForm,
    pub omega_plus: InvariantForm,
    pub omega_minus: InvariantForm,
    pub metric: [RadialScalar; 6],
}

fn mono(indices: &[usize], coeff: RadialScalar) -> InvariantForm {
    InvariantForm::monomial(indices, coeff)
}

pub fn su3_structure(ps: &ProfileSet) -> Su3Structure {
    let ProfileSet { a1, a2, b1, b2, .. } = ps;
    let sum = |forms: &[InvariantForm]| {
        forms
            .iter()
            .skip(1)
            .fold(forms[0].clone(), |acc, f| acc.add(f).expect("equal degrees"))
    };

    let omega = sum(&[
        mono(&[m(1), p(1)], a1 * b1 * 4.0),
        mono(&[m(2), p(2)], a2 * b2 * 4.0),
        mono(&[m(3), p(3)], a2 * b2 * 4.0),
    ]);
    let omega_plus = sum(&[
        mono(&[m(1), m(2), m(3)], b1 * b2.clone().powi(2) * 8.0),
        mono(&[p(1), p(2), m(3)], -(a1 * a2 * b2 * 8.0)),
        mono(&[p(1), m(2), p(3)], -(a1 * a2 * b2 * 8.0)),
        mono(&[m(1), p(2), p(3)], -(a2.clone().powi(2) * b1 * 8.0)),
    ]);
    let omega_minus = sum(&[
        mono(&[p(1), p(2), p(3)], -(a2.clone().powi(2) * a1 * 8.0)),
        mono(&[m(1), m(2), p(3)], b1 * b2 * a2 * 8.0),
        mono(&[m(1), p(2), m(3)], b1 * b2 * a2 * 8.0),
        mono(&[p(1), m(2), m(3)], a1 * b2.clone().powi(2) * 8.0),
    ]);
    let sq = |x: &RadialScalar| (x * 2.0).powi(2);
    let metric = [sq(a1), sq(a2), sq(a2), sq(b1), sq(b2), sq(b2)];
    Su3Structure {
        omega,
        omega_plus,
        omega_minus,
        metric,
    }
}

/// The G2 3-form `φ` and its Hodge dual 4-form `ψ = *φ`.
#[derive(Clone, Debug)]
pub struct G2Forms {
    pub phi: InvariantForm,
    pub psi: InvariantForm,
}

pub fn g2_forms(ps: &ProfileSet) -> G2Forms {
    let su3 = su3_structure(ps);
    let ds = InvariantForm::generator(DR).scale(&ps.warp);
    let phi = ds
        .wedge(&su3.omega)
        .and_then(|f| f.add(&su3.omega_plus))
        .expect("degree 3");
    let psi = su3
        .omega
        .wedge(&su3.omega)
        .map(|f| f.scale_by(0.5))
        .and_then(|f| f.sub(&ds.wedge(&su3.omega_minus)?))
        .expect("degree 4");
    G2Forms { phi, psi }
}

/// Largest coefficients of `dφ` and `dψ` over a grid, raw and normalized by
/// the largest coefficient of `φ` resp. `ψ` at the same point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TorsionResidual {
    pub dphi_max: f64,
    pub dpsi_max: f64,
    pub dphi_normalized: f64,
    pub dpsi_normalized: f64,
}

impl TorsionResidual {
    pub fn max_normalized(&self) -> f64 {
        self.dphi_normalized.max(self.dpsi_normalized)
    }
}

pub fn torsion_residual(ps: &ProfileSet, grid: &[f64]) -> Result<TorsionResidual> {
    let forms = g2_forms(ps);
    let dphi = forms.phi.d()?;
    let dpsi = forms.psi.d()?;
    let mut out = TorsionResidual {
        dphi_max: 0.0,
        dpsi_max: 0.0,
        dphi_normalized: 0.0,
        dpsi_normalized: 0.0,
    };
    for &r in grid {
        if !ps.domain.contains_interior(r) {
            return Err(Error::OutsideDomain {
                r,
                lo: ps.domain.lo,
                hi: ps.domain.hi,
            });
        }
        let a = dphi.evaluate(r)?.max_abs();
        let b = dpsi.evaluate(r)?.max_abs();
        let sa = forms.phi.evaluate(r)?.max_abs();
        let sb = forms.psi.evaluate(r)?.max_abs();
        out.dphi_max = out.dphi_max.max(a);
        out.dpsi_max = out.dpsi_max.max(b);
        out.dphi_normalized = out.dphi_normalized.max(a / sa);
        out.dpsi_normalized = out.dpsi_normalized.max(b / sb);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::Monomial;
    use crate::grid::logspace;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn bggg_at_singular_orbit() {
        let ps = make_profiles(GeometryTag::Bggg, 0.0).unwrap();
        let r = 9.0 / 4.0;
        assert_eq!(ps.a1.value(r).unwrap(), 0.0);
        assert_eq!(ps.a2.value(r).unwrap(), 0.0);
        assert_eq!(ps.b1.value(r).unwrap(), 1.5);
        assert!(close(ps.b2.value(r).unwrap(), 1.5, 1e-15));
        assert!(ps.a1.value(2.0).is_err());
    }

    #[test]
    fn bggg_circle_has_finite_length() {
        let ps = make_profiles(GeometryTag::Bggg, 0.0).unwrap();
        assert!((ps.a1.value(1e6).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bggg_profile_identities() {
        let ps = make_profiles(GeometryTag::Bggg, 0.0).unwrap();
        for r in logspace(2.2501, 1e3, 50) {
            let (a2, b2) = (ps.a2.at(r), ps.b2.at(r));
            let prod = ((16.0 * r * r - 81.0) * (16.0 * r * r - 9.0)).sqrt() / 48.0;
            assert!(close(a2 * b2, prod, 1e-13));
            assert!(close(a2 * a2 - b2 * b2, -r, 1e-13));
            assert!(close(ps.warp.at(r) * ps.a1.at(r), 1.0, 1e-14));
        }
    }

    #[test]
    fn cone_profiles() {
        let ps = make_profiles(GeometryTag::BsCone, 7.0).unwrap();
        assert!(close(ps.a1.value(3.0).unwrap(), 1.0, 1e-15));
        assert!(close(ps.b2.value(3.0).unwrap(), 3f64.sqrt(), 1e-15));
        assert_eq!(ps.warp.value(3.0).unwrap(), 1.0);
        assert!(ps.a1.value(0.0).is_err());
    }

    #[test]
    fn bs_complete_collapses_at_zero_section() {
        let ps = make_profiles(GeometryTag::BsComplete, 1.0).unwrap();
        assert_eq!(ps.a1.value(1.0).unwrap(), 0.0);
        assert_eq!(ps.a2.value(1.0).unwrap(), 0.0);
        assert!(close(ps.b1.value(1.0).unwrap(), 1.0 / 3f64.sqrt(), 1e-15));
        assert!(make_profiles(GeometryTag::BsComplete, 0.0).is_err());
    }

    #[test]
    fn su3_coefficients() {
        let ps = make_profiles(GeometryTag::Bggg, 0.0).unwrap();
        let s = su3_structure(&ps);
        let r = 4.0;
        let (a1, a2, b1, b2) = (ps.a1.at(r), ps.a2.at(r), ps.b1.at(r), ps.b2.at(r));
        // η₁⁻∧η₁⁺ = −η₁⁺∧η₁⁻ in canonical order
        let w = s.omega.evaluate(r).unwrap();
        assert!(close(w.get(Monomial::sorted(&[1, 4])), -4.0 * a1 * b1, 1e-15));
        let op = s.omega_plus.evaluate(r).unwrap();
        assert!(close(op.get(Monomial::sorted(&[4, 5, 6])), 8.0 * b1 * b2 * b2, 1e-15));
        let om = s.omega_minus.evaluate(r).unwrap();
        assert!(close(om.get(Monomial::sorted(&[1, 2, 3])), -8.0 * a2 * a2 * a1, 1e-15));
        assert!(close(s.metric[0].at(r), 4.0 * a1 * a1, 1e-15));
        assert!(close(s.metric[5].at(r), 4.0 * b2 * b2, 1e-15));
    }

    #[test]
    fn phi_coefficients() {
        let ps = make_profiles(GeometryTag::Bggg, 0.0).unwrap();
        let g = g2_forms(&ps);
        let r = 5.0;
        let phi = g.phi.evaluate(r).unwrap();
        let expected = -4.0 * ps.warp.at(r) * ps.a1.at(r) * ps.b1.at(r);
        assert!(close(phi.get(Monomial::sorted(&[0, 1, 4])), expected, 1e-15));

        let cone = g2_forms(&make_profiles(GeometryTag::BsCone, 0.0).unwrap());
        let t = cone.phi.evaluate(1.0).unwrap();
        let expected = 8.0 / (3.0 * 3f64.sqrt());
        assert!(close(t.get(Monomial::sorted(&[4, 5, 6])), expected, 1e-15));
    }

    #[test]
    fn psi_dr_free_part_is_half_omega_squared() {
        let ps = make_profiles(GeometryTag::BsComplete, 1.0).unwrap();
        let g = g2_forms(&ps);
        let s = su3_structure(&ps);
        let half = s.omega.wedge(&s.omega).unwrap().scale_by(0.5);
        let r = 2.5;
        let psi = g.psi.evaluate(r).unwrap();
        let half = half.evaluate(r).unwrap();
        for (mo, v) in psi.iter().filter(|(mo, _)| !mo.contains(DR)) {
            assert!(close(v, half.get(mo), 1e-15));
        }
        assert_eq!(psi.iter().filter(|(mo, _)| !mo.contains(DR)).count(), half.len());
    }

    #[test]
    fn all_three_structures_are_torsion_free() {
        let cases = [
            (GeometryTag::BsCone, 0.1, 1e-9),
            (GeometryTag::BsComplete, 1.0 + 1e-3, 1e-8),
            (GeometryTag::Bggg, 9.0 / 4.0 + 1e-3, 1e-8),
        ];
        for (tag, lo, tol) in cases {
            let ps = make_profiles(tag, 1.0).unwrap();
            let res = torsion_residual(&ps, &logspace(lo, 50.0, 60)).unwrap();
            assert!(res.max_normalized() < tol, "{tag}: {res:?}");
        }
    }

    #[test]
    fn cone_raw_residuals_small() {
        let ps = make_profiles(GeometryTag::BsCone, 0.0).unwrap();
        let res = torsion_residual(&ps, &logspace(0.1, 50.0, 40)).unwrap();
        assert!(res.dphi_max < 1e-9 && res.dpsi_max < 1e-9, "{res:?}");
    }

    #[test]
    fn perturbed_profiles_have_torsion() {
        let mut ps = make_profiles(GeometryTag::BsCone, 0.0).unwrap();
        ps.b1 = &ps.b1 * 1.1;
        let res = torsion_residual(&ps, &logspace(0.5, 50.0, 20)).unwrap();
        assert!(res.max_normalized() > 1e-2, "{res:?}");
    }

    #[test]
    fn grid_point_on_singular_orbit_rejected() {
        let ps = make_profiles(GeometryTag::Bggg, 0.0).unwrap();
        assert!(torsion_residual(&ps, &[9.0 / 4.0, 3.0]).is_err());
    }
}
