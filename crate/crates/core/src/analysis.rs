//! Chern–Simons density, the small-ε scaling limit, and branch sweeps.

use std::f64::consts::{FRAC_PI_2, PI};

use gauss_quad::GaussLegendre;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{InvariantForm, Monomial, DIM};
use crate::geometry::{g2_forms, make_profiles, GeometryTag, ProfileSet};
use crate::instanton::{coupled_form_residual, curvature, ConnectionAnsatz, InstantonMode, ResidualProbe};
use crate::scalar::RadialScalar;
use crate::solvers::principal_profile;
use crate::solvers::tan_root::{solve_tan_target, RootSign};

/// `dr∧η₁⁺∧η₂⁺∧η₃⁺∧η₁⁻∧η₂⁻∧η₃⁻`
pub fn top_monomial() -> Monomial {
    Monomial::sorted(&(0..DIM).collect::<Vec<_>>())
}

/// The 7-form `−½ A∧(F∧ψ − F³/12)` obtained by integrating the
/// Chern–Simons integrand along `Ā = tA` over `t ∈ [0, 1]`.
pub fn chern_simons_form(a: &ConnectionAnsatz, ps: &ProfileSet) -> InvariantForm {
    let af = a.to_form();
    let f = curvature(a);
    let psi = g2_forms(ps).psi;
    let f_psi = f.wedge(&psi).expect("6-form");
    let cube = f.wedge(&f).and_then(|ff| ff.wedge(&f)).expect("6-form");
    let inner = f_psi.sub(&cube.scale_by(1.0 / 12.0)).expect("6-forms");
    af.wedge(&inner).expect("7-form").scale_by(-0.5)
}

/// Coefficient of the top-degree monomial of [`chern_simons_form`]. The
/// volume of the `S³ × S³` directions is not included.
pub fn chern_simons_density(a: &ConnectionAnsatz, ps: &ProfileSet) -> RadialScalar {
    chern_simons_form(a, ps)
        .coefficient(top_monomial())
        .cloned()
        .unwrap_or_else(RadialScalar::zero)
}

/// `|density| / ((1 + max|A|)(1 + max|ψ|)(1 + max|F|)³)` at `r`.
pub fn chern_simons_density_normalized(a: &ConnectionAnsatz, ps: &ProfileSet, r: f64) -> Result<f64> {
    let density = chern_simons_density(a, ps).value(r)?;
    let amax = 1.0 + a.to_form().evaluate(r)?.max_abs();
    let fmax = 1.0 + curvature(a).evaluate(r)?.max_abs();
    let psimax = 1.0 + g2_forms(ps).psi.evaluate(r)?.max_abs();
    Ok(density.abs() / (amax * psimax * fmax.powi(3)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChernSimonsValue {
    pub value: f64,
    /// Difference between the `n`- and `2n`-panel rules.
    pub error_estimate: f64,
    pub panels: usize,
    pub converged: bool,
}

const NODES: usize = 8;

fn composite_gauss(g: &RadialScalar, lo: f64, hi: f64, panels: usize) -> Result<f64> {
    let rule = GaussLegendre::new(NODES.try_into().expect("nonzero"));
    let h = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let a = lo + p as f64 * h;
        let b = if p + 1 == panels { hi } else { a + h };
        let mut bad = None;
        let v = rule.integrate(a, b, |r| match g.value(r) {
            Ok(v) => v,
            Err(e) => {
                bad.get_or_insert(e);
                f64::NAN
            }
        });
        if let Some(e) = bad {
            return Err(e);
        }
        total += v;
    }
    Ok(total)
}

/// `∫ density dr` over `range` by composite 8-point Gauss–Legendre,
/// doubling the panel count until two successive rules agree to `tol`
/// (relative to `max(1, |value|)`) or `max_panels` is reached.
pub fn chern_simons_value(
    a: &ConnectionAnsatz,
    ps: &ProfileSet,
    range: (f64, f64),
    tol: f64,
    max_panels: usize,
) -> Result<ChernSimonsValue> {
    let (lo, hi) = range;
    if !(lo < hi) || !ps.domain.contains(lo) || !ps.domain.contains(hi) {
        return Err(Error::InvalidParameter(format!(
            "integration range ({lo}, {hi}) must be increasing and inside the domain"
        )));
    }
    let density = chern_simons_density(a, ps);
    let mut panels = 16;
    let mut prev = composite_gauss(&density, lo, hi, panels)?;
    loop {
        let next = composite_gauss(&density, lo, hi, 2 * panels)?;
        let err = (next - prev).abs();
        panels *= 2;
        let converged = err <= tol * next.abs().max(1.0);
        if converged || panels >= max_panels {
            return Ok(ChernSimonsValue {
                value: next,
                error_estimate: err,
                panels,
                converged,
            });
        }
        prev = next;
    }
}

/// Normalization of the limiting G2-instanton: `ε⁻¹ f_c → L_C0 (16r²−81)/(16r²−9)`.
pub const LIMIT_C0: f64 = 3.0;

/// `3 (16r²−81)/(16r²−9)`
pub fn limit_profile(r: f64) -> f64 {
    LIMIT_C0 * 16.0 * (r - 2.25) * (r + 2.25) / (16.0 * r * r - 9.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitReport {
    pub epsilon: f64,
    pub c_of_eps: f64,
    pub sup_error: f64,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_count: usize,
    /// Max normalized `(ε²/6)F³ − F∧ψ` for `B = ε⁻¹A_c` over the grid.
    pub scaled_residual: f64,
}

/// Compares `ε⁻¹ f_c` at `c = arctan(1/ε)` with the limiting profile.
pub fn scaling_limit_error(epsilon: f64, grid: &[f64]) -> Result<LimitReport> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    check_grid(grid)?;
    let c = (1.0 / epsilon).atan();
    let f = principal_profile(c)?;
    let sup_error = sup_deviation(&f, epsilon, grid)?;
    let ps = make_profiles(GeometryTag::Bggg, 1.0)?;
    let b = ConnectionAnsatz::single(f).scaled(1.0 / epsilon);
    let residual = coupled_form_residual(&b, &ps, epsilon * epsilon);
    let probe = ResidualProbe::with_residual(residual, &b, &ps, InstantonMode::Deformed);
    let interior: Vec<f64> = grid.iter().copied().filter(|&r| r > 2.25).collect();
    Ok(LimitReport {
        epsilon,
        c_of_eps: c,
        sup_error,
        grid_min: grid[0],
        grid_max: grid[grid.len() - 1],
        grid_count: grid.len(),
        scaled_residual: probe.max_over(&interior)?,
    })
}

/// Negative control: `sup |ε⁻¹ f_c − L|` with `c` held fixed.
pub fn fixed_c_limit_error(tan_c: f64, epsilon: f64, grid: &[f64]) -> Result<f64> {
    check_grid(grid)?;
    sup_deviation(&principal_profile(tan_c)?, epsilon, grid)
}

fn sup_deviation(f: &RadialScalar, epsilon: f64, grid: &[f64]) -> Result<f64> {
    grid.iter()
        .try_fold(0.0f64, |acc, &r| Ok(acc.max((f.value(r)? / epsilon - limit_profile(r)).abs())))
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty grid".into()));
    }
    Ok(())
}

/// `3(π/2 + kπ) − 3c`, the large-`r` limit of the branch-`k` root.
pub fn asymptote_value(c: f64, branch: u32) -> f64 {
    3.0 * (FRAC_PI_2 + branch as f64 * PI) - 3.0 * c
}

/// What a sweep grid parametrizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    /// `C = (16r² − 81)/24`
    C,
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchPoint {
    pub branch: u32,
    pub r: f64,
    pub big_c: f64,
    pub f: f64,
    pub residual: f64,
    pub converged: bool,
}

/// Roots of `tan(y/3 + c) = C/y` on branches `0..=k_max` for every grid
/// value, ordered by branch then grid index.
pub fn branch_sweep(c: f64, k_max: u32, axis: SweepAxis, grid: &[f64]) -> Result<Vec<BranchPoint>> {
    let mut out = Vec::with_capacity(grid.len() * (k_max as usize + 1));
    for k in 0..=k_max {
        for &x in grid {
            let (r, big_c) = match axis {
                SweepAxis::C => (((24.0 * x + 81.0) / 16.0).sqrt(), x),
                SweepAxis::R => (x, 16.0 * (x - 2.25) * (x + 2.25) / 24.0),
            };
            let root = solve_tan_target(24.0 * big_c, c, k, RootSign::Positive)?;
            out.push(BranchPoint {
                branch: k,
                r,
                big_c,
                f: root.f,
                residual: root.residual,
                converged: root.converged,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{linspace, logspace};

    #[test]
    fn asymptotes() {
        assert!((asymptote_value(0.0, 0) - 1.5 * PI).abs() < 1e-15);
        assert!((asymptote_value(PI / 4.0, 0) - 0.75 * PI).abs() < 1e-15);
        assert!((asymptote_value(0.5, 2) - (3.0 * (FRAC_PI_2 + 2.0 * PI) - 1.5)).abs() < 1e-14);
    }

    #[test]
    fn zero_ansatz_density() {
        let ps = make_profiles(GeometryTag::Bggg, 1.0).unwrap();
        let d = chern_simons_density(&ConnectionAnsatz::zero(), &ps);
        assert_eq!(d.value(3.0).unwrap(), 0.0);
        let v = chern_simons_value(&ConnectionAnsatz::zero(), &ps, (2.25, 10.0), 1e-12, 1024).unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn single_component_density_vanishes() {
        let ps = make_profiles(GeometryTag::Bggg, 1.0).unwrap();
        let a = ConnectionAnsatz::single(RadialScalar::r());
        for r in [2.5, 10.0, 500.0] {
            assert!(chern_simons_density_normalized(&a, &ps, r).unwrap() < 1e-12);
        }
    }

    #[test]
    fn two_component_density_is_reported() {
        let ps = make_profiles(GeometryTag::Bggg, 1.0).unwrap();
        let r = RadialScalar::r();
        let a = ConnectionAnsatz::new(r.clone(), (r * 0.5).sin(), RadialScalar::zero());
        let v = chern_simons_value(&a, &ps, (2.5, 20.0), 1e-10, 4096).unwrap();
        assert!(v.value.is_finite());
    }

    #[test]
    fn limit_errors_decrease() {
        let grid = linspace(2.25, 50.0, 200);
        let errs: Vec<f64> = [1e-1, 1e-2, 1e-3]
            .iter()
            .map(|&e| scaling_limit_error(e, &grid).unwrap().sup_error)
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2] && errs[2] < 1e-2, "{errs:?}");
    }

    #[test]
    fn fixed_c_does_not_converge() {
        let grid = linspace(2.25, 50.0, 50);
        let a = fixed_c_limit_error(0.7, 1e-1, &grid).unwrap();
        let b = fixed_c_limit_error(0.7, 1e-3, &grid).unwrap();
        assert!(b > a && b > 1.0);
    }

    #[test]
    fn sweep_structure() {
        let c = 0.3;
        let pts = branch_sweep(c, 3, SweepAxis::C, &[0.0, 1.0, 1e3, 1e9]).unwrap();
        assert_eq!(pts.len(), 16);
        assert_eq!(pts[0].f, 0.0);
        for p in pts.iter().filter(|p| p.branch >= 1) {
            assert!(p.f >= 3.0 * (p.branch as f64 * PI - c));
            assert!(p.f > 0.0);
        }
        let far = pts.iter().find(|p| p.branch == 0 && p.big_c == 1e9).unwrap();
        assert!((far.f - asymptote_value(c, 0)).abs() < 1e-6);
        let by_r = branch_sweep(c, 0, SweepAxis::R, &logspace(2.25, 100.0, 10)).unwrap();
        assert_eq!(by_r[0].f, 0.0);
    }
}
