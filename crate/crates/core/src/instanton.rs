//! Abelian connections `A = f₁η₁⁺ + f₂η₂⁺ + f₃η₃⁺` and the (deformed)
//! G2-instanton conditions.
//!
//! The form-level residuals `F∧ψ` and `⅙F³ − F∧ψ` are computed directly
//! from the exterior calculus. The reduced ODE systems are evaluated as
//! stand-alone formulas taking `(f, f′)` pairs; [`crosscheck_with`]
//! compares the two routes monomial by monomial.
//!
//! Both residual 6-forms only have the three monomials
//! `dr∧η₁₂₃⁺⁺⁺∧η⁻_j∧η⁻_k` (the `η⁻_i` factor omitted), and the one missing
//! `η⁻_i` pairs with the `i`-th ODE component.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{eta_minus, eta_plus, InvariantForm, Monomial, DR};
use crate::geometry::{g2_forms, GeometryTag, ProfileSet, BGGG_SINGULAR_ORBIT};
use crate::scalar::RadialScalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum InstantonMode {
    #[serde(rename = "g2")]
    G2,
    #[serde(rename = "deformed")]
    Deformed,
}

impl fmt::Display for InstantonMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InstantonMode::G2 => "g2",
            InstantonMode::Deformed => "deformed",
        })
    }
}

impl FromStr for InstantonMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "g2" => Ok(InstantonMode::G2),
            "deformed" | "dg2" => Ok(InstantonMode::Deformed),
            other => Err(Error::InvalidParameter(format!("unknown mode `{other}`"))),
        }
    }
}

/// Which reading of the BGGG deformed equations for `i ∈ {2, 3}` to use.
///
/// `Literal` uses the coefficient `18 f₂²` in both rows, `Symmetric` uses
/// `18 f_i²`. Only `Symmetric` agrees with the form-level residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
pub enum BgggVariant {
    Literal,
    #[default]
    Symmetric,
}

/// `A = f₁η₁⁺ + f₂η₂⁺ + f₃η₃⁺`.
#[derive(Clone, Debug)]
pub struct ConnectionAnsatz {
    pub f: [RadialScalar; 3],
}

impl ConnectionAnsatz {
    pub fn new(f1: RadialScalar, f2: RadialScalar, f3: RadialScalar) -> Self {
        ConnectionAnsatz { f: [f1, f2, f3] }
    }

    pub fn zero() -> Self {
        Self::new(RadialScalar::zero(), RadialScalar::zero(), RadialScalar::zero())
    }

    /// `f η₁⁺`, the U(1)-invariant ansatz.
    pub fn single(f: RadialScalar) -> Self {
        Self::new(f, RadialScalar::zero(), RadialScalar::zero())
    }

    /// `f (a₁η₁⁺ + a₂η₂⁺ + a₃η₃⁺)`.
    pub fn aligned(f: &RadialScalar, a: [f64; 3]) -> Self {
        Self::new(f * a[0], f * a[1], f * a[2])
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self::new(&self.f[0] * k, &self.f[1] * k, &self.f[2] * k)
    }

    pub fn to_form(&self) -> InvariantForm {
        (1..=3).fold(InvariantForm::zero(1), |acc, i| {
            acc.add(&InvariantForm::generator(eta_plus(i)).scale(&self.f[i - 1]))
                .expect("1-forms")
        })
    }

    /// `(f_i(r), f_i′(r))` for `i = 1, 2, 3`.
    pub fn jet(&self, r: f64) -> [(f64, f64); 3] {
        std::array::from_fn(|i| (self.f[i].at(r), self.f[i].derivative().at(r)))
    }

    /// Whether every `f_i` vanishes at `r_min` (the zero section), the
    /// condition for `A` to extend over the singular orbit.
    pub fn extends_smoothly(&self, r_min: f64, tol: f64) -> bool {
        self.f.iter().all(|f| f.at(r_min).abs() <= tol)
    }
}

/// `F_A = dA` (abelian gauge group).
pub fn curvature(a: &ConnectionAnsatz) -> InvariantForm {
    a.to_form().d().expect("2-form")
}

/// `F∧ψ` in G2 mode, `⅙F³ − F∧ψ` in deformed mode.
pub fn form_residual(a: &ConnectionAnsatz, ps: &ProfileSet, mode: InstantonMode) -> InvariantForm {
    let psi = g2_forms(ps).psi;
    let f = curvature(a);
    let f_psi = f.wedge(&psi).expect("6-form");
    match mode {
        InstantonMode::G2 => f_psi,
        InstantonMode::Deformed => cubic_minus(&f, &f_psi, 1.0),
    }
}

/// `(k/6)F³ − F∧ψ`: the deformed equation with a coupling `k = ε²` in
/// front of the cubic term.
pub fn coupled_form_residual(a: &ConnectionAnsatz, ps: &ProfileSet, coupling: f64) -> InvariantForm {
    let psi = g2_forms(ps).psi;
    let f = curvature(a);
    let f_psi = f.wedge(&psi).expect("6-form");
    cubic_minus(&f, &f_psi, coupling)
}

fn cubic_minus(f: &InvariantForm, f_psi: &InvariantForm, coupling: f64) -> InvariantForm {
    let cube = f.wedge(f).and_then(|ff| ff.wedge(f)).expect("6-form");
    cube.scale_by(coupling / 6.0).sub(f_psi).expect("6-forms")
}

/// Pointwise size of a residual 6-form relative to the terms it is built
/// from: `max|C| / ((1 + max|ψ|)(1 + max|F|)^p)` with `p = 1` in G2 mode and
/// `p = 3` in deformed mode. Raw coefficients grow like `r⁶` on the
/// asymptotically conical ends, so absolute thresholds are not meaningful.
#[derive(Clone, Debug)]
pub struct ResidualProbe {
    residual: InvariantForm,
    psi: InvariantForm,
    curvature: InvariantForm,
    power: i32,
}

impl ResidualProbe {
    pub fn new(a: &ConnectionAnsatz, ps: &ProfileSet, mode: InstantonMode) -> Self {
        Self::with_residual(form_residual(a, ps, mode), a, ps, mode)
    }

    /// Probe for an externally built residual (e.g. a coupled one).
    pub fn with_residual(residual: InvariantForm, a: &ConnectionAnsatz, ps: &ProfileSet, mode: InstantonMode) -> Self {
        ResidualProbe {
            residual,
            psi: g2_forms(ps).psi,
            curvature: curvature(a),
            power: match mode {
                InstantonMode::G2 => 1,
                InstantonMode::Deformed => 3,
            },
        }
    }

    pub fn scale(&self, r: f64) -> Result<f64> {
        let psi = 1.0 + self.psi.evaluate(r)?.max_abs();
        let f = 1.0 + self.curvature.evaluate(r)?.max_abs();
        Ok(psi * f.powi(self.power))
    }

    pub fn normalized(&self, r: f64) -> Result<f64> {
        Ok(self.residual.evaluate(r)?.max_abs() / self.scale(r)?)
    }

    /// Largest normalized residual over a grid.
    pub fn max_over(&self, grid: &[f64]) -> Result<f64> {
        grid.iter().try_fold(0.0f64, |acc, &r| Ok(acc.max(self.normalized(r)?)))
    }
}

/// The 6-form monomial paired with the `i`-th ODE component (`i = 1, 2, 3`):
/// `dr∧η₁⁺∧η₂⁺∧η₃⁺` wedged with the two `η⁻_j`, `j ≠ i`.
pub fn component_monomial(i: usize) -> Monomial {
    let mut idx = vec![DR, eta_plus(1), eta_plus(2), eta_plus(3)];
    idx.extend((1..=3).filter(|&j| j != i).map(eta_minus));
    Monomial::sorted(&idx)
}

fn check_interior(tag: GeometryTag, r: f64) -> Result<()> {
    let (singular, system) = match tag {
        GeometryTag::Bggg => (BGGG_SINGULAR_ORBIT, "BGGG"),
        GeometryTag::BsComplete => (1.0, "Bryant–Salamon"),
        GeometryTag::BsCone => (0.0, "cone"),
    };
    if r == singular || (tag == GeometryTag::BsComplete && r == 0.0) {
        return Err(Error::SingularPoint { r, system });
    }
    if !(r > singular) || !r.is_finite() {
        return Err(Error::OutsideDomain {
            r,
            lo: singular,
            hi: f64::INFINITY,
        });
    }
    Ok(())
}

fn cyclic(i: usize) -> (usize, usize) {
    ((i + 1) % 3, (i + 2) % 3)
}

/// Left-hand sides of the reduced ODE systems at `r`, using the
/// symmetric reading of the BGGG deformed rows.
pub fn ode_residual(tag: GeometryTag, mode: InstantonMode, f: &[(f64, f64); 3], r: f64) -> Result<[f64; 3]> {
    ode_residual_variant(tag, mode, BgggVariant::Symmetric, f, r)
}

/// [`ode_residual`] with an explicit choice of BGGG variant; the variant is
/// ignored for the other geometries and for G2 mode.
pub fn ode_residual_variant(
    tag: GeometryTag,
    mode: InstantonMode,
    variant: BgggVariant,
    f: &[(f64, f64); 3],
    r: f64,
) -> Result<[f64; 3]> {
    check_interior(tag, r)?;
    let q = 27.0 / 4.0;
    let mut out = [0.0; 3];
    match (tag, mode) {
        (GeometryTag::BsCone, InstantonMode::G2) => {
            for (o, &(v, d)) in out.iter_mut().zip(f) {
                *o = d * r - 2.0 * v;
            }
        }
        (GeometryTag::BsCone, InstantonMode::Deformed) => {
            for (i, o) in out.iter_mut().enumerate() {
                let (j, k) = cyclic(i);
                let (v, d) = f[i];
                *o = d * (r.powi(4) + q * v * v) - 2.0 * v * r.powi(3)
                    + q * v * f[j].0 * f[j].1
                    + q * v * f[k].0 * f[k].1;
            }
        }
        (GeometryTag::BsComplete, InstantonMode::G2) => {
            for (o, &(v, d)) in out.iter_mut().zip(f) {
                *o = (r.powi(4) - r) * d - (2.0 * r.powi(3) + 1.0) * v;
            }
        }
        (GeometryTag::BsComplete, InstantonMode::Deformed) => {
            for (i, o) in out.iter_mut().enumerate() {
                let (j, k) = cyclic(i);
                let (v, d) = f[i];
                *o = d * (r.powi(4) + q * v * v - r) - v * (2.0 * r.powi(3) + 1.0)
                    + q * v * (f[j].0 * f[j].1 + f[k].0 * f[k].1);
            }
        }
        (GeometryTag::Bggg, InstantonMode::G2) => {
            let (v, d) = f[0];
            out[0] = bggg_radial(r) * d - 2304.0 * r * v;
            for i in 1..3 {
                let (v, d) = f[i];
                out[i] = r * (16.0 * r * r - 81.0) * d - bggg_transverse(r) * v;
            }
        }
        (GeometryTag::Bggg, InstantonMode::Deformed) => {
            let (v1, d1) = f[0];
            out[0] = (bggg_radial(r) + 576.0 * v1 * v1) * d1
                + 576.0 * (f[1].0 * f[1].1 + f[2].0 * f[2].1 - 4.0 * r) * v1;
            for (i, j) in [(1, 2), (2, 1)] {
                let (v, d) = f[i];
                let quad = match variant {
                    BgggVariant::Literal => f[1].0 * f[1].0,
                    BgggVariant::Symmetric => v * v,
                };
                out[i] = (16.0 * r.powi(3) + 18.0 * quad - 81.0 * r) * d
                    - (bggg_transverse(r) - 18.0 * (d1 * v1 + f[j].1 * f[j].0)) * v;
            }
        }
    }
    Ok(out)
}

/// `(16r²−81)(16r²−9)`, evaluated in factored form so that it is accurate
/// close to `r = 9/4`.
pub fn bggg_radial(r: f64) -> f64 {
    16.0 * (r - 2.25) * (r + 2.25) * (16.0 * r * r - 9.0)
}

/// `(4r+3)(4r²−9r+27/2)`
fn bggg_transverse(r: f64) -> f64 {
    (4.0 * r + 3.0) * (4.0 * r * r - 9.0 * r + 13.5)
}

/// Left side of the single-component BGGG deformed equation
/// `((16r²−81)(16r²−9) + 576f²) f′ − 2304 r f`.
pub fn bggg_reduced_residual(f: f64, df: f64, r: f64) -> f64 {
    (bggg_radial(r) + 576.0 * f * f) * df - 2304.0 * r * f
}

/// Every reduced system is linear in `f′`: `E(f, f′) = M f′ − b`.
/// Returns `(M, b)` at `r` for the values `f`.
pub fn linearize(
    tag: GeometryTag,
    mode: InstantonMode,
    variant: BgggVariant,
    f: [f64; 3],
    r: f64,
) -> Result<([[f64; 3]; 3], [f64; 3])> {
    let jet = |d: [f64; 3]| -> [(f64, f64); 3] { std::array::from_fn(|i| (f[i], d[i])) };
    let e0 = ode_residual_variant(tag, mode, variant, &jet([0.0; 3]), r)?;
    let b = e0.map(|x| -x);
    let mut m = [[0.0; 3]; 3];
    for j in 0..3 {
        let mut unit = [0.0; 3];
        unit[j] = 1.0;
        let ej = ode_residual_variant(tag, mode, variant, &jet(unit), r)?;
        for i in 0..3 {
            m[i][j] = ej[i] - e0[i];
        }
    }
    Ok((m, b))
}

/// ODE residual divided by the size of the terms it cancels,
/// `|E_i| / max(1, Σ_j |M_ij f′_j| + |b_i|)`, maximized over components.
pub fn ode_residual_relative(
    tag: GeometryTag,
    mode: InstantonMode,
    variant: BgggVariant,
    f: &[(f64, f64); 3],
    r: f64,
) -> Result<f64> {
    let e = ode_residual_variant(tag, mode, variant, f, r)?;
    let (m, b) = linearize(tag, mode, variant, f.map(|x| x.0), r)?;
    Ok((0..3)
        .map(|i| {
            let scale: f64 = (0..3).map(|j| (m[i][j] * f[j].1).abs()).sum::<f64>() + b[i].abs();
            e[i].abs() / scale.max(1.0)
        })
        .fold(0.0, f64::max))
}

/// Which reading of the cone equation for `f_i = a_i f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
pub enum ConeVariant {
    /// `f′(r⁴ + 27/4 f²) − 2fr³`
    Literal,
    /// `f′(r⁴ + 27/4 (a₁²+a₂²+a₃²) f²) − 2fr³`
    #[default]
    SumSquares,
}

/// Reduced cone deformed equation for the aligned ansatz `f_i = a_i f`.
pub fn cone_reduced_residual(variant: ConeVariant, a: [f64; 3], f: f64, df: f64, r: f64) -> f64 {
    let s = match variant {
        ConeVariant::Literal => 1.0,
        ConeVariant::SumSquares => a.iter().map(|x| x * x).sum(),
    };
    df * (r.powi(4) + 6.75 * s * f * f) - 2.0 * f * r.powi(3)
}

/// Random smooth ansatz `c₀ + c₁ r/L + c₂ (r/L)² + c₃ sin(c₄ r)` per component.
pub fn random_ansatz<R: Rng>(rng: &mut R, length_scale: f64) -> ConnectionAnsatz {
    let r = RadialScalar::r();
    let mut component = || {
        let c: [f64; 5] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let x = &r * (1.0 / length_scale);
        c[0] + &x * c[1] + x.clone().powi(2) * c[2] + (&r * c[4]).sin() * c[3]
    };
    ConnectionAnsatz::new(component(), component(), component())
}

/// Per-component outcome of a cross-check.
#[derive(Debug, Clone, Serialize)]
pub struct ComponentReport {
    pub component: usize,
    pub monomial: String,
    /// Range of the fitted factor `form coefficient / ODE component`.
    pub factor_min: f64,
    pub factor_max: f64,
    /// Largest normalized `|C − k·E|` over grid points and ansätze.
    pub mismatch: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrosscheckReport {
    pub components: Vec<ComponentReport>,
    /// Largest normalized coefficient on monomials not paired with an ODE row.
    pub unmatched: f64,
    pub tolerance: f64,
    pub consistent: bool,
}

impl CrosscheckReport {
    pub fn max_mismatch(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.mismatch)
            .fold(self.unmatched, f64::max)
    }
}

/// Compares `form_residual` with an ODE evaluator over several ansätze.
///
/// At each grid point the factor `k_i` relating the `i`-th form coefficient
/// `C_i` to the ODE component `E_i` is fitted by least squares across all
/// ansätze; the mismatch is `|C_i − k_i E_i|` divided by
/// `(1 + max|ψ|)(1 + max|F|)^p` with `p = 1` (G2) or `3` (deformed). The
/// check passes when every mismatch and every unmatched coefficient is below
/// `tol` and every `k_i` is nonzero with a single sign.
pub fn crosscheck_with<O>(
    ansatze: &[ConnectionAnsatz],
    ps: &ProfileSet,
    mode: InstantonMode,
    grid: &[f64],
    tol: f64,
    ode: O,
) -> Result<CrosscheckReport>
where
    O: Fn(usize, f64) -> Result<[f64; 3]>,
{
    if ansatze.is_empty() {
        return Err(Error::InvalidParameter("crosscheck needs at least one ansatz".into()));
    }
    let psi = g2_forms(ps).psi;
    let residuals: Vec<InvariantForm> = ansatze.iter().map(|a| form_residual(a, ps, mode)).collect();
    let curvatures: Vec<InvariantForm> = ansatze.iter().map(curvature).collect();
    let power = match mode {
        InstantonMode::G2 => 1,
        InstantonMode::Deformed => 3,
    };
    let monomials: [Monomial; 3] = std::array::from_fn(|i| component_monomial(i + 1));
    let mut comps: Vec<ComponentReport> = (0..3)
        .map(|i| ComponentReport {
            component: i + 1,
            monomial: monomials[i].to_string(),
            factor_min: f64::INFINITY,
            factor_max: f64::NEG_INFINITY,
            mismatch: 0.0,
        })
        .collect();
    let mut unmatched: f64 = 0.0;
    let mut degenerate = false;

    for &r in grid {
        let psi_scale = 1.0 + psi.evaluate(r)?.max_abs();
        let mut tables = Vec::with_capacity(ansatze.len());
        for (idx, res) in residuals.iter().enumerate() {
            let c = res.evaluate(r)?;
            let e = ode(idx, r)?;
            let fscale = 1.0 + curvatures[idx].evaluate(r)?.max_abs();
            let scale = psi_scale * fscale.powi(power);
            for (mo, v) in c.iter() {
                if !monomials.contains(&mo) {
                    unmatched = unmatched.max(v.abs() / scale);
                }
            }
            tables.push((c, e, scale));
        }
        for i in 0..3 {
            let (mut num, mut den) = (0.0, 0.0);
            for (c, e, _) in &tables {
                num += c.get(monomials[i]) * e[i];
                den += e[i] * e[i];
            }
            if den == 0.0 {
                // every ansatz has a vanishing ODE component here
                for (c, _, scale) in &tables {
                    comps[i].mismatch = comps[i].mismatch.max(c.get(monomials[i]).abs() / scale);
                }
                continue;
            }
            let k = num / den;
            if k == 0.0 {
                degenerate = true;
            }
            comps[i].factor_min = comps[i].factor_min.min(k);
            comps[i].factor_max = comps[i].factor_max.max(k);
            for (c, e, scale) in &tables {
                let m = (c.get(monomials[i]) - k * e[i]).abs() / scale;
                comps[i].mismatch = comps[i].mismatch.max(m);
            }
        }
    }
    let single_sign = comps.iter().all(|c| {
        !c.factor_min.is_finite() || c.factor_min * c.factor_max > 0.0
    });
    let consistent = !degenerate
        && single_sign
        && unmatched < tol
        && comps.iter().all(|c| c.mismatch < tol);
    Ok(CrosscheckReport {
        components: comps,
        unmatched,
        tolerance: tol,
        consistent,
    })
}

/// Cross-check of `form_residual` against [`ode_residual_variant`].
pub fn crosscheck_equivalence(
    ansatze: &[ConnectionAnsatz],
    ps: &ProfileSet,
    mode: InstantonMode,
    variant: BgggVariant,
    grid: &[f64],
    tol: f64,
) -> Result<CrosscheckReport> {
    crosscheck_with(ansatze, ps, mode, grid, tol, |idx, r| {
        ode_residual_variant(ps.tag, mode, variant, &ansatze[idx].jet(r), r)
    })
}

/// Cross-check of the cone deformed residual for `f_i = a_i f` against
/// `a_i` times the reduced scalar equation.
pub fn crosscheck_cone_reduction(
    profiles: &[RadialScalar],
    a: [f64; 3],
    ps: &ProfileSet,
    variant: ConeVariant,
    grid: &[f64],
    tol: f64,
) -> Result<CrosscheckReport> {
    let ansatze: Vec<ConnectionAnsatz> = profiles.iter().map(|f| ConnectionAnsatz::aligned(f, a)).collect();
    crosscheck_with(&ansatze, ps, InstantonMode::Deformed, grid, tol, |idx, r| {
        let f = &profiles[idx];
        let reduced = cone_reduced_residual(variant, a, f.at(r), f.derivative().at(r), r);
        Ok([a[0] * reduced, a[1] * reduced, a[2] * reduced])
    })
}
