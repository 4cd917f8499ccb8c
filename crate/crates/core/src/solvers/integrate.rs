//! Adaptive Dormand–Prince 5(4) integration of the reduced ODE systems.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{GeometryTag, BGGG_SINGULAR_ORBIT};
use crate::instanton::{linearize, BgggVariant, InstantonMode};
use crate::solvers::series::{eval_poly, vanishing_series};

/// Which form of the reduced system to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OdeSystem {
    pub tag: GeometryTag,
    pub mode: InstantonMode,
    pub variant: BgggVariant,
}

impl OdeSystem {
    pub fn new(tag: GeometryTag, mode: InstantonMode) -> Self {
        OdeSystem {
            tag,
            mode,
            variant: BgggVariant::Symmetric,
        }
    }

    /// `f′` at `(r, f)` from the linear solve `M f′ = b`.
    pub fn rhs(&self, r: f64, f: [f64; 3]) -> Result<[f64; 3]> {
        let (m, b) = linearize(self.tag, self.mode, self.variant, f, r)?;
        solve3(m, b).ok_or(Error::SingularPoint {
            r,
            system: "reduced ODE (degenerate leading coefficient)",
        })
    }
}

fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col] == 0.0 || !m[piv][col].is_finite() {
            return None;
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let k = m[row][col] / m[col][col];
            for c in col..3 {
                m[row][c] -= k * m[col][c];
            }
            b[row] -= k * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|c| m[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / m[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Initial data `f(r₀) = f₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Seed {
    pub r0: f64,
    pub f0: [f64; 3],
}

impl Seed {
    pub fn values(r0: f64, f0: [f64; 3]) -> Self {
        Seed { r0, f0 }
    }

    /// First-order step off the BGGG singular orbit along the principal
    /// solution: `f₁(9/4 + h) = 3 cot(c) h`.
    pub fn principal_taylor(tan_c: f64, h: f64) -> Result<Self> {
        check_principal(tan_c, h)?;
        Ok(Seed::values(BGGG_SINGULAR_ORBIT + h, [3.0 / tan_c.tan() * h, 0.0, 0.0]))
    }

    /// Vanishing power series of the principal solution through `h^order`.
    pub fn principal_series(tan_c: f64, h: f64, order: usize) -> Result<Self> {
        check_principal(tan_c, h)?;
        let p = vanishing_series(3.0 / tan_c.tan(), order.max(1));
        Ok(Seed::values(BGGG_SINGULAR_ORBIT + h, [eval_poly(&p, &h), 0.0, 0.0]))
    }

    /// Seed from the `p(0) = a` series coefficients `p`.
    pub fn from_series(p: &[f64], h: f64) -> Self {
        Seed::values(BGGG_SINGULAR_ORBIT + h, [eval_poly(p, &h), 0.0, 0.0])
    }
}

fn check_principal(tan_c: f64, h: f64) -> Result<()> {
    if !(tan_c > 0.0 && tan_c < FRAC_PI_2) {
        return Err(Error::InvalidParameter(format!("need 0 < c < pi/2, got {tan_c}")));
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidParameter(format!("seed offset must be positive, got {h}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: Option<f64>,
    /// Give up when the step falls below this fraction of `max(1, |r|)`.
    pub min_step_ratio: f64,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            rtol: 1e-10,
            atol: 1e-12,
            initial_step: None,
            min_step_ratio: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

/// Integration output on the requested grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledProfile {
    pub r: Vec<f64>,
    pub f: Vec<[f64; 3]>,
    pub df: Vec<[f64; 3]>,
    /// Largest accepted local error estimate (absolute, max over components).
    pub max_local_error: f64,
    pub accepted: usize,
    pub rejected: usize,
    /// Set when integration stopped before the end of the grid.
    pub diagnostic: Option<String>,
}

impl SampledProfile {
    pub fn is_complete(&self) -> bool {
        self.diagnostic.is_none()
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn axpy(y: &[f64; 3], h: f64, terms: &[([f64; 3], f64)]) -> [f64; 3] {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(k, w)| w * k[i]).sum::<f64>())
}

/// Integrates `system` from `seed` and samples it at every `grid` point
/// (ascending, all `≥ r₀`).
pub fn integrate_profile(
    system: OdeSystem,
    seed: Seed,
    grid: &[f64],
    opts: &IntegratorOptions,
) -> Result<SampledProfile> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty output grid".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || !(grid[0] >= seed.r0) {
        return Err(Error::InvalidParameter(
            "output grid must be strictly increasing and start at or after r0".into(),
        ));
    }
    if !(opts.rtol > 0.0 && opts.atol > 0.0) {
        return Err(Error::InvalidParameter("tolerances must be positive".into()));
    }

    let mut out = SampledProfile {
        r: Vec::with_capacity(grid.len()),
        f: Vec::with_capacity(grid.len()),
        df: Vec::with_capacity(grid.len()),
        max_local_error: 0.0,
        accepted: 0,
        rejected: 0,
        diagnostic: None,
    };
    let mut r = seed.r0;
    let mut y = seed.f0;
    let mut k1 = system.rhs(r, y)?;
    let span = grid[grid.len() - 1] - r;
    let mut h = opts.initial_step.unwrap_or(1e-6 * r.abs().max(1.0)).min(span.max(f64::MIN_POSITIVE));
    let mut next = 0;

    while next < grid.len() {
        if grid[next] == r {
            out.r.push(r);
            out.f.push(y);
            out.df.push(k1);
            next += 1;
            continue;
        }
        if out.accepted + out.rejected >= opts.max_steps {
            out.diagnostic = Some(format!("step budget exhausted at r = {r}"));
            break;
        }
        if h < opts.min_step_ratio * r.abs().max(1.0) {
            out.diagnostic = Some(format!("step size collapsed to {h:e} at r = {r}"));
            break;
        }
        let target = grid[next];
        let step = h.min(target - r);
        let mut k = [k1, [0.0; 3], [0.0; 3], [0.0; 3], [0.0; 3], [0.0; 3], [0.0; 3]];
        let mut stage_failed = false;
        for s in 1..7 {
            let terms: Vec<([f64; 3], f64)> = (0..s).map(|j| (k[j], A[s][j])).collect();
            let ys = axpy(&y, step, &terms);
            match system.rhs(r + C[s] * step, ys) {
                Ok(v) if v.iter().all(|x| x.is_finite()) => k[s] = v,
                _ => {
                    stage_failed = true;
                    break;
                }
            }
        }
        if stage_failed {
            out.rejected += 1;
            h = step * 0.25;
            continue;
        }
        let y_new = axpy(&y, step, &(0..6).map(|j| (k[j], A[6][j])).collect::<Vec<_>>());
        let err_abs: [f64; 3] = std::array::from_fn(|i| step * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>());
        let err = (0..3)
            .map(|i| err_abs[i].abs() / (opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs())))
            .fold(0.0, f64::max);
        if err <= 1.0 {
            r = if step == target - r { target } else { r + step };
            y = y_new;
            k1 = k[6];
            out.accepted += 1;
            out.max_local_error = out.max_local_error.max(err_abs.iter().fold(0.0f64, |a, b| a.max(b.abs())));
            let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = h.max(step) * grow;
        } else {
            out.rejected += 1;
            h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
        }
    }
    Ok(out)
}
