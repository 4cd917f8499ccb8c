//! Dataset builders for `dg2inst emit`.

use clap::ValueEnum;
use dg2inst::analysis::{
    branch_sweep, chern_simons_density, chern_simons_density_normalized, limit_profile, SweepAxis,
};
use dg2inst::config::RunConfig;
use dg2inst::geometry::{make_profiles, torsion_residual, GeometryTag};
use dg2inst::grid::GridSpec;
use dg2inst::instanton::{bggg_radial, bggg_reduced_residual, cone_reduced_residual, ConeVariant, ConnectionAnsatz};
use dg2inst::solvers::{cone_implicit_residual, cone_profile, principal_profile, series_expand};
use dg2inst::{Error, Result};
use num_rational::BigRational;

use crate::output::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Branches,
    Profile,
    Cone,
    Series,
    ChernSimons,
    Limit,
    Torsion,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Branches => "branches",
            Target::Profile => "profile",
            Target::Cone => "cone",
            Target::Series => "series",
            Target::ChernSimons => "chern-simons",
            Target::Limit => "limit",
            Target::Torsion => "torsion",
        }
    }

    pub const ALL: [Target; 7] = [
        Target::Branches,
        Target::Profile,
        Target::Cone,
        Target::Series,
        Target::ChernSimons,
        Target::Limit,
        Target::Torsion,
    ];
}

/// A dataset plus whether every solver call behind it converged.
pub struct Emitted {
    pub dataset: Dataset,
    pub converged: bool,
}

fn grid(cfg: &RunConfig, default: GridSpec) -> Result<Vec<f64>> {
    cfg.grid.resolve(default)?.points()
}

pub fn build(target: Target, cfg: &RunConfig) -> Result<Emitted> {
    cfg.validate()?;
    let mut converged = true;
    let dataset = match target {
        Target::Branches => {
            let rs = grid(cfg, GridSpec::linear(2.25, 20.0, 200))?;
            let mut d = Dataset::new("branches", &["r", "C", "branch", "f", "residual"]);
            for p in branch_sweep(cfg.tan_c, cfg.kmax, SweepAxis::R, &rs)? {
                converged &= p.converged;
                d.push(vec![p.r.into(), p.big_c.into(), p.branch.into(), p.f.into(), p.residual.into()]);
            }
            d
        }
        Target::Profile => {
            let rs = grid(cfg, GridSpec::linear(2.25, 100.0, 200))?;
            let f = principal_profile(cfg.tan_c)?;
            let df = f.derivative();
            let mut d = Dataset::new("profile", &["r", "f", "df", "ode_residual"]);
            for r in rs {
                let (v, dv) = (f.value(r)?, df.value(r)?);
                let scale = (bggg_radial(r) + 576.0 * v * v).abs() * dv.abs() + 2304.0 * r * v.abs();
                let res = bggg_reduced_residual(v, dv, r).abs() / scale.max(1.0);
                d.push(vec![r.into(), v.into(), dv.into(), res.into()]);
            }
            d
        }
        Target::Cone => {
            let rs = grid(cfg, GridSpec::log(0.1, 50.0, 200))?;
            let f = cone_profile(cfg.cone_c, cfg.a)?;
            let df = f.derivative();
            let sum: f64 = cfg.a.iter().map(|x| x * x).sum();
            let mut d = Dataset::new("cone", &["r", "f", "df", "ode_residual", "implicit_residual"]);
            for r in rs {
                let (v, dv) = (f.value(r)?, df.value(r)?);
                let scale = dv.abs() * (r.powi(4) + 6.75 * sum * v * v) + 2.0 * v.abs() * r.powi(3);
                let ode = cone_reduced_residual(ConeVariant::SumSquares, cfg.a, v, dv, r).abs() / scale.max(1.0);
                let imp = cone_implicit_residual(cfg.cone_c, cfg.a, r, v);
                d.push(vec![r.into(), v.into(), dv.into(), ode.into(), imp.into()]);
            }
            d
        }
        Target::Series => {
            let (p, q) = cfg.series_a;
            let a = BigRational::new(p.into(), q.into());
            let exp = series_expand(cfg.series_order)?;
            let exact = exp.at_rational(&a)?;
            let approx = exp.at_f64(p as f64 / q as f64)?;
            let mut d = Dataset::new("series", &["n", "coefficient", "exact", "value"]);
            for (n, l) in exp.coefficients().iter().enumerate() {
                d.push(vec![n.into(), l.to_string().into(), exact[n].to_string().into(), approx[n].into()]);
            }
            d
        }
        Target::ChernSimons => {
            let rs = grid(cfg, GridSpec::log(2.25 + 1e-3, 100.0, 200))?;
            let ps = make_profiles(GeometryTag::Bggg, 1.0)?;
            let a = ConnectionAnsatz::single(principal_profile(cfg.tan_c)?);
            let density = chern_simons_density(&a, &ps);
            let mut d = Dataset::new("chern-simons", &["r", "density", "normalized"]);
            for r in rs {
                let n = chern_simons_density_normalized(&a, &ps, r)?;
                d.push(vec![r.into(), density.value(r)?.into(), n.into()]);
            }
            d
        }
        Target::Limit => {
            let rs = grid(cfg, GridSpec::linear(2.25, 50.0, 200))?;
            let c = (1.0 / cfg.epsilon).atan();
            let f = principal_profile(c)?;
            let mut d = Dataset::new("limit", &["r", "f_over_eps", "limit", "error"]);
            for r in rs {
                let (v, l) = (f.value(r)? / cfg.epsilon, limit_profile(r));
                d.push(vec![r.into(), v.into(), l.into(), (v - l).abs().into()]);
            }
            d
        }
        Target::Torsion => {
            let tags: Vec<GeometryTag> = match cfg.geometry {
                Some(t) => vec![t],
                None => GeometryTag::ALL.to_vec(),
            };
            let mut d = Dataset::new("torsion", &["geometry", "r", "dphi", "dpsi"]);
            for tag in tags {
                let ps = make_profiles(tag, cfg.bs_scale)?;
                let lo = match tag {
                    GeometryTag::BsCone => 0.1,
                    _ => ps.interior_start(1e-3),
                };
                for r in grid(cfg, GridSpec::log(lo, 50.0, 200))? {
                    let t = torsion_residual(&ps, &[r])?;
                    d.push(vec![tag.name().into(), r.into(), t.dphi_normalized.into(), t.dpsi_normalized.into()]);
                }
            }
            d
        }
    };
    if dataset.rows.is_empty() {
        return Err(Error::InvalidParameter("empty dataset".into()));
    }
    Ok(Emitted { dataset, converged })
}
