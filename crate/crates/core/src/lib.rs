//! Exterior calculus, G2-structures and abelian (deformed) G2-instantons on
//! ℝ⁴ × S³ with SU(2)²×U(1) symmetry.
//!
//! * [`forms`] and [`scalar`]: sparse invariant forms with exact radial
//!   derivatives.
//! * [`geometry`]: the BGGG, complete Bryant–Salamon and conical
//!   Bryant–Salamon torsion-free G2-structures.
//! * [`instanton`]: curvature, form-level instanton residuals, the reduced
//!   ODE systems and their cross-check.
//! * [`solvers`]: Lambert W, the branched tan-equation roots, power series at
//!   the singular orbit, closed-form G2-instantons and an adaptive integrator.
//! * [`analysis`]: Chern–Simons density, the small-ε scaling limit, and
//!   branch sweeps.

pub mod analysis;
pub mod config;
pub mod error;
pub mod forms;
pub mod geometry;
pub mod grid;
pub mod instanton;
pub mod scalar;
pub mod solvers;

pub use error::{Error, Result};
pub use forms::{CoefficientTable, InvariantForm, Monomial};
pub use geometry::{make_profiles, GeometryTag, ProfileSet};
pub use scalar::{Domain, RadialScalar};
