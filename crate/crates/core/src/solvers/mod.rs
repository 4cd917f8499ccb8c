//! Explicit and numerical solution machinery.

pub mod closed_form;
pub mod integrate;
pub mod lambert;
pub mod profiles;
pub mod series;
pub mod tan_root;

pub use closed_form::{bggg_g2_profile, bggg_transverse_g2_profile, g2_closed_form};
pub use integrate::{integrate_profile, IntegratorOptions, OdeSystem, SampledProfile, Seed};
pub use lambert::lambert_w0;
pub use profiles::{cone_implicit_residual, cone_profile, principal_profile};
pub use series::{series_expand, vanishing_series, Laurent, SeriesExpansion};
pub use tan_root::{solve_tan_implicit, solve_tan_implicit_signed, solve_tan_target, BranchedRoot, RootSign};
