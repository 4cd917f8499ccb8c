use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("r = {r} lies outside the domain [{lo}, {hi})")]
    OutsideDomain { r: f64, lo: f64, hi: f64 },

    #[error("wedge/derivative would produce a form of degree {degree} > 7")]
    DegreeOverflow { degree: usize },

    #[error("forms of degree {left} and {right} cannot be added")]
    DegreeMismatch { left: usize, right: usize },

    #[error("r = {r} is a singular point of the {system} system")]
    SingularPoint { r: f64, system: &'static str },

    #[error("no root in branch {branch} window {window:?}: {reason}")]
    NoRoot {
        branch: u32,
        window: (f64, f64),
        reason: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),

    #[error("series leading coefficient a = 0 selects the identically zero solution")]
    ZeroSeries,
}

pub type Result<T> = std::result::Result<T, Error>;
