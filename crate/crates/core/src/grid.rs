use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on `GridSpec::count`.
pub const MAX_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// Sample points `min..=max` with `count` entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn linear(min: f64, max: f64, count: usize) -> Self {
        GridSpec {
            min,
            max,
            count,
            spacing: Spacing::Linear,
        }
    }

    pub fn log(min: f64, max: f64, count: usize) -> Self {
        GridSpec {
            min,
            max,
            count,
            spacing: Spacing::Log,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::InvalidParameter("grid bounds must be finite".into()));
        }
        if self.min >= self.max {
            return Err(Error::InvalidParameter(format!(
                "grid min {} must be below max {}",
                self.min, self.max
            )));
        }
        if self.count < 2 {
            return Err(Error::InvalidParameter("grid needs at least 2 points".into()));
        }
        if self.count > MAX_POINTS {
            return Err(Error::InvalidParameter(format!("grid count above {MAX_POINTS}")));
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return Err(Error::InvalidParameter("log grid needs min > 0".into()));
        }
        Ok(())
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        self.validate()?;
        Ok(match self.spacing {
            Spacing::Linear => linspace(self.min, self.max, self.count),
            Spacing::Log => logspace(self.min, self.max, self.count),
        })
    }
}

/// `n` evenly spaced points; both endpoints are hit exactly.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let step = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { b } else { a + step * i as f64 })
        .collect()
}

/// `n` geometrically spaced points; both endpoints are hit exactly.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && a > 0.0 && b > 0.0);
    let (la, lb) = (a.ln(), b.ln());
    let step = (lb - la) / (n - 1) as f64;
    (0..n)
        .map(|i| match i {
            0 => a,
            _ if i == n - 1 => b,
            _ => (la + step * i as f64).exp(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_exact() {
        let g = logspace(2.251, 50.0, 200);
        assert_eq!(g[0], 2.251);
        assert_eq!(g[199], 50.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        let l = linspace(0.0, 1.0, 11);
        assert_eq!(l[10], 1.0);
    }

    #[test]
    fn malformed_specs_rejected() {
        assert!(GridSpec::linear(3.0, 1.0, 10).points().is_err());
        assert!(GridSpec::linear(1.0, 3.0, 1).points().is_err());
        assert!(GridSpec::log(0.0, 3.0, 10).points().is_err());
    }
}
