//! Run configuration: `key = value` files, triples, grids and rationals.

use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::GeometryTag;
use crate::grid::{GridSpec, Spacing};
use crate::instanton::InstantonMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
    Both,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "both" => Ok(OutputFormat::Both),
            other => Err(Error::InvalidParameter(format!("unknown format `{other}`"))),
        }
    }
}

impl FromStr for Spacing {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" | "lin" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            other => Err(Error::InvalidParameter(format!("unknown spacing `{other}`"))),
        }
    }
}

/// Partial grid; unset fields fall back to a per-command default.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct GridOverrides {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub count: Option<usize>,
    pub spacing: Option<Spacing>,
}

impl GridOverrides {
    pub fn resolve(&self, default: GridSpec) -> Result<GridSpec> {
        let g = GridSpec {
            min: self.min.unwrap_or(default.min),
            max: self.max.unwrap_or(default.max),
            count: self.count.unwrap_or(default.count),
            spacing: self.spacing.unwrap_or(default.spacing),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn merge(&mut self, other: &GridOverrides) {
        self.min = other.min.or(self.min);
        self.max = other.max.or(self.max);
        self.count = other.count.or(self.count);
        self.spacing = other.spacing.or(self.spacing);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    /// `None` runs every geometry.
    pub geometry: Option<GeometryTag>,
    pub mode: InstantonMode,
    pub tan_c: f64,
    pub cone_c: f64,
    pub a: [f64; 3],
    pub c0: f64,
    pub epsilon: f64,
    pub bs_scale: f64,
    pub grid: GridOverrides,
    pub rtol: f64,
    pub kmax: u32,
    pub branch: u32,
    pub seed_offset: f64,
    pub series_order: usize,
    /// Leading value of the non-vanishing series as `(numerator, denominator)`.
    pub series_a: (i64, i64),
    pub r: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            geometry: None,
            mode: InstantonMode::Deformed,
            tan_c: 0.7,
            cone_c: 1.0,
            a: [1.0, 0.0, 0.0],
            c0: 1.0,
            epsilon: 0.01,
            bs_scale: 1.0,
            grid: GridOverrides::default(),
            rtol: 1e-10,
            kmax: 3,
            branch: 0,
            seed_offset: 1e-4,
            series_order: 5,
            series_a: (3, 1),
            r: None,
            out_dir: None,
            format: OutputFormat::Csv,
        }
    }
}

pub const KEYS: &[&str] = &[
    "geometry",
    "mode",
    "c",
    "tan_c",
    "cone_c",
    "a",
    "c0",
    "eps",
    "epsilon",
    "bs_scale",
    "grid",
    "rmin",
    "rmax",
    "count",
    "spacing",
    "rtol",
    "kmax",
    "branch",
    "seed_offset",
    "series_order",
    "series_a",
    "r",
    "out_dir",
    "format",
];

impl RunConfig {
    /// Parses a whole `key = value` file on top of the defaults.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (line, key, value) in parse_kv(text)? {
            cfg.set(&key, &value).map_err(|e| Error::Config {
                line,
                message: e.to_string(),
            })?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "geometry" => {
                self.geometry = match v {
                    "all" => None,
                    _ => Some(v.parse()?),
                }
            }
            "mode" => self.mode = v.parse()?,
            "c" | "tan_c" => self.tan_c = parse_real(v)?,
            "cone_c" => self.cone_c = parse_real(v)?,
            "a" => self.a = parse_triple(v)?,
            "c0" => self.c0 = parse_real(v)?,
            "eps" | "epsilon" => self.epsilon = parse_real(v)?,
            "bs_scale" => self.bs_scale = parse_real(v)?,
            "grid" => self.grid.merge(&parse_grid(v)?),
            "rmin" => self.grid.min = Some(parse_real(v)?),
            "rmax" => self.grid.max = Some(parse_real(v)?),
            "count" => self.grid.count = Some(parse_count(v)?),
            "spacing" => self.grid.spacing = Some(v.parse()?),
            "rtol" => self.rtol = parse_real(v)?,
            "kmax" => self.kmax = parse_u32(v)?,
            "branch" => self.branch = parse_u32(v)?,
            "seed_offset" => self.seed_offset = parse_real(v)?,
            "series_order" => self.series_order = parse_count(v)?,
            "series_a" => self.series_a = parse_rational(v)?,
            "r" => self.r = Some(parse_real(v)?),
            "out_dir" => self.out_dir = Some(PathBuf::from(v)),
            "format" => self.format = v.parse()?,
            other => return Err(Error::InvalidParameter(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("c", self.tan_c),
            ("cone_c", self.cone_c),
            ("c0", self.c0),
            ("epsilon", self.epsilon),
            ("bs_scale", self.bs_scale),
            ("rtol", self.rtol),
            ("seed_offset", self.seed_offset),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        if !(self.rtol > 0.0) {
            return Err(Error::InvalidParameter("rtol must be positive".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter("epsilon must be positive".into()));
        }
        if !(self.seed_offset > 0.0) {
            return Err(Error::InvalidParameter("seed_offset must be positive".into()));
        }
        if !(self.cone_c > 0.0) {
            return Err(Error::InvalidParameter("cone_c must be positive".into()));
        }
        if self.a.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("a must be finite".into()));
        }
        if self.series_order == 0 || self.series_order > 64 {
            return Err(Error::InvalidParameter("series_order must be in 1..=64".into()));
        }
        if self.series_a.1 == 0 {
            return Err(Error::InvalidParameter("series_a has zero denominator".into()));
        }
        if let (Some(lo), Some(hi)) = (self.grid.min, self.grid.max) {
            if !(lo < hi) {
                return Err(Error::InvalidParameter(format!("grid min {lo} must be below max {hi}")));
            }
        }
        if let Some(n) = self.grid.count {
            if n < 2 {
                return Err(Error::InvalidParameter("grid needs at least 2 points".into()));
            }
        }
        Ok(())
    }
}

/// Splits `key = value` lines. Blank lines and `#` comments are skipped;
/// keys are lowercased with `-` mapped to `_`.
pub fn parse_kv(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Config {
            line: i + 1,
            message: "expected `key = value`".into(),
        })?;
        let key = k.trim().to_ascii_lowercase().replace('-', "_");
        if key.is_empty() {
            return Err(Error::Config {
                line: i + 1,
                message: "empty key".into(),
            });
        }
        out.push((i + 1, key, v.trim().to_string()));
    }
    Ok(out)
}

pub fn parse_real(s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("`{s}` is not a number")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("`{s}` is not finite")))
    }
}

fn parse_count(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("`{s}` is not a count")))
}

fn parse_u32(s: &str) -> Result<u32> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("`{s}` is not a non-negative integer")))
}

/// `"a1,a2,a3"`, optionally wrapped in parentheses.
pub fn parse_triple(s: &str) -> Result<[f64; 3]> {
    let t = s.trim();
    let t = t.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(t);
    let parts: Vec<&str> = t.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidParameter(format!("`{s}` is not a triple `x,y,z`")));
    }
    Ok([parse_real(parts[0])?, parse_real(parts[1])?, parse_real(parts[2])?])
}

fn non_empty(p: &str) -> Option<&str> {
    let p = p.trim();
    (!p.is_empty()).then_some(p)
}

/// `"min:max:count[:spacing]"`; empty fields are left unset.
pub fn parse_grid(s: &str) -> Result<GridOverrides> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(Error::InvalidParameter(format!("`{s}` is not `min:max:count[:spacing]`")));
    }
    let g = GridOverrides {
        min: non_empty(parts[0]).map(parse_real).transpose()?,
        max: non_empty(parts[1]).map(parse_real).transpose()?,
        count: non_empty(parts[2]).map(parse_count).transpose()?,
        spacing: parts.get(3).and_then(|p| non_empty(p)).map(str::parse).transpose()?,
    };
    if let (Some(lo), Some(hi)) = (g.min, g.max) {
        if !(lo < hi) {
            return Err(Error::InvalidParameter(format!("grid min {lo} must be below max {hi}")));
        }
    }
    Ok(g)
}

/// `"p"` or `"p/q"` with `q ≠ 0`, reduced to lowest terms with `q > 0`.
pub fn parse_rational(s: &str) -> Result<(i64, i64)> {
    let bad = || Error::InvalidParameter(format!("`{s}` is not a rational `p/q`"));
    let (n, d) = match s.trim().split_once('/') {
        Some((n, d)) => (n.trim().parse::<i64>().map_err(|_| bad())?, d.trim().parse::<i64>().map_err(|_| bad())?),
        None => (s.trim().parse::<i64>().map_err(|_| bad())?, 1),
    };
    if d == 0 || n == i64::MIN || d == i64::MIN {
        return Err(bad());
    }
    let g = gcd(n.unsigned_abs(), d.unsigned_abs()) as i64;
    let sign = if d < 0 { -1 } else { 1 };
    Ok((sign * n / g, sign * d / g))
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}
