//! Command-line front end for the `dg2inst` library.

pub mod checks;
pub mod emit;
pub mod output;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use dg2inst::config::{OutputFormat, RunConfig};
use dg2inst::solvers::{solve_tan_implicit_signed, RootSign};
use dg2inst::Error;
use serde::Serialize;

use checks::Suite;
use emit::Target;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "DG2INST_OUT_DIR";

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NONCONVERGENCE: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "dg2inst", version, about = "Instanton verification and dataset emission")]
pub struct Cli {
    /// `key = value` configuration file; flags override its entries.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub params: Params,

    #[command(subcommand)]
    pub command: Command,
}

/// Parameter flags. Each one mirrors the config file key of the same name.
#[derive(Debug, Default, Args)]
pub struct Params {
    /// bggg, bs, cone or all
    #[arg(long, global = true)]
    pub geometry: Option<String>,
    /// g2 or deformed
    #[arg(long, global = true)]
    pub mode: Option<String>,
    /// Phase constant c of the implicit solution.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub c: Option<String>,
    #[arg(long, global = true)]
    pub cone_c: Option<String>,
    /// Direction triple, e.g. `1,1,1`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub c0: Option<String>,
    #[arg(long, global = true)]
    pub eps: Option<String>,
    #[arg(long, global = true)]
    pub bs_scale: Option<String>,
    /// `min:max:count[:linear|log]`, empty fields keep the default.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub rmin: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub rmax: Option<String>,
    #[arg(long, global = true)]
    pub count: Option<String>,
    #[arg(long, global = true)]
    pub spacing: Option<String>,
    #[arg(long, global = true)]
    pub rtol: Option<String>,
    #[arg(long, global = true)]
    pub kmax: Option<String>,
    #[arg(long, global = true)]
    pub branch: Option<String>,
    #[arg(long, global = true)]
    pub seed_offset: Option<String>,
    #[arg(long, global = true)]
    pub series_order: Option<String>,
    /// Leading series coefficient as `p/q`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub series_a: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub r: Option<String>,
    /// Output directory (default: $DG2INST_OUT_DIR, then `.`).
    #[arg(long, global = true)]
    pub out_dir: Option<String>,
    /// csv, json or both
    #[arg(long, global = true)]
    pub format: Option<String>,
}

impl Params {
    fn pairs(&self) -> Vec<(&'static str, &String)> {
        [
            ("geometry", &self.geometry),
            ("mode", &self.mode),
            ("c", &self.c),
            ("cone_c", &self.cone_c),
            ("a", &self.a),
            ("c0", &self.c0),
            ("eps", &self.eps),
            ("bs_scale", &self.bs_scale),
            ("grid", &self.grid),
            ("rmin", &self.rmin),
            ("rmax", &self.rmax),
            ("count", &self.count),
            ("spacing", &self.spacing),
            ("rtol", &self.rtol),
            ("kmax", &self.kmax),
            ("branch", &self.branch),
            ("seed_offset", &self.seed_offset),
            ("series_order", &self.series_order),
            ("series_a", &self.series_a),
            ("r", &self.r),
            ("out_dir", &self.out_dir),
            ("format", &self.format),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| (k, v)))
        .collect()
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run verification suites and report PASS/FAIL per check.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        /// Also write the report as JSON.
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
    },
    /// Write a dataset (CSV and/or JSON) to the output directory.
    Emit {
        #[arg(value_enum)]
        target: Target,
    },
    /// Solve the implicit equation at a single radius.
    Solve {
        /// Take the root on the negative half-line (requires c <= 0).
        #[arg(long)]
        negative: bool,
    },
}

#[derive(Debug)]
pub struct CliError {
    pub status: u8,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            status: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::NonConvergence(_) => EXIT_NONCONVERGENCE,
            _ => EXIT_USAGE,
        };
        CliError {
            status,
            message: e.to_string(),
        }
    }
}

/// Config file first, then flags on top.
pub fn resolve_config(config: Option<&Path>, params: &Params) -> Result<RunConfig, CliError> {
    let mut cfg = match config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::usage(format!("{}: {e}", p.display())))?;
            RunConfig::from_text(&text).map_err(|e| CliError::usage(format!("{}: {e}", p.display())))?
        }
        None => RunConfig::default(),
    };
    for (key, value) in params.pairs() {
        cfg.set(key, value)
            .map_err(|e| CliError::usage(format!("--{}: {e}", key.replace('_', "-"))))?;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn output_dir(cfg: &RunConfig) -> PathBuf {
    cfg.out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

#[derive(Serialize)]
struct Report<'a> {
    suite: &'static str,
    geometry: Option<&'static str>,
    passed: bool,
    checks: &'a [checks::CheckResult],
}

/// Renders every emit target with `cfg` twice and compares the bytes.
pub fn emit_is_deterministic(cfg: &RunConfig) -> bool {
    let render = || -> Option<Vec<String>> {
        let mut out = Vec::new();
        for t in Target::ALL {
            let mut c = cfg.clone();
            c.grid = Default::default();
            let d = emit::build(t, &c).ok()?.dataset;
            out.push(d.to_csv());
            out.push(d.to_json());
        }
        Some(out)
    };
    match (render(), render()) {
        (Some(a), Some(b)) => a == b,
        _ => false,
    }
}

/// Runs the parsed command, writing human output to `out`; returns the exit
/// status.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    let cfg = resolve_config(cli.config.as_deref(), &cli.params)?;
    let io = |e: std::io::Error| CliError::usage(format!("output: {e}"));
    match cli.command {
        Command::Verify { suite, report } => {
            let results = checks::run(suite, cfg.geometry, || emit_is_deterministic(&cfg));
            if results.is_empty() {
                return Err(CliError::usage(format!(
                    "suite {} has no checks for the selected geometry",
                    suite.name()
                )));
            }
            for r in &results {
                writeln!(out, "{}", r.summary_line()).map_err(io)?;
            }
            let passed = results.iter().all(|r| r.passed);
            let failed = results.iter().filter(|r| !r.passed).count();
            writeln!(out, "{} checks, {} failed", results.len(), failed).map_err(io)?;
            if let Some(path) = report {
                let doc = Report {
                    suite: suite.name(),
                    geometry: cfg.geometry.map(|g| g.name()),
                    passed,
                    checks: &results,
                };
                let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
                s.push('\n');
                fs::write(&path, s).map_err(io)?;
            }
            Ok(if passed {
                EXIT_OK
            } else if results.iter().any(|r| !r.passed && !r.converged) {
                EXIT_NONCONVERGENCE
            } else {
                EXIT_CHECK_FAILED
            })
        }
        Command::Emit { target } => {
            let emitted = emit::build(target, &cfg)?;
            let dir = output_dir(&cfg);
            for p in emitted.dataset.write(&dir, cfg.format).map_err(io)? {
                writeln!(out, "wrote {}", p.display()).map_err(io)?;
            }
            Ok(if emitted.converged { EXIT_OK } else { EXIT_NONCONVERGENCE })
        }
        Command::Solve { negative } => {
            let r = cfg.r.ok_or_else(|| CliError::usage("solve needs --r"))?;
            let sign = if negative { RootSign::Negative } else { RootSign::Positive };
            let root = solve_tan_implicit_signed(r, cfg.tan_c, cfg.branch, sign)?;
            let mut d = output::Dataset::new("solve", &["r", "c", "branch", "f", "residual", "converged"]);
            d.push(vec![
                r.into(),
                cfg.tan_c.into(),
                cfg.branch.into(),
                root.f.into(),
                root.residual.into(),
                root.converged.into(),
            ]);
            let text = match cfg.format {
                OutputFormat::Json => d.to_json(),
                _ => d.to_csv(),
            };
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(if root.converged { EXIT_OK } else { EXIT_NONCONVERGENCE })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn every_flag_is_a_config_key() {
        Cli::command().debug_assert();
        let all = Params {
            geometry: Some("bggg".into()),
            mode: Some("g2".into()),
            c: Some("0.5".into()),
            cone_c: Some("1".into()),
            a: Some("1,1,1".into()),
            c0: Some("2".into()),
            eps: Some("0.1".into()),
            bs_scale: Some("1".into()),
            grid: Some("3:4:5".into()),
            rmin: Some("3".into()),
            rmax: Some("4".into()),
            count: Some("5".into()),
            spacing: Some("log".into()),
            rtol: Some("1e-9".into()),
            kmax: Some("2".into()),
            branch: Some("1".into()),
            seed_offset: Some("1e-3".into()),
            series_order: Some("4".into()),
            series_a: Some("1/2".into()),
            r: Some("3".into()),
            out_dir: Some("x".into()),
            format: Some("both".into()),
        };
        let pairs = all.pairs();
        assert_eq!(pairs.len(), 22);
        assert!(pairs.iter().all(|(k, _)| dg2inst::config::KEYS.contains(k)));
        let cfg = resolve_config(None, &all).unwrap();
        assert_eq!(cfg.series_a, (1, 2));
        assert_eq!(cfg.format, OutputFormat::Both);
    }
}
