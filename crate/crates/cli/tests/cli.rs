use std::fs;
use std::process::{Command, Output};

fn dg2inst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dg2inst"))
        .args(args)
        .env_remove("DG2INST_OUT_DIR")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn malformed_grid_is_usage_error() {
    assert_eq!(code(&dg2inst(&["emit", "profile", "--grid", "5:3:10"])), 2);
    assert_eq!(code(&dg2inst(&["emit", "profile", "--count", "1"])), 2);
    assert_eq!(code(&dg2inst(&["verify", "--rmin", "x"])), 2);
}

#[test]
fn unknown_arguments_are_usage_errors() {
    assert_eq!(code(&dg2inst(&["frobnicate"])), 2);
    assert_eq!(code(&dg2inst(&["emit", "nothing"])), 2);
    assert_eq!(code(&dg2inst(&["solve"])), 2);
    assert_eq!(code(&dg2inst(&["emit", "profile", "--c", "2"])), 2);
}

#[test]
fn verify_cone_torsion_passes() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = dg2inst(&["verify", "--geometry", "cone", "--suite", "torsion", "--report", report.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    assert!(v["checks"][0]["value"].as_f64().unwrap() < 1e-9);
}

#[test]
fn suite_without_matching_geometry_is_usage_error() {
    assert_eq!(code(&dg2inst(&["verify", "--geometry", "cone", "--suite", "series"])), 2);
}

#[test]
fn solve_prints_root() {
    let o = dg2inst(&["solve", "--r", "2.25", "--c", "0.7"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("r,c,branch,f,residual,converged\n"));
    assert!(text.contains(",0.0000000000000000e0,"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# sweep\nc = 0.5\ngrid = 2.25:3:3\nformat = json\n").unwrap();
    let out = dir.path().join("out");
    let o = dg2inst(&[
        "emit",
        "profile",
        "--config",
        cfg.to_str().unwrap(),
        "--count",
        "2",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("profile.json")).unwrap()).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 2);
    assert_eq!(v["records"][1]["r"], 3.0);
    assert!(!out.join("profile.csv").exists());
}

#[test]
fn bad_config_file_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "c = 0.5\nnonsense\n").unwrap();
    let o = dg2inst(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn env_var_sets_default_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_dg2inst"))
        .args(["emit", "series"])
        .env("DG2INST_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(dir.path().join("series.csv")).unwrap();
    assert!(csv.starts_with("n,coefficient,exact,value\n0,a,3,3.0000000000000000e0\n"));
}

#[test]
fn csv_columns_have_fixed_headers() {
    let dir = tempfile::tempdir().unwrap();
    let want = [
        ("branches", "r,C,branch,f,residual"),
        ("cone", "r,f,df,ode_residual,implicit_residual"),
        ("limit", "r,f_over_eps,limit,error"),
        ("chern-simons", "r,density,normalized"),
        ("torsion", "geometry,r,dphi,dpsi"),
    ];
    for (target, header) in want {
        let o = dg2inst(&["emit", target, "--count", "5", "--out-dir", dir.path().to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{target}");
        let csv = fs::read_to_string(dir.path().join(format!("{target}.csv"))).unwrap();
        assert_eq!(csv.lines().next().unwrap(), header);
    }
}
