use std::fs;
use std::path::Path;

use dg2inst::config::{parse_grid, parse_rational, parse_triple, RunConfig};

fn seeds(target: &str) -> Vec<String> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<String> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| fs::read_to_string(e.unwrap().path()).unwrap())
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn config_seeds_parse() {
    for s in seeds("config_file") {
        let cfg = RunConfig::from_text(&s).unwrap();
        cfg.validate().unwrap();
    }
}

#[test]
fn triple_seeds() {
    let ok: Vec<bool> = seeds("triple").iter().map(|s| parse_triple(s).is_ok()).collect();
    assert!(ok.iter().filter(|&&x| x).count() >= 2);
}

#[test]
fn grid_seeds() {
    for s in seeds("grid") {
        let _ = parse_grid(&s);
    }
    assert!(parse_grid("5:3:10").is_err());
}

#[test]
fn rational_seeds() {
    let parsed: Vec<_> = seeds("rational").iter().map(|s| parse_rational(s)).collect();
    assert!(parsed.contains(&Ok((-3, 2))));
    assert!(parsed.iter().any(|p| p.is_err()));
}
