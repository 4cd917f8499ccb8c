#![no_main]

use dg2inst::config::parse_grid;
use dg2inst::grid::GridSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(g) = parse_grid(s) {
            if let Ok(spec) = g.resolve(GridSpec::linear(1.0, 2.0, 2)) {
                if spec.count <= 4096 {
                    let pts = spec.points().unwrap();
                    assert_eq!(pts.len(), spec.count);
                }
            }
        }
    }
});
