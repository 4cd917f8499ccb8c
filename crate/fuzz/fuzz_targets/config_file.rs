#![no_main]

use dg2inst::config::{parse_kv, RunConfig};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(lines) = parse_kv(text) {
            assert!(lines.windows(2).all(|w| w[0].0 < w[1].0));
        }
        if let Ok(cfg) = RunConfig::from_text(text) {
            let _ = cfg.validate();
        }
    }
});
