#![no_main]

use dg2inst::config::parse_rational;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok((_, q)) = parse_rational(s) {
            assert!(q > 0);
        }
    }
});
