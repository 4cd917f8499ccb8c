#![no_main]

use dg2inst::config::parse_triple;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = parse_triple(s);
    }
});
