#![no_main]

use gccf::io::parse_cache_line;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(entry) = parse_cache_line(s) {
            assert!(entry.rung.h_lo <= entry.rung.h_hi);
        }
    }
});
