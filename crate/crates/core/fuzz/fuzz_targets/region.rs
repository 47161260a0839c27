#![no_main]

use gccf::io::parse_region;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(r) = parse_region(s) {
            assert!(r.u0 >= 0.0 && r.v0 >= 1.0 && r.u0 <= r.u1 && r.v0 <= r.v1);
        }
    }
});
