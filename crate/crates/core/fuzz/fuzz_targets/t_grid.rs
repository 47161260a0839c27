#![no_main]

use gccf::io::parse_t_grid;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(ts) = parse_t_grid(s) {
            assert!(!ts.is_empty());
            assert!(ts.iter().all(|t| (0.0..=3.0).contains(t)));
        }
    }
});
