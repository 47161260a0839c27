#![no_main]

use gccf::io::{decode_ccf1, encode_ccf1};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(points) = decode_ccf1(data) {
        assert!(points.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        assert_eq!(encode_ccf1(&points), data);
    }
});
