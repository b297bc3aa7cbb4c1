#![no_main]

use fibersim::commands::parse_vec2;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(v) = parse_vec2(text) {
            assert!(v.is_finite());
        }
    }
});
