#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = holo2d::io::parse_expansion_csv(text);
        let _ = holo2d::io::parse_karp_csv(text, 1.0, 16);
        let _ = holo2d::io::parse_farfield_csv(text, 1.0, 16);
    }
});
