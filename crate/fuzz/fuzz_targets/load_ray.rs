#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let (sidecar, csv) = text.split_once("\n---\n").unwrap_or(("", text));
        let _ = holo2d::io::load_ray(csv, sidecar);
    }
});
