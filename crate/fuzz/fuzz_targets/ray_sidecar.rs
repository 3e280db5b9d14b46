#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(sidecar) = holo2d::io::RaySidecar::from_json(text) {
            let _ = sidecar.to_meta();
            let _ = holo2d::io::RaySidecar::from_json(&sidecar.to_json()).unwrap();
        }
    }
});
