#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(ladder) = holo2d::geometry::LadderSpec::parse(text) {
            if ladder.count <= 4096 {
                let _ = ladder.radii();
            }
        }
    }
});
