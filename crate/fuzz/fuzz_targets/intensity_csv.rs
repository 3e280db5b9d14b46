#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(rows) = holo2d::io::parse_intensity_csv(text) {
            let again = holo2d::io::parse_intensity_csv(&holo2d::io::write_intensity_csv(&rows)).unwrap();
            assert_eq!(rows.len(), again.len());
        }
    }
});
