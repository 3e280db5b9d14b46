#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(scene) = holo2d::scenes::MultipoleScene::from_json(text) {
            assert_eq!(
                holo2d::scenes::MultipoleScene::from_json(&scene.to_json()).unwrap(),
                scene
            );
        }
    }
});
