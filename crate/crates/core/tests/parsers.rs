use std::fs;
use std::path::PathBuf;

use holo2d::geometry::{parse_vec2, LadderSpec};
use holo2d::io::{
    load_ray, parse_angular_csv, parse_coefficient_block, parse_expansion_csv, parse_farfield_csv, parse_field_csv,
    parse_intensity_csv, parse_karp_csv, write_intensity_csv, RaySidecar,
};
use holo2d::scenes::MultipoleScene;
use proptest::prelude::*;

/// Every parser entry point, exercised the way the fuzz targets do.
fn exercise(text: &str) {
    if let Ok(rows) = parse_intensity_csv(text) {
        assert_eq!(
            parse_intensity_csv(&write_intensity_csv(&rows)).unwrap().len(),
            rows.len()
        );
    }
    if let Ok(sidecar) = RaySidecar::from_json(text) {
        let _ = sidecar.to_meta();
        RaySidecar::from_json(&sidecar.to_json()).unwrap();
    }
    let (sidecar, csv) = text.split_once("\n---\n").unwrap_or(("", text));
    let _ = load_ray(csv, sidecar);
    if let Ok(scene) = MultipoleScene::from_json(text) {
        assert_eq!(MultipoleScene::from_json(&scene.to_json()).unwrap(), scene);
    }
    if let Ok(ladder) = LadderSpec::parse(text) {
        if ladder.count <= 4096 {
            let _ = ladder.radii();
        }
    }
    let _ = parse_vec2(text);
    let _ = parse_angular_csv(text, 16);
    let _ = parse_expansion_csv(text);
    let _ = parse_karp_csv(text, 1.0, 16);
    let _ = parse_farfield_csv(text, 1.0, 16);
    let _ = parse_coefficient_block(text);
    let _ = parse_field_csv(text);
}

fn corpus() -> Vec<(PathBuf, String)> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    let mut out = Vec::new();
    for dir in fs::read_dir(&root).expect("fuzz corpus present") {
        for file in fs::read_dir(dir.unwrap().path()).unwrap() {
            let path = file.unwrap().path();
            let text = fs::read_to_string(&path).unwrap();
            out.push((path, text));
        }
    }
    out.sort();
    out
}

#[test]
fn seed_corpus_is_accepted_by_its_parser() {
    let seeds = corpus();
    assert!(seeds.len() >= 10);
    for (path, text) in &seeds {
        exercise(text);
        let target = path.parent().unwrap().file_name().unwrap().to_str().unwrap();
        let accepted = match target {
            "intensity_csv" => parse_intensity_csv(text).is_ok(),
            "ray_sidecar" => RaySidecar::from_json(text).and_then(|s| s.to_meta()).is_ok(),
            "load_ray" => {
                let (sidecar, csv) = text.split_once("\n---\n").unwrap();
                load_ray(csv, sidecar).is_ok()
            }
            "scene_json" => MultipoleScene::from_json(text).is_ok(),
            "ladder_spec" => LadderSpec::parse(text).is_ok(),
            "vec2" => parse_vec2(text).is_ok(),
            "angular_csv" => parse_angular_csv(text, 16).is_ok(),
            "expansion_csv" => parse_expansion_csv(text).is_ok(),
            "coefficient_block" => parse_coefficient_block(text).is_ok(),
            "field_csv" => parse_field_csv(text).is_ok(),
            other => panic!("seed for unknown target {other}"),
        };
        assert!(accepted, "{} is rejected", path.display());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn mutated_seeds_never_panic(pick in any::<prop::sample::Index>(), edits in prop::collection::vec((any::<prop::sample::Index>(), any::<u8>()), 1..8)) {
        let seeds = corpus();
        let mut bytes = seeds[pick.index(seeds.len())].1.clone().into_bytes();
        for (at, b) in edits {
            if bytes.is_empty() {
                bytes.push(b);
            } else {
                let i = at.index(bytes.len());
                bytes[i] = b;
            }
        }
        if let Ok(text) = std::str::from_utf8(&bytes) {
            exercise(text);
        }
    }

    #[test]
    fn arbitrary_text_never_panics(text in "\\PC{0,200}") {
        exercise(&text);
    }
}
