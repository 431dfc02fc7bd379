#![no_main]

use libfuzzer_sys::fuzz_target;
use specset::gallery::GallerySpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(spec) = GallerySpec::parse(text) {
        assert!(spec.validate().is_ok());
        let json = serde_json::to_string(&spec).unwrap();
        let back: GallerySpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        // Building is quadratic in n; keep iterations fast.
        let small = match &spec {
            GallerySpec::Grcar { n, .. } | GallerySpec::Jordan { n, .. } | GallerySpec::RankOne { n, .. } => *n <= 64,
            GallerySpec::BlockRandom { blocks, .. } => blocks.iter().map(|b| b.size).sum::<usize>() <= 64,
            GallerySpec::NormalDiag { values } => values.len() <= 64,
        };
        if small {
            let _ = spec.build();
        }
    }
});
