#![no_main]

use libfuzzer_sys::fuzz_target;
use specset::regions::RegionSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(spec) = RegionSpec::from_json(text) {
        assert!(spec.validate().is_ok());
        let back = RegionSpec::from_json(&serde_json::to_string(&spec).unwrap()).expect("reserialized spec parses");
        assert_eq!(back, spec);
    }
});
