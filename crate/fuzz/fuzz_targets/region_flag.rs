#![no_main]

use libfuzzer_sys::fuzz_target;
use specset::regions::RegionSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(spec) = RegionSpec::from_flag(text) {
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(RegionSpec::from_json(&json).expect("flag spec survives JSON"), spec);
    }
});
