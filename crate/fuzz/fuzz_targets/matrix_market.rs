#![no_main]

use libfuzzer_sys::fuzz_target;
use specset::io::{read_matrix_market, write_matrix_market};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(a) = read_matrix_market(text) {
        let again = read_matrix_market(&write_matrix_market(&a, "fuzz")).expect("written matrix parses");
        assert_eq!(again.as_dmatrix(), a.as_dmatrix());
    }
});
