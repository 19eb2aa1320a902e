#![no_main]

use libfuzzer_sys::fuzz_target;
use lpgauss_core::io::{field_to_json, parse_field};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(field) = parse_field(s) {
        let again = parse_field(&field_to_json(&field)).expect("round trip");
        assert_eq!(again.values(), field.values());
    }
});
