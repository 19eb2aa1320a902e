#![no_main]

use libfuzzer_sys::fuzz_target;
use lpgauss_core::io::{body_to_json, parse_body};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(k) = parse_body(s) {
        // anything accepted must survive its own serialization
        let again = parse_body(&body_to_json(&k)).expect("round trip");
        assert_eq!(again.num_facets(), k.num_facets());
    }
});
