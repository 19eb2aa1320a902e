#![no_main]

use libfuzzer_sys::fuzz_target;
use lpgauss_core::io::{measure_to_json, parse_measure};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok((mu, p)) = parse_measure(s) {
        let (again, _) = parse_measure(&measure_to_json(&mu, p)).expect("round trip");
        assert_eq!(again.atoms().len(), mu.atoms().len());
    }
});
