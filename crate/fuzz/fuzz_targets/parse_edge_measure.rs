#![no_main]

use libfuzzer_sys::fuzz_target;
use lpgauss_core::io::{edge_measure_to_json, parse_edge_measure};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(em) = parse_edge_measure(s) {
        let again = parse_edge_measure(&edge_measure_to_json(&em)).expect("round trip");
        assert_eq!(again.edges.len(), em.edges.len());
    }
});
