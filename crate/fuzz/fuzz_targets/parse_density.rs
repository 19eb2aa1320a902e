#![no_main]

use libfuzzer_sys::fuzz_target;
use lpgauss_core::io::parse_density;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(grid) = parse_density(s) {
        assert_eq!(grid.values.len(), grid.resolution);
        assert!(grid.values.iter().all(|v| *v > 0.0 && v.is_finite()));
    }
});
