//! Number formatting for text reports.

/// Formats `x` with 9 significant digits, fixed notation when reasonable.
pub fn sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-5..=9).contains(&mag) {
        let decimals = (8 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.8e}")
    }
}
