//! Number formatting for CSV and JSON output.

/// Formats `x` with 17 significant digits, enough to parse back exactly.
pub fn sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}
