//! Decimal rendering shared by every report.

/// Renders `x` with at least 12 significant digits and at least 12 decimal
/// places, so that parsing the text back is within `5e-13` of `x` whatever
/// its magnitude.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x.abs() >= 1.0 {
        let s = format!("{x:.12}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        return s.to_string();
    }
    // shortest text of the nearest double to the 12-digit value
    let rounded: f64 = format!("{x:.11e}").parse().expect("valid float text");
    rounded.to_string()
}

/// `x` as it reads back from [`format_number`].
pub fn round_number(x: f64) -> f64 {
    format_number(x).parse().expect("valid float text")
}
