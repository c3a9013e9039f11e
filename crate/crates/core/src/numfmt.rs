//! Significant-digit decimal formatting for the CSV writers and reports.

/// Formats `v` with at most `digits` significant digits: plain decimal while
/// the exponent fits, exponent notation otherwise, trailing zeros dropped.
/// The output always uses `.` as the decimal separator and never groups
/// thousands, so files diff bit-exactly across locales.
pub fn sig(v: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let mut exp = v.abs().log10().floor() as i32;
    // Rounding can carry into the next decade (0.09999... -> 0.1).
    let factor = 10f64.powi(digits as i32 - 1 - exp);
    let rounded = (v * factor).round() / factor;
    if rounded != 0.0 {
        exp = rounded.abs().log10().floor() as i32;
    }
    if exp < -4 || exp >= digits as i32 {
        let s = format!("{:.*e}", digits - 1, v);
        let (mantissa, exponent) = s.split_once('e').expect("exponent notation");
        format!("{}e{}", trim_zeros(mantissa), exponent)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
