//! Decimal rendering for reports and logs.

/// Render `x` with `digits` significant digits, trimming trailing zeros.
///
/// Plain notation is used for magnitudes in `[1e-6, 1e15)`, scientific
/// otherwise. Output depends only on the bit pattern of `x`.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-6..15).contains(&exp) {
        return format!("{}e{}", trim(mantissa), exp);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim(&format!("{:.*}", decimals, x)).to_string()
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Ten significant digits, the precision used by every report.
pub fn sig10(x: f64) -> String {
    sig(x, 10)
}
