//! Number rendering shared by every table and machine line.

/// Six significant digits. Decimal rounding of the exact binary value, ties to even.
/// Fixed notation for exponents in `[-5, 6)`, scientific otherwise.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0.00000".to_string();
    }
    let sci = format!("{x:.5e}");
    let (_, exp) = sci.split_once('e').expect("exponent in scientific rendering");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        format!("{x:.*}", (5 - exp) as usize)
    } else {
        sci
    }
}

/// Angle in radians with its value in degrees alongside.
pub fn angle(a: f64) -> String {
    format!("{} rad ({} deg)", sig6(a), sig6(a.to_degrees()))
}
