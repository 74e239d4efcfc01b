//! Number formatting for CSV and report output.

/// `printf("%.{sig}g")`: `sig` significant digits, trailing zeros dropped,
/// exponent form outside `1e-4 ≤ |x| < 10^sig`.
pub fn general(x: f64, sig: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sig = sig.max(1);
    // round once in exponent form so the exponent reflects carries (9.99 → 10)
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= sig as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::general;

    #[test]
    fn matches_printf_g12() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (0.5, "0.5"),
            (-2.25, "-2.25"),
            (0.961319, "0.961319"),
            (1.0 / 3.0, "0.333333333333"),
            (2.0 / 3.0, "0.666666666667"),
            (0.000123456789012345, "0.000123456789012"),
            (1.23e-5, "1.23e-05"),
            (2.98e-14, "2.98e-14"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (999999999999.5, "1e+12"),
            (0.9999999999994, "0.999999999999"),
            (0.999999999999951, "1"),
        ];
        for (x, want) in cases {
            assert_eq!(general(x, 12), want, "{x:e}");
        }
        assert_eq!(general(465.4032, 4), "465.4");
    }
}
