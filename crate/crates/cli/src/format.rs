//! Stable 12-significant-digit decimal formatting for CSV and JSON output
//! (always '.' as decimal separator, trailing zeros trimmed).

pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let formatted = format!("{:.11e}", x);
    let (mantissa, exponent) = formatted.split_once('e').expect("exponential format");
    let exponent: i32 = exponent.parse().expect("numeric exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 12);

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if !(-4..12).contains(&exponent) {
        out.push(digits.as_bytes()[0] as char);
        let frac = digits[1..].trim_end_matches('0');
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
        out.push('e');
        out.push_str(&exponent.to_string());
    } else if exponent >= 0 {
        let point = (exponent + 1) as usize;
        out.push_str(&digits[..point]);
        let frac = digits[point..].trim_end_matches('0');
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
    } else {
        out.push_str("0.");
        for _ in 0..(-exponent - 1) {
            out.push('0');
        }
        let frac = digits.trim_end_matches('0');
        out.push_str(if frac.is_empty() { "0" } else { frac });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::sig12;

    #[test]
    fn formats_representative_values() {
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(0.55), "0.55");
        assert_eq!(sig12(2.0), "2");
        assert_eq!(sig12(-0.25), "-0.25");
        assert_eq!(sig12(2.0 * 2.0f64.sqrt()), "2.82842712475");
        assert_eq!(sig12(1e-6), "1e-6");
        assert_eq!(sig12(8.000011267714141e-6), "8.00001126771e-6");
        assert_eq!(sig12(0.7100591715976331), "0.710059171598");
        assert_eq!(sig12(123456789012345.0), "1.23456789012e14");
    }

    #[test]
    fn round_trips_as_f64() {
        for &x in &[0.55, -1.25e-7, 3.0, 0.9999999999999, 2.82842712474619] {
            let parsed: f64 = sig12(x).parse().unwrap();
            assert!((parsed - x).abs() <= x.abs() * 1e-11);
        }
    }
}
