//! Fixed-precision number formatting for text outputs.

/// Formats `x` with 9 significant digits, `%g` style: fixed notation for
/// decimal exponents in [−5, 9), scientific otherwise, trailing zeros trimmed.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.8e}", x);
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim(mant), exp)
    }
}

fn trim(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::sig9;

    #[test]
    fn formats() {
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(1.0), "1");
        assert_eq!(sig9(-1.2158542037080532), "-1.2158542");
        assert_eq!(sig9(0.0833333333333), "0.0833333333");
        assert_eq!(sig9(123456789.4), "123456789");
        assert_eq!(sig9(1.5e-7), "1.5e-7");
        assert_eq!(sig9(2.5e12), "2.5e12");
        assert_eq!(sig9(0.99999999999), "1");
    }
}
