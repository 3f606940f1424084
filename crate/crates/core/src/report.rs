//! Deterministic numeric formatting shared by every CSV and JSON artifact.

/// 17 significant digits: round-trip exact for 64-bit floats.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        }
    } else {
        format!("{x:.16e}")
    }
}

/// A complex number as a "re+imi" CSV pair.
pub fn fmt_c17(z: num_complex::Complex<f64>) -> String {
    format!("{},{}", fmt_g17(z.re), fmt_g17(z.im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_exact() {
        for x in [0.5, 1.0 / 3.0, 2.0_f64.sqrt(), 1e-300, -7.25e100, 0.1 + 0.2] {
            let s = fmt_g17(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_g17(f64::NAN), "nan");
        assert_eq!(fmt_g17(f64::INFINITY), "inf");
    }
}
