//! Complex numbers as `a+bi` strings.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Parse `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`, with optional exponents
/// (`1e-3-2.5e1i`).
pub fn parse_complex(s: &str) -> Result<C64> {
    let t: String = s.chars().filter(|ch| !ch.is_whitespace()).collect();
    let bad = || Error::Invalid(format!("cannot parse complex number {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return t.parse::<f64>().map(|re| c(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not the leading one and not part of an exponent
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            split = Some(k);
            break;
        }
    }
    let imag = |txt: &str| -> Result<f64> {
        match txt {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => txt.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            Ok(c(re, imag(&body[k..])?))
        }
        None => Ok(c(0.0, imag(body)?)),
    }
}

/// Shortest round-tripping `a+bi` form.
pub fn format_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_forms() {
        assert_eq!(parse_complex("0.3-0.1i").unwrap(), c(0.3, -0.1));
        assert_eq!(parse_complex("0.9i").unwrap(), c(0.0, 0.9));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("2").unwrap(), c(2.0, 0.0));
        assert_eq!(parse_complex("1e-3-2.5e1i").unwrap(), c(1e-3, -25.0));
        assert_eq!(parse_complex("-1.5E+2+3i").unwrap(), c(-150.0, 3.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn round_trip() {
        for z in [c(0.1, -0.2), c(-3.5e-9, 7.0), c(0.0, 0.0), c(1.0 / 3.0, -1.0 / 7.0)] {
            assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
        }
    }
}
