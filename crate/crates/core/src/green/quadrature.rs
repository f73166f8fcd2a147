//! Uniform-node quadrature for the two pairings: a circle around the origin
//! (residue pairing) and a unit horizontal segment (periodic pairing).

use std::f64::consts::PI;

use crate::cnum::{C64, I};
use crate::error::{Error, Result};

pub const DEFAULT_NODES: usize = 128;
pub const MIN_NODES: usize = 32;

fn check_nodes(m: usize) -> Result<()> {
    if m < MIN_NODES {
        return Err(Error::Invalid(format!("at least {MIN_NODES} quadrature nodes required, got {m}")));
    }
    Ok(())
}

/// (1/2πi)∮_{|z|=r} f(z) dz by the M-point trapezoid rule.
pub fn circle_pairing<F>(f: F, radius: f64, m: usize) -> Result<C64>
where
    F: Fn(C64) -> Result<C64>,
{
    check_nodes(m)?;
    let mut sum = C64::new(0.0, 0.0);
    for k in 0..m {
        let z = C64::from_polar(radius, 2.0 * PI * k as f64 / m as f64);
        let v = f(z)? * z;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFinite(k));
        }
        sum += v;
    }
    Ok(sum / m as f64)
}

/// (1/2πi)∫ f(x + ih) dx over x ∈ [−1/2, 1/2) by the M-point rule.
pub fn segment_pairing<F>(f: F, height: f64, m: usize) -> Result<C64>
where
    F: Fn(C64) -> Result<C64>,
{
    check_nodes(m)?;
    let mut sum = C64::new(0.0, 0.0);
    for k in 0..m {
        let z = C64::new(-0.5 + k as f64 / m as f64, height);
        let v = f(z)?;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFinite(k));
        }
        sum += v;
    }
    Ok(sum / (m as f64 * 2.0 * PI * I))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnum::c;

    #[test]
    fn residue_of_one_over_z() {
        let v = circle_pairing(|z| Ok(1.0 / z), 0.3, 64).unwrap();
        assert!((v - 1.0).norm() < 1e-13);
        for n in [-5i32, -2, 0, 3, 7] {
            let v = circle_pairing(|z| Ok(z.powi(n)), 0.4, 64).unwrap();
            let want = if n == -1 { 1.0 } else { 0.0 };
            assert!((v - want).norm() < 1e-13);
        }
    }

    #[test]
    fn dual_exponentials() {
        for n in -3i32..=3 {
            for m in -3i32..=3 {
                let f = |z: C64| Ok((2.0 * PI * I * n as f64 * z).exp() * 2.0 * PI * I * (-2.0 * PI * I * m as f64 * z).exp());
                let v = segment_pairing(f, 0.07, 64).unwrap();
                let want = if n == m { 1.0 } else { 0.0 };
                assert!((v - want).norm() < 1e-12, "{n} {m} {v}");
            }
        }
        let v = segment_pairing(|_| Ok(c(1.0, 0.0)), -0.2, 32).unwrap();
        assert!((v - 1.0 / (2.0 * PI * I)).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(circle_pairing(|z| Ok(z), 0.3, 8).is_err());
        assert!(matches!(circle_pairing(|_| Ok(c(f64::NAN, 0.0)), 0.3, 32), Err(Error::NonFinite(0))));
    }
}
