//! The normalized odd theta function.
//!
//! θ is the entire odd function with θ(u+1) = −θ(u),
//! θ(u+τ) = −e^{−2πiu−πiτ}θ(u) and θ′(0) = 1. It is evaluated as
//!
//! ```text
//! θ(u) = Σ (−1)ⁿ q^{n(n+1)} sin((2n+1)πu) / (π Σ (−1)ⁿ (2n+1) q^{n(n+1)}),   q = e^{iπτ}
//! ```
//!
//! after reducing u into the fundamental cell. Derivatives and Taylor
//! coefficients come from differentiating the same truncated series term by
//! term. When Im τ is small the series is evaluated at the modulus −1/τ instead.

use std::f64::consts::PI;

use crate::cnum::{C64, I};
use crate::error::{Error, Result};

/// Below this value of Im τ the modular route is used.
pub const MODULAR_THRESHOLD: f64 = 0.05;

pub const DEFAULT_SERIES_TOL: f64 = 1e-15;
pub const DEFAULT_MAX_TERMS: usize = 64;

/// Modulus τ with its nome and truncation policy. Immutable once built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticParams {
    tau: C64,
    /// τ shifted by an integer so that |Re τ| ≤ 1/2; θ is unchanged by τ → τ+1.
    tau_red: C64,
    q: C64,
    series_tol: f64,
    max_terms: usize,
}

impl EllipticParams {
    pub fn new(tau: C64) -> Result<Self> {
        if !(tau.im > 0.0) || !tau.re.is_finite() || !tau.im.is_finite() {
            return Err(Error::InvalidModulus(tau.im));
        }
        let q = (I * PI * tau).exp();
        debug_assert!(q.norm() < 1.0);
        let tau_red = C64::new(tau.re - tau.re.round(), tau.im);
        Ok(Self { tau, tau_red, q, series_tol: DEFAULT_SERIES_TOL, max_terms: DEFAULT_MAX_TERMS })
    }

    /// Shorthand for `EllipticParams::new(C64::new(re, im))`.
    pub fn from_parts(re: f64, im: f64) -> Result<Self> {
        Self::new(C64::new(re, im))
    }

    pub fn with_series_tol(mut self, tol: f64) -> Self {
        self.series_tol = tol;
        self
    }

    pub fn with_max_terms(mut self, n: usize) -> Self {
        self.max_terms = n;
        self
    }

    pub fn tau(&self) -> C64 {
        self.tau
    }

    pub fn q(&self) -> C64 {
        self.q
    }

    pub fn im_tau(&self) -> f64 {
        self.tau.im
    }

    pub fn series_tol(&self) -> f64 {
        self.series_tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    /// Smallest N with |q|^{(N+1/2)²} < series_tol.
    pub fn truncation_index(&self) -> usize {
        let lq = -PI * self.tau.im;
        let need = self.series_tol.ln() / lq;
        let n = need.sqrt() - 0.5;
        n.max(0.0).floor() as usize + 1
    }

    /// Distance from w to the nearest point of ℤ + τℤ.
    pub fn lattice_distance(&self, w: C64) -> f64 {
        let t = self.tau_red;
        let k = (w.im / t.im).round();
        let m = (w.re - k * t.re).round();
        let mut best = f64::INFINITY;
        for dk in -1..=1 {
            for dm in -1..=1 {
                let p = C64::new(m + dm as f64, 0.0) + t * (k + dk as f64);
                best = best.min((w - p).norm());
            }
        }
        best
    }

    /// Length of the shortest nonzero lattice vector.
    pub fn shortest_period(&self) -> f64 {
        let t = self.tau_red;
        let kmax = ((2.0 / t.im).ceil() as i64).clamp(1, 64);
        let mut best = 1.0f64;
        for k in 1..=kmax {
            let x = k as f64 * t.re;
            let m = x.round();
            for dm in -1..=1 {
                best = best.min(C64::new(x - m + dm as f64, k as f64 * t.im).norm());
            }
        }
        best
    }
}

/// θ and its first three u-derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaDerivs {
    pub d0: C64,
    pub d1: C64,
    pub d2: C64,
    pub d3: C64,
}

/// Taylor coefficients stored as e^{log_scale}·coeffs to keep large
/// quasi-periodicity factors out of the mantissas.
#[derive(Debug, Clone)]
struct Jet {
    log_scale: C64,
    coeffs: Vec<C64>,
}

impl Jet {
    fn materialize(&self) -> Vec<C64> {
        let s = self.log_scale.exp();
        self.coeffs.iter().map(|c| c * s).collect()
    }
}

fn mul_series(a: &[C64], b: &[C64], order: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); order + 1];
    for (i, ai) in a.iter().enumerate().take(order + 1) {
        if *ai == C64::new(0.0, 0.0) {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(order + 1 - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// exp(b t) as a Taylor series in t.
fn exp_series(b: C64, order: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(order + 1);
    let mut term = C64::new(1.0, 0.0);
    out.push(term);
    for j in 1..=order {
        term = term * b / j as f64;
        out.push(term);
    }
    out
}

/// Direct series at the reduced modulus, Taylor coefficients around u.
fn jet_direct(u: C64, p: &EllipticParams, order: usize) -> Result<Jet> {
    let tau = p.tau_red;
    let k = (u.im / tau.im).round();
    let w = u - tau * k;
    let m = w.re.round();
    let u0 = w - m;
    // θ(u+t) = (−1)^{k+m} e^{−2πik(w+t) − πiτk²} θ(u0+t)
    let parity = if ((k + m) as i64).rem_euclid(2) == 1 { PI } else { 0.0 };
    let log_scale = -2.0 * PI * I * k * w - PI * I * tau * k * k + I * parity;
    let mult = exp_series(-2.0 * PI * I * k, order);

    let mut s = vec![C64::new(0.0, 0.0); order + 1];
    let mut norm = C64::new(0.0, 0.0);
    let cut = 0.1 * p.series_tol;
    let mut n = 0usize;
    loop {
        if n >= p.max_terms {
            return Err(Error::TruncationOverflow(p.max_terms));
        }
        let nf = n as f64;
        let a = (2.0 * nf + 1.0) * PI;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let weight = (I * PI * tau * (nf * (nf + 1.0))).exp() * sign;
        let x = a * u0;
        let (sx, cx) = (x.sin(), x.cos());
        let mut pw = 1.0f64;
        let mut pw_sum = 0.0f64;
        for (j, sj) in s.iter_mut().enumerate() {
            if j > 0 {
                pw *= a / j as f64;
            }
            pw_sum += pw;
            let trig = match j % 4 {
                0 => sx,
                1 => cx,
                2 => -sx,
                _ => -cx,
            };
            *sj += weight * pw * trig;
        }
        norm += weight * a;
        let bound = weight.norm() * (a * u0.im.abs()).exp() * pw_sum.max(1.0) * (2.0 * nf + 1.0);
        n += 1;
        if bound < cut * PI {
            break;
        }
    }
    let mut coeffs = mul_series(&mult, &s, order);
    for c in coeffs.iter_mut() {
        *c /= norm;
    }
    Ok(Jet { log_scale, coeffs })
}

/// θ(u|τ) = −τ e^{−iπu²/τ} θ(−u/τ | −1/τ), after reducing u in the original lattice.
fn jet_modular(u: C64, p: &EllipticParams, order: usize) -> Result<Jet> {
    let tau = p.tau_red;
    let k = (u.im / tau.im).round();
    let w = u - tau * k;
    let m = w.re.round();
    let u0 = w - m;
    let parity = if ((k + m) as i64).rem_euclid(2) == 1 { PI } else { 0.0 };
    let log_outer = -2.0 * PI * I * k * w - PI * I * tau * k * k + I * parity;
    let mult = exp_series(-2.0 * PI * I * k, order);

    let tau_s = -1.0 / tau;
    let ps = EllipticParams::new(tau_s)?
        .with_series_tol(p.series_tol)
        .with_max_terms(p.max_terms);
    let cfac = -1.0 / tau;
    let inner = jet_direct(cfac * u0, &ps, order)?;
    let mut h = inner.coeffs.clone();
    let mut cp = C64::new(1.0, 0.0);
    for hj in h.iter_mut() {
        *hj *= cp;
        cp *= cfac;
    }
    // e^{a(u0+t)²} = e^{a u0²} · e^{2a u0 t} · e^{a t²}
    let a = -I * PI / tau;
    let lin = exp_series(2.0 * a * u0, order);
    let mut quad = vec![C64::new(0.0, 0.0); order + 1];
    let mut term = C64::new(1.0, 0.0);
    for j in 0..=order / 2 {
        if j > 0 {
            term = term * a / j as f64;
        }
        quad[2 * j] = term;
    }
    let gauss = mul_series(&lin, &quad, order);
    let local = mul_series(&gauss, &h, order);
    let coeffs = mul_series(&mult, &local, order);
    let log_scale = log_outer + a * u0 * u0 + inner.log_scale + (-tau).ln();
    Ok(Jet { log_scale, coeffs })
}

fn jet(u: C64, p: &EllipticParams, order: usize) -> Result<Jet> {
    if p.tau.im < MODULAR_THRESHOLD {
        jet_modular(u, p, order)
    } else {
        jet_direct(u, p, order)
    }
}

fn derivs_from(j: &Jet) -> ThetaDerivs {
    let c = j.materialize();
    ThetaDerivs { d0: c[0], d1: c[1], d2: c[2] * 2.0, d3: c[3] * 6.0 }
}

/// θ(u), routed through the modular transformation when Im τ < 0.05.
pub fn theta(u: C64, p: &EllipticParams) -> Result<C64> {
    Ok(jet(u, p, 0)?.materialize()[0])
}

/// θ, θ′, θ″, θ‴ at u by term-wise differentiation.
pub fn theta_derivs(u: C64, p: &EllipticParams) -> Result<ThetaDerivs> {
    Ok(derivs_from(&jet(u, p, 3)?))
}

/// Taylor coefficients θ^{(k)}(u)/k! for k = 0..=order.
pub fn theta_taylor(u: C64, p: &EllipticParams, order: usize) -> Result<Vec<C64>> {
    Ok(jet(u, p, order)?.materialize())
}

/// Direct series regardless of Im τ; fails with truncation overflow when
/// `max_terms` is too small for the modulus.
pub fn theta_direct(u: C64, p: &EllipticParams) -> Result<C64> {
    Ok(jet_direct(u, p, 0)?.materialize()[0])
}

pub fn theta_derivs_direct(u: C64, p: &EllipticParams) -> Result<ThetaDerivs> {
    Ok(derivs_from(&jet_direct(u, p, 3)?))
}

/// θ(u|τ) through the modulus −1/τ, where the nome is small.
pub fn theta_small_imtau(u: C64, p: &EllipticParams) -> Result<C64> {
    Ok(jet_modular(u, p, 0)?.materialize()[0])
}

pub fn theta_derivs_small_imtau(u: C64, p: &EllipticParams) -> Result<ThetaDerivs> {
    Ok(derivs_from(&jet_modular(u, p, 3)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnum::c;

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm().max(1.0)
    }

    /// θ₁(πu)/(πθ₁′(0)) from the product formulas, as an independent oracle.
    fn theta_product(u: C64, tau: C64) -> C64 {
        let q = (I * PI * tau).exp();
        let z = PI * u;
        let mut num = 2.0 * z.sin();
        let mut den = C64::new(2.0, 0.0);
        let q2 = q * q;
        let mut q2n = q2;
        for _ in 1..200 {
            let one = C64::new(1.0, 0.0);
            let f = one - q2n;
            num *= f * (one - 2.0 * q2n * (2.0 * z).cos() + q2n * q2n);
            den *= f * f * f;
            q2n *= q2;
        }
        // the q^{1/4} prefactors cancel in the ratio
        num / (PI * den)
    }

    #[test]
    fn product_oracle() {
        let p = EllipticParams::from_parts(0.0, 1.0).unwrap();
        let v = theta(c(0.25, 0.0), &p).unwrap();
        assert!((v - theta_product(c(0.25, 0.0), c(0.0, 1.0))).norm() < 1e-12);
        // frozen from an arbitrary-precision evaluation of θ₁(πu)/(πθ₁′(0))
        assert!((v - c(0.225_924_450_847_643_42, 0.0)).norm() < 1e-12, "{v}");
        for (u, t) in [(c(0.31, 0.12), c(0.5, 0.9)), (c(-0.4, 0.3), c(0.2, 0.6)), (c(1.7, -0.9), c(-0.3, 0.8))] {
            let p = EllipticParams::new(t).unwrap();
            assert!(rel(theta(u, &p).unwrap(), theta_product(u, t)) < 1e-12);
        }
    }

    #[test]
    fn axioms_at_zero() {
        let p = EllipticParams::from_parts(0.0, 0.8).unwrap();
        let d = theta_derivs(c(0.0, 0.0), &p).unwrap();
        assert_eq!(d.d0, c(0.0, 0.0));
        assert!((d.d1 - 1.0).norm() < 10.0 * p.series_tol());
        assert!(d.d2.norm() < 1e-14);
    }

    #[test]
    fn quasi_periodicity_examples() {
        let p = EllipticParams::from_parts(0.5, 0.9).unwrap();
        let u = c(0.31, 0.12);
        assert!((theta(u + 1.0, &p).unwrap() + theta(u, &p).unwrap()).norm() < 1e-12);
        let t = p.tau();
        let lhs = theta(u + t, &p).unwrap();
        let rhs = -(-2.0 * PI * I * u - PI * I * t).exp() * theta(u, &p).unwrap();
        assert!(rel(lhs, rhs) < 1e-10);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = EllipticParams::from_parts(0.0, 1.0).unwrap();
        let h = 1e-5;
        let u = c(0.2, 0.0);
        let fd = (theta(u + h, &p).unwrap() - theta(u - h, &p).unwrap()) / (2.0 * h);
        let d1 = theta_derivs(u, &p).unwrap().d1;
        assert!((fd - d1).norm() < 1e-9);
    }

    #[test]
    fn higher_taylor_coefficients_match_derivs() {
        let p = EllipticParams::from_parts(0.1, 0.7).unwrap();
        let u = c(0.13, -0.21);
        let t = theta_taylor(u, &p, 8).unwrap();
        let d = theta_derivs(u, &p).unwrap();
        assert!((t[0] - d.d0).norm() < 1e-14);
        assert!((t[1] - d.d1).norm() < 1e-13);
        assert!((t[2] * 2.0 - d.d2).norm() < 1e-12);
        assert!((t[3] * 6.0 - d.d3).norm() < 1e-11);
        // fourth derivative against a difference of third derivatives
        let h = 1e-4;
        let d3p = theta_derivs(u + h, &p).unwrap().d3;
        let d3m = theta_derivs(u - h, &p).unwrap().d3;
        let fd4 = (d3p - d3m) / (2.0 * h);
        assert!(rel(fd4, t[4] * 24.0) < 1e-6, "{fd4} {}", t[4] * 24.0);
    }

    #[test]
    fn modular_route_agrees_with_direct() {
        let p = EllipticParams::from_parts(0.0, 0.04).unwrap();
        let wide = p.with_max_terms(4096);
        let a = theta_small_imtau(c(0.1, 0.0), &p).unwrap();
        let b = theta_direct(c(0.1, 0.0), &wide).unwrap();
        assert!(rel(a, b) < 1e-10, "{a} {b}");
        let p3 = EllipticParams::from_parts(0.0, 0.03).unwrap();
        assert!(theta_small_imtau(c(0.0, 0.0), &p3).unwrap().norm() < 1e-300);
        let p2 = EllipticParams::from_parts(0.0, 0.02).unwrap();
        let u = c(0.2, 0.0);
        let r = theta(u + 1.0, &p2).unwrap() + theta(u, &p2).unwrap();
        assert!(r.norm() < 1e-9 * theta(u, &p2).unwrap().norm().max(1.0));
        // derivatives too, at a complex modulus
        let pc = EllipticParams::from_parts(0.3, 0.2).unwrap();
        let u = c(0.17, 0.05);
        let a = theta_derivs_small_imtau(u, &pc).unwrap();
        let b = theta_derivs_direct(u, &pc).unwrap();
        for (x, y) in [(a.d0, b.d0), (a.d1, b.d1), (a.d2, b.d2), (a.d3, b.d3)] {
            assert!(rel(x, y) < 1e-10, "{x} {y}");
        }
    }

    #[test]
    fn invalid_modulus_and_overflow() {
        assert!(matches!(EllipticParams::from_parts(0.0, 0.0), Err(Error::InvalidModulus(_))));
        assert!(matches!(EllipticParams::from_parts(0.0, -1.0), Err(Error::InvalidModulus(_))));
        let p = EllipticParams::from_parts(0.0, 0.001).unwrap().with_max_terms(8);
        assert!(matches!(theta_direct(c(0.1, 0.0), &p), Err(Error::TruncationOverflow(8))));
    }

    #[test]
    fn truncation_index_meets_tolerance() {
        for t in [0.3, 0.8, 2.0] {
            let p = EllipticParams::from_parts(0.0, t).unwrap();
            let n = p.truncation_index() as f64;
            assert!(p.q().norm().powf((n + 0.5) * (n + 0.5)) < p.series_tol());
        }
    }
}
