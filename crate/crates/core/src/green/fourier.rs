//! Fourier forms of the cylinder kernels 𝒢, 𝒢λ± and γ, their τ-derivatives,
//! and the heat-type identities linking ∂τ to ∂u∂λ.

use std::f64::consts::PI;

use crate::cnum::{C64, I};
use crate::error::{Error, Result};
use crate::green::kernels::{dw_dlambda_g_lambda, dw_gamma, Strip, StripPoint};
use crate::theta::EllipticParams;

pub const MAX_FOURIER_TERMS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    fn strip(self) -> Strip {
        match self {
            Sign::Plus => Strip::Lower,
            Sign::Minus => Strip::Upper,
        }
    }
}

/// Symmetric truncation N from the geometric tail e^{−2πN·margin} < tol.
pub fn fourier_truncation(im_w: f64, p: &EllipticParams, tol: f64) -> usize {
    let t = p.im_tau();
    let margin = im_w.abs().min(t - im_w.abs()).max(1e-12);
    let n = ((1.0 / tol).ln() / (2.0 * PI * margin)).ceil() + 2.0;
    (n.max(1.0) as usize).min(MAX_FOURIER_TERMS)
}

/// e^{−2πinw}/(1 − e^L) without forming e^L when |e^L| > 1.
fn geometric_term(phase: C64, l: C64) -> C64 {
    if l.re <= 0.0 {
        phase.exp() / (1.0 - l.exp())
    } else {
        -(phase - l).exp() / (1.0 - (-l).exp())
    }
}

/// e^{phase}·x/(1−x)² with x = e^L; symmetric under x → 1/x.
fn dgeometric_term(phase: C64, l: C64) -> C64 {
    let l = if l.re <= 0.0 { l } else { -l };
    let x = l.exp();
    (phase + l).exp() / ((1.0 - x) * (1.0 - x))
}

fn check_strip(w: &StripPoint, want: Strip) -> Result<()> {
    if w.strip() != want {
        return Err(Error::Strip(format!("expected a {want:?} strip point, got {:?}", w.strip())));
    }
    Ok(())
}

fn check_band(lambda: C64, p: &EllipticParams) -> Result<()> {
    if lambda.im.abs() >= p.im_tau() {
        return Err(Error::Band(format!("|Im lambda| = {} must be below Im tau = {}", lambda.im.abs(), p.im_tau())));
    }
    Ok(())
}

/// Coefficient of e^{−2πinw} in the Fourier form of 𝒢λ± (λ given) or of
/// 𝒢(w), −𝒢(−w) (λ absent, sign + and − respectively).
pub fn fourier_coeff(n: i64, lambda: Option<C64>, sign: Sign, p: &EllipticParams) -> C64 {
    let tau = p.tau();
    let nf = n as f64;
    let s = sign.factor();
    match lambda {
        Some(l) => s * 2.0 * PI * I * geometric_term(C64::new(0.0, 0.0), s * 2.0 * PI * I * (tau * nf - l)),
        None => {
            if n == 0 {
                return s * PI * I;
            }
            let m = if sign == Sign::Plus { nf } else { -nf };
            s * 2.0 * PI * I * geometric_term(C64::new(0.0, 0.0), 2.0 * PI * I * tau * m)
        }
    }
}

/// Symmetric partial Fourier sum of 𝒢λ± or of 𝒢 (λ absent).
pub fn fourier_g_cyl(w: &StripPoint, lambda: Option<C64>, sign: Sign, p: &EllipticParams, n: usize) -> Result<C64> {
    check_strip(w, sign.strip())?;
    let tau = p.tau();
    let s = sign.factor();
    let ww = w.w();
    let mut sum = C64::new(0.0, 0.0);
    match lambda {
        Some(l) => {
            check_band(l, p)?;
            for k in -(n as i64)..=(n as i64) {
                let kf = k as f64;
                let phase = -2.0 * PI * I * kf * ww;
                sum += geometric_term(phase, s * 2.0 * PI * I * (tau * kf - l));
            }
            Ok(s * 2.0 * PI * I * sum)
        }
        None => {
            for k in 1..=(n as i64) {
                let kf = k as f64;
                for m in [kf, -kf] {
                    // the minus partner is −𝒢(−w): flip the exponent sign
                    let phase = -2.0 * PI * I * m * ww * s;
                    sum += geometric_term(phase, 2.0 * PI * I * tau * m);
                }
            }
            Ok(s * (PI * I + 2.0 * PI * I * sum))
        }
    }
}

/// Term-wise ∂τ of the same partial sum.
pub fn dtau_fourier_g_cyl(w: &StripPoint, lambda: Option<C64>, sign: Sign, p: &EllipticParams, n: usize) -> Result<C64> {
    check_strip(w, sign.strip())?;
    let tau = p.tau();
    let s = sign.factor();
    let ww = w.w();
    let mut sum = C64::new(0.0, 0.0);
    match lambda {
        Some(l) => {
            check_band(l, p)?;
            for k in -(n as i64)..=(n as i64) {
                if k == 0 {
                    // ∂τ of the n = 0 term vanishes
                    continue;
                }
                let kf = k as f64;
                let phase = -2.0 * PI * I * kf * ww;
                sum += 2.0 * PI * I * kf * dgeometric_term(phase, 2.0 * PI * I * (tau * kf - l));
            }
            Ok(2.0 * PI * I * sum)
        }
        None => {
            for k in 1..=(n as i64) {
                let kf = k as f64;
                for m in [kf, -kf] {
                    let phase = -2.0 * PI * I * m * ww * s;
                    sum += 2.0 * PI * I * m * dgeometric_term(phase, 2.0 * PI * I * tau * m);
                }
            }
            Ok(s * 2.0 * PI * I * sum)
        }
    }
}

/// −2π² + 8π² Σ_{0<|n|≤N} e^{−2πinw} y/(1−y)², y = e^{2πinτ}; valid for |Im w| < Im τ.
pub(crate) fn gamma_series(w: C64, p: &EllipticParams, n: usize) -> C64 {
    let tau = p.tau();
    let mut sum = C64::new(0.0, 0.0);
    for k in 1..=(n as i64) {
        let kf = k as f64;
        for m in [kf, -kf] {
            sum += dgeometric_term(-2.0 * PI * I * m * w, 2.0 * PI * I * tau * m);
        }
    }
    -2.0 * PI * PI + 8.0 * PI * PI * sum
}

/// Partial Fourier sum of γ on the lower strip. N = 0 keeps only the constant.
pub fn gamma_fourier(w: &StripPoint, p: &EllipticParams, n: usize) -> Result<C64> {
    check_strip(w, Strip::Lower)?;
    Ok(gamma_series(w.w(), p, n))
}

/// Which heat-type identity to check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeatVariant {
    /// (1/2πi)∂u∂λ𝒢λ± = ∂τ𝒢λ±
    Lambda { lambda: C64, sign: Sign },
    /// (1/4πi)∂uγ = ∂τ𝒢
    Gamma,
}

/// Left side minus right side of a heat-type identity.
pub fn heat_identity_residual(w: &StripPoint, variant: HeatVariant, p: &EllipticParams) -> Result<C64> {
    let n = fourier_truncation(w.w().im, p, 1e-17);
    match variant {
        HeatVariant::Lambda { lambda, sign } => {
            check_band(lambda, p)?;
            let lhs = dw_dlambda_g_lambda(w.w(), lambda, p)? / (2.0 * PI * I);
            Ok(lhs - dtau_fourier_g_cyl(w, Some(lambda), sign, p, n)?)
        }
        HeatVariant::Gamma => {
            check_strip(w, Strip::Lower)?;
            let lhs = dw_gamma(w.w(), p)? / (4.0 * PI * I);
            Ok(lhs - dtau_fourier_g_cyl(w, None, Sign::Plus, p, n)?)
        }
    }
}
