//! Convolutions of Green kernels through the two pairings.
//!
//! On the residue side the six products reproduce projector algebra exactly.
//! On the cylinder side the seven products pick up ∂λ and γ corrections.
//! Each identity fixes where the contour must run relative to u and v; the
//! contour is chosen inside that region automatically.

use std::f64::consts::PI;

use crate::cnum::{C64, I};
use crate::error::{Error, Result};
use crate::green::fourier::gamma_series;
use crate::green::fourier::{fourier_truncation, gamma_fourier};
use crate::green::kernels::{dlambda_g_lambda, g0, g_lambda, StripPoint};
use crate::green::quadrature::{circle_pairing, segment_pairing};
use crate::theta::EllipticParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConvolutionId {
    /// ⟨Gλ⁺(u,z)Gλ⁺(z,v)⟩ = Gλ⁺(u,v)
    K0PlusPlus,
    /// ⟨Gλ⁺(u,z)Gλ⁻(z,v)⟩ = 0
    K0PlusMinus,
    /// ⟨Gλ⁻(u,z)Gλ⁻(z,v)⟩ = −Gλ⁻(u,v)
    K0MinusMinus,
    /// ⟨Gλ⁻(u,z)Gλ⁺(z,v)⟩ = 0
    K0MinusPlus,
    /// ⟨G(u,z)G(z,v)⟩ = G(u,v)
    K0GG,
    /// ⟨G(u,z)G(v,z)⟩ = 0
    K0GGTransposed,
    /// ⟨𝒢λ⁺(u−z)𝒢λ⁺(z−v)⟩ = 𝒢λ⁺(u−v) − (1/2πi)∂λ𝒢λ⁺(u−v)
    CylPlusPlus,
    /// ⟨𝒢λ⁺(u−z)𝒢λ⁻(z−v)⟩ = −(1/2πi)∂λ𝒢λ⁺(u−v)
    CylPlusMinus,
    /// ⟨𝒢λ⁻(u−z)𝒢λ⁺(z−v)⟩ = −(1/2πi)∂λ𝒢λ⁺(u−v)
    CylMinusPlus,
    /// ⟨𝒢λ⁻(u−z)𝒢λ⁻(z−v)⟩ = −𝒢λ⁻(u−v) − (1/2πi)∂λ𝒢λ⁺(u−v)
    CylMinusMinus,
    /// ⟨𝒢(u−z)𝒢(z−v)⟩ = 𝒢(u−v) − γ(u−v)/(4πi)
    CylGG,
    /// ⟨𝒢(u−z)𝒢(v−z)⟩ = γ(u−v)/(4πi)
    CylGGRight,
    /// ⟨𝒢(z−u)𝒢(z−v)⟩ = γ(u−v)/(4πi)
    CylGGLeft,
}

impl ConvolutionId {
    pub const K0: [ConvolutionId; 6] = [
        ConvolutionId::K0PlusPlus,
        ConvolutionId::K0PlusMinus,
        ConvolutionId::K0MinusMinus,
        ConvolutionId::K0MinusPlus,
        ConvolutionId::K0GG,
        ConvolutionId::K0GGTransposed,
    ];
    pub const CYL: [ConvolutionId; 7] = [
        ConvolutionId::CylPlusPlus,
        ConvolutionId::CylPlusMinus,
        ConvolutionId::CylMinusPlus,
        ConvolutionId::CylMinusMinus,
        ConvolutionId::CylGG,
        ConvolutionId::CylGGRight,
        ConvolutionId::CylGGLeft,
    ];

    pub fn is_k0(self) -> bool {
        Self::K0.contains(&self)
    }

    pub fn needs_lambda(self) -> bool {
        !matches!(
            self,
            ConvolutionId::K0GG | ConvolutionId::K0GGTransposed | ConvolutionId::CylGG | ConvolutionId::CylGGRight | ConvolutionId::CylGGLeft
        )
    }
}

/// Where the circle radius must lie relative to |u| and |v|.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Radius {
    Between,
    BetweenReversed,
    Inside,
    Outside,
}

fn k0_radius(id: ConvolutionId) -> Radius {
    match id {
        ConvolutionId::K0PlusPlus | ConvolutionId::K0GG => Radius::Between,
        ConvolutionId::K0MinusMinus => Radius::BetweenReversed,
        ConvolutionId::K0PlusMinus | ConvolutionId::K0GGTransposed => Radius::Inside,
        ConvolutionId::K0MinusPlus => Radius::Outside,
        _ => unreachable!("cylinder identity"),
    }
}

/// Circle radius for a residue-side identity, or a domain error.
pub fn k0_contour(id: ConvolutionId, u: C64, v: C64, p: &EllipticParams) -> Result<f64> {
    if !id.is_k0() {
        return Err(Error::Invalid(format!("{id:?} is not a residue-side identity")));
    }
    let rho = p.shortest_period();
    let (a, b) = (u.norm(), v.norm());
    let hi = a.max(b);
    let lo = a.min(b);
    let gap = 1.02;
    let r = match k0_radius(id) {
        Radius::Between => {
            if a <= b * gap {
                return Err(Error::Domain(format!("need |v| < |u|, got |u| = {a}, |v| = {b}")));
            }
            (a * b).sqrt()
        }
        Radius::BetweenReversed => {
            if b <= a * gap {
                return Err(Error::Domain(format!("need |u| < |v|, got |u| = {a}, |v| = {b}")));
            }
            (a * b).sqrt()
        }
        Radius::Inside => {
            if lo <= 1e-6 {
                return Err(Error::Domain("u and v must stay away from the origin".into()));
            }
            0.5 * lo
        }
        Radius::Outside => {
            let far = rho - hi;
            if far <= hi * gap {
                return Err(Error::Domain(format!("no room for a circle outside |u|, |v| below the next period ({rho})")));
            }
            (hi * far).sqrt()
        }
    };
    if r >= (rho - hi) / gap {
        return Err(Error::Domain(format!("circle of radius {r} would enclose translated poles (shortest period {rho})")));
    }
    Ok(r)
}

/// Height of the horizontal segment for a cylinder identity, or a domain error.
pub fn cyl_contour(id: ConvolutionId, u: C64, v: C64, p: &EllipticParams) -> Result<f64> {
    let t = p.im_tau();
    let (a, b) = (u.im, v.im);
    let above = |x: f64| (x, x + t);
    let below = |x: f64| (x - t, x);
    let (i1, i2) = match id {
        ConvolutionId::CylPlusPlus | ConvolutionId::CylGG => (above(a), below(b)),
        ConvolutionId::CylPlusMinus | ConvolutionId::CylGGRight => (above(a), above(b)),
        ConvolutionId::CylMinusPlus | ConvolutionId::CylGGLeft => (below(a), below(b)),
        ConvolutionId::CylMinusMinus => (below(a), above(b)),
        _ => return Err(Error::Invalid(format!("{id:?} is not a cylinder identity"))),
    };
    let lo = i1.0.max(i2.0);
    let hi = i1.1.min(i2.1);
    let margin = 1e-2 * t;
    if hi - lo <= 2.0 * margin {
        return Err(Error::Domain(format!("no admissible segment height: band ({lo}, {hi}) is empty")));
    }
    let d = a - b;
    let rhs_ok = match id {
        ConvolutionId::CylPlusPlus | ConvolutionId::CylGG => d > -t && d < 0.0,
        ConvolutionId::CylMinusMinus => d > 0.0 && d < t,
        _ => true,
    };
    if !rhs_ok {
        return Err(Error::Domain(format!("Im(u-v) = {d} is outside the strip of the right-hand side")));
    }
    Ok(0.5 * (lo + hi))
}

fn gamma_rhs(w: C64, p: &EllipticParams) -> Result<C64> {
    let n = fourier_truncation(w.im, p, 1e-16);
    if w.im < 0.0 {
        if let Ok(sp) = StripPoint::lower(w, p) {
            return gamma_fourier(&sp, p, n);
        }
    }
    // γ is even; evaluate on whichever side the strip allows
    if let Ok(sp) = StripPoint::lower(-w, p) {
        return gamma_fourier(&sp, p, n);
    }
    Ok(gamma_series(w, p, n))
}

fn lhs(id: ConvolutionId, u: C64, v: C64, lambda: C64, p: &EllipticParams, m: usize) -> Result<C64> {
    use ConvolutionId::*;
    let integrand = move |z: C64| -> Result<C64> {
        match id {
            K0PlusPlus | K0PlusMinus | K0MinusMinus | K0MinusPlus | CylPlusPlus | CylPlusMinus | CylMinusPlus | CylMinusMinus => {
                Ok(g_lambda(u - z, lambda, p)? * g_lambda(z - v, lambda, p)?)
            }
            K0GG | CylGG => Ok(g0(u - z, p)? * g0(z - v, p)?),
            K0GGTransposed | CylGGRight => Ok(g0(u - z, p)? * g0(v - z, p)?),
            CylGGLeft => Ok(g0(z - u, p)? * g0(z - v, p)?),
        }
    };
    if id.is_k0() {
        circle_pairing(integrand, k0_contour(id, u, v, p)?, m)
    } else {
        segment_pairing(integrand, cyl_contour(id, u, v, p)?, m)
    }
}

fn rhs(id: ConvolutionId, u: C64, v: C64, lambda: C64, p: &EllipticParams) -> Result<C64> {
    use ConvolutionId::*;
    let w = u - v;
    let two_pi_i = 2.0 * PI * I;
    Ok(match id {
        K0PlusPlus => g_lambda(w, lambda, p)?,
        K0MinusMinus => -g_lambda(w, lambda, p)?,
        K0PlusMinus | K0MinusPlus | K0GGTransposed => C64::new(0.0, 0.0),
        K0GG => g0(w, p)?,
        CylPlusPlus => g_lambda(w, lambda, p)? - dlambda_g_lambda(w, lambda, p)? / two_pi_i,
        CylPlusMinus | CylMinusPlus => -dlambda_g_lambda(w, lambda, p)? / two_pi_i,
        CylMinusMinus => -g_lambda(w, lambda, p)? - dlambda_g_lambda(w, lambda, p)? / two_pi_i,
        CylGG => g0(w, p)? - gamma_rhs(w, p)? / (2.0 * two_pi_i),
        CylGGRight | CylGGLeft => gamma_rhs(w, p)? / (2.0 * two_pi_i),
    })
}

/// Quadrature of the left side minus the closed right side, with M nodes.
/// Fails if the quadrature changes by more than 1e−6 (relative) when M doubles.
pub fn convolution_residual(id: ConvolutionId, u: C64, v: C64, lambda: C64, p: &EllipticParams, m: usize) -> Result<C64> {
    if !id.is_k0() && id.needs_lambda() && lambda.im.abs() >= p.im_tau() {
        return Err(Error::Band(format!("|Im lambda| = {} must be below Im tau", lambda.im.abs())));
    }
    let q1 = lhs(id, u, v, lambda, p, m)?;
    let q2 = lhs(id, u, v, lambda, p, 2 * m)?;
    let drift = (q1 - q2).norm();
    if drift > 1e-6 * q1.norm().max(1.0) {
        return Err(Error::QuadratureUnstable(drift));
    }
    Ok(q1 - rhs(id, u, v, lambda, p)?)
}

/// ⟨G(u,z)⟩_z on a circle inside |u| (expected 0), or ⟨G(z,u)⟩_z on a circle
/// outside |u| (expected 1).
pub fn k0_mean(u: C64, outside: bool, p: &EllipticParams, m: usize) -> Result<C64> {
    let rho = p.shortest_period();
    let a = u.norm();
    if outside {
        let far = rho - a;
        if far <= a * 1.02 {
            return Err(Error::Domain(format!("no circle fits between |u| = {a} and the next period")));
        }
        circle_pairing(|z| g0(z - u, p), (a * far).sqrt(), m)
    } else {
        circle_pairing(|z| g0(u - z, p), 0.5 * a, m)
    }
}

/// ⟨𝒢(u−z)⟩_z, expected 1/2, on a segment inside the lower strip of u − z.
pub fn cyl_mean(u: C64, p: &EllipticParams, m: usize) -> Result<C64> {
    let h = u.im + 0.5 * p.im_tau();
    segment_pairing(|z| g0(u - z, p), h, m)
}
