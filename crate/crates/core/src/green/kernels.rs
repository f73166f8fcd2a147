//! Closed-form elliptic kernels θ′/θ and θ(w+λ)/(θ(w)θ(λ)) with their
//! derivatives, plus the domain tags that say which Green distribution a
//! kernel value stands for.

use std::f64::consts::PI;

use crate::cnum::{C64, I};
use crate::error::{Error, PoleArg, Result};
use crate::theta::{theta_derivs, EllipticParams, ThetaDerivs};

pub const POLE_MARGIN: f64 = 1e-6;
/// Strip margin as a fraction of Im τ.
pub const STRIP_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strip {
    /// −Im τ < Im w < 0
    Lower,
    /// 0 < Im w < Im τ
    Upper,
    None,
}

/// A difference argument w = u − z tagged with the strip it lives in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripPoint {
    w: C64,
    strip: Strip,
}

impl StripPoint {
    pub fn new(w: C64, strip: Strip, p: &EllipticParams) -> Result<Self> {
        let t = p.im_tau();
        let m = STRIP_MARGIN * t;
        let ok = match strip {
            Strip::Lower => w.im > -t + m && w.im < -m,
            Strip::Upper => w.im > m && w.im < t - m,
            Strip::None => true,
        };
        if !ok {
            return Err(Error::Strip(format!(
                "Im w = {} is not inside the {strip:?} strip of height {t} with margin {m:e}",
                w.im
            )));
        }
        Ok(Self { w, strip })
    }

    pub fn lower(w: C64, p: &EllipticParams) -> Result<Self> {
        Self::new(w, Strip::Lower, p)
    }

    pub fn upper(w: C64, p: &EllipticParams) -> Result<Self> {
        Self::new(w, Strip::Upper, p)
    }

    pub fn w(&self) -> C64 {
        self.w
    }

    pub fn strip(&self) -> Strip {
        self.strip
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnnulusOrder {
    /// |u| > |z|
    Outer,
    /// |u| < |z|
    Inner,
}

/// A pair (u, z) for the residue-pairing family, both inside the disc
/// |·| < min(1, |τ|) and ordered by modulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusPair {
    u: C64,
    z: C64,
    order: AnnulusOrder,
}

impl AnnulusPair {
    pub fn new(u: C64, z: C64, order: AnnulusOrder, p: &EllipticParams) -> Result<Self> {
        let r = p.tau().norm().min(1.0);
        let (a, b) = (u.norm(), z.norm());
        if a >= r || b >= r {
            return Err(Error::Domain(format!("|u| = {a}, |z| = {b} must stay below min(1, |tau|) = {r}")));
        }
        let ok = match order {
            AnnulusOrder::Outer => a > b * (1.0 + 1e-3),
            AnnulusOrder::Inner => b > a * (1.0 + 1e-3),
        };
        if !ok {
            return Err(Error::Domain(format!("|u| = {a} and |z| = {b} violate {order:?} ordering")));
        }
        Ok(Self { u, z, order })
    }

    pub fn u(&self) -> C64 {
        self.u
    }

    pub fn z(&self) -> C64 {
        self.z
    }

    pub fn order(&self) -> AnnulusOrder {
        self.order
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelId {
    G0,
    GLambda,
    DLambdaGLambda,
    Gamma,
}

/// A kernel value together with what produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: C64,
    pub kernel_id: KernelId,
    pub lambda: Option<C64>,
    pub tau: C64,
}

fn check_pole(x: C64, arg: PoleArg, p: &EllipticParams) -> Result<()> {
    let d = p.lattice_distance(x);
    if d <= POLE_MARGIN {
        return Err(Error::NearPole { arg, distance: d, margin: POLE_MARGIN });
    }
    Ok(())
}

/// θ′(w)/θ(w).
pub fn g0(w: C64, p: &EllipticParams) -> Result<C64> {
    check_pole(w, PoleArg::W, p)?;
    let t = theta_derivs(w, p)?;
    Ok(t.d1 / t.d0)
}

/// d/dw of θ′/θ.
pub fn dw_g0(w: C64, p: &EllipticParams) -> Result<C64> {
    check_pole(w, PoleArg::W, p)?;
    let t = theta_derivs(w, p)?;
    Ok(t.d2 / t.d0 - (t.d1 / t.d0).powi(2))
}

struct Triple {
    a: ThetaDerivs,
    b: ThetaDerivs,
    c: ThetaDerivs,
}

fn triple(w: C64, lambda: C64, p: &EllipticParams) -> Result<Triple> {
    check_pole(w, PoleArg::W, p)?;
    check_pole(lambda, PoleArg::Lambda, p)?;
    Ok(Triple { a: theta_derivs(w + lambda, p)?, b: theta_derivs(w, p)?, c: theta_derivs(lambda, p)? })
}

/// θ(w+λ)/(θ(w)θ(λ)).
pub fn g_lambda(w: C64, lambda: C64, p: &EllipticParams) -> Result<C64> {
    let t = triple(w, lambda, p)?;
    Ok(t.a.d0 / (t.b.d0 * t.c.d0))
}

/// ∂λ of g_lambda by the quotient rule.
pub fn dlambda_g_lambda(w: C64, lambda: C64, p: &EllipticParams) -> Result<C64> {
    let t = triple(w, lambda, p)?;
    Ok((t.a.d1 * t.c.d0 - t.a.d0 * t.c.d1) / (t.b.d0 * t.c.d0 * t.c.d0))
}

/// ∂w of g_lambda.
pub fn dw_g_lambda(w: C64, lambda: C64, p: &EllipticParams) -> Result<C64> {
    let t = triple(w, lambda, p)?;
    Ok((t.a.d1 * t.b.d0 - t.a.d0 * t.b.d1) / (t.b.d0 * t.b.d0 * t.c.d0))
}

/// ∂w∂λ of g_lambda.
pub fn dw_dlambda_g_lambda(w: C64, lambda: C64, p: &EllipticParams) -> Result<C64> {
    let t = triple(w, lambda, p)?;
    let (a, a1, a2) = (t.a.d0, t.a.d1, t.a.d2);
    let (b, b1) = (t.b.d0, t.b.d1);
    let (c, c1) = (t.c.d0, t.c.d1);
    Ok(a2 / (b * c) - a1 * b1 / (b * b * c) - a1 * c1 / (b * c * c) + a * b1 * c1 / (b * b * c * c))
}

/// θ″(w)/θ(w) − (θ‴(0) + 4π²)/3, the closed form of γ.
pub fn gamma_closed(w: C64, p: &EllipticParams) -> Result<C64> {
    check_pole(w, PoleArg::W, p)?;
    let t = theta_derivs(w, p)?;
    let z = theta_derivs(C64::new(0.0, 0.0), p)?;
    Ok(t.d2 / t.d0 - (z.d3 + 4.0 * PI * PI) / 3.0)
}

/// ∂w γ = θ‴/θ − θ″θ′/θ².
pub fn dw_gamma(w: C64, p: &EllipticParams) -> Result<C64> {
    check_pole(w, PoleArg::W, p)?;
    let t = theta_derivs(w, p)?;
    Ok(t.d3 / t.d0 - t.d2 * t.d1 / (t.d0 * t.d0))
}

/// Evaluate one of the closed kernels by id.
pub fn evaluate(kernel_id: KernelId, w: C64, lambda: Option<C64>, p: &EllipticParams) -> Result<KernelValue> {
    let need = || Error::Invalid(format!("{kernel_id:?} needs lambda"));
    let value = match kernel_id {
        KernelId::G0 => g0(w, p)?,
        KernelId::GLambda => g_lambda(w, lambda.ok_or_else(need)?, p)?,
        KernelId::DLambdaGLambda => dlambda_g_lambda(w, lambda.ok_or_else(need)?, p)?,
        KernelId::Gamma => gamma_closed(w, p)?,
    };
    Ok(KernelValue { value, kernel_id, lambda, tau: p.tau() })
}

/// g_lambda(w − kτ, λ) / g_lambda(w, λ) should be e^{2πikλ}.
pub fn shift_residual(w: C64, lambda: C64, k: i32, p: &EllipticParams) -> Result<f64> {
    let base = g_lambda(w, lambda, p)?;
    let shifted = g_lambda(w - p.tau() * k as f64, lambda, p)?;
    let expect = (2.0 * PI * I * lambda * k as f64).exp() * base;
    Ok((shifted - expect).norm() / expect.norm().max(1.0))
}

/// The degenerate Fay identity, left side minus right side.
pub fn fay_residual(u: C64, z: C64, lambda: C64, p: &EllipticParams) -> Result<C64> {
    let lhs = g_lambda(u - z, lambda, p)? * g_lambda(z, lambda, p)?;
    let gu = g_lambda(u, lambda, p)?;
    let rhs = gu * g0(u - z, p)? + gu * g0(z, p)? - dlambda_g_lambda(u, lambda, p)?;
    Ok(lhs - rhs)
}
