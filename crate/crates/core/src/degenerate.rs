//! Rational and trigonometric degenerations: the limiting kernels, the
//! degenerate r-matrices, and convergence ladders of rescaled elliptic
//! kernels towards them.

use std::f64::consts::PI;

use crate::cnum::{C64, I};
use crate::error::{Error, PoleArg, Result};
use crate::green::kernels::{g0, g_lambda, POLE_MARGIN};
use crate::rmatrix::RMatrix4;
use crate::theta::{EllipticParams, MODULAR_THRESHOLD};

/// Margin for the μ analyticity zone.
pub const ZONE_MARGIN: f64 = 1e-3;

/// (μ, η) for the cylinder trigonometric case. Re η > 0 and μ strictly
/// inside the zone Im η Im μ / Re η < Re μ < Im η Im μ / Re η + 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigParams {
    mu: C64,
    eta: C64,
}

impl TrigParams {
    pub fn new(mu: C64, eta: C64) -> Result<Self> {
        if !(eta.re > 0.0) {
            return Err(Error::Domain(format!("Re eta must be positive, got {}", eta.re)));
        }
        let lo = eta.im * mu.im / eta.re;
        if !(mu.re > lo + ZONE_MARGIN && mu.re < lo + 1.0 - ZONE_MARGIN) {
            return Err(Error::Zone(format!(
                "Re mu = {} must lie in ({}, {}) with margin {ZONE_MARGIN:e}",
                mu.re,
                lo,
                lo + 1.0
            )));
        }
        Ok(Self { mu, eta })
    }

    pub fn mu(&self) -> C64 {
        self.mu
    }

    pub fn eta(&self) -> C64 {
        self.eta
    }

    /// Re(1/η), the height of the strips of the cylinder kernels.
    pub fn strip_height(&self) -> f64 {
        (1.0 / self.eta).re
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseId {
    A,
    B,
    C,
}

/// A point on a degeneration path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DegenerationCase {
    /// Both periods large: arguments scaled by 1/ω at fixed τ.
    Rational { omega: f64, tau: C64 },
    /// τ = iT with T large.
    Trig { t: f64 },
    /// ω large with τω = i/η fixed.
    TrigCyl { omega: f64, trig: TrigParams },
}

impl DegenerationCase {
    pub fn rational(omega: f64, tau: C64) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(Error::Domain(format!("omega must be positive, got {omega}")));
        }
        if !(tau.im > 0.0) {
            return Err(Error::InvalidModulus(tau.im));
        }
        Ok(Self::Rational { omega, tau })
    }

    pub fn trig(t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("T must be positive, got {t}")));
        }
        Ok(Self::Trig { t })
    }

    pub fn trig_cyl(omega: f64, trig: TrigParams) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(Error::Domain(format!("omega must be positive, got {omega}")));
        }
        Ok(Self::TrigCyl { omega, trig })
    }

    pub fn case_id(&self) -> CaseId {
        match self {
            Self::Rational { .. } => CaseId::A,
            Self::Trig { .. } => CaseId::B,
            Self::TrigCyl { .. } => CaseId::C,
        }
    }

    /// Modulus of the elliptic curve at this point of the path.
    pub fn params(&self) -> Result<EllipticParams> {
        match *self {
            Self::Rational { tau, .. } => EllipticParams::new(tau),
            Self::Trig { t } => EllipticParams::from_parts(0.0, t),
            Self::TrigCyl { omega, trig } => EllipticParams::new(I / (trig.eta * omega)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DegenerateKernelId {
    PhiPlus,
    PhiMinus,
    PsiTrig,
    PsiTildePlus,
    PsiTildeMinus,
    PsiCth,
    PsiMuPlus,
    PsiMuMinus,
}

impl DegenerateKernelId {
    pub fn name(self) -> &'static str {
        match self {
            Self::PhiPlus => "PHI_PLUS",
            Self::PhiMinus => "PHI_MINUS",
            Self::PsiTrig => "PSI_TRIG",
            Self::PsiTildePlus => "PSI_TILDE_PLUS",
            Self::PsiTildeMinus => "PSI_TILDE_MINUS",
            Self::PsiCth => "PSI_CTH",
            Self::PsiMuPlus => "PSI_MU_PLUS",
            Self::PsiMuMinus => "PSI_MU_MINUS",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegenerateKernelValue {
    pub value: C64,
    pub kernel_id: DegenerateKernelId,
}

fn pole_check(d: f64) -> Result<()> {
    if d <= POLE_MARGIN {
        return Err(Error::NearPole { arg: PoleArg::W, distance: d, margin: POLE_MARGIN });
    }
    Ok(())
}

/// π ctg πw
pub fn pi_ctg(w: C64) -> Result<C64> {
    pole_check((w - C64::new(w.re.round(), 0.0)).norm())?;
    Ok(PI / (PI * w).tan())
}

/// 1/w
pub fn phi(w: C64) -> Result<C64> {
    pole_check(w.norm())?;
    Ok(1.0 / w)
}

/// Distance of w from the pole set (i/η)ℤ.
fn cyl_pole_distance(w: C64, eta: C64) -> f64 {
    let step = I / eta;
    let n = (w / step).re.round();
    (w - step * n).norm()
}

/// πη cth πηw
pub fn psi_cth(w: C64, eta: C64) -> Result<C64> {
    pole_check(cyl_pole_distance(w, eta))?;
    Ok(PI * eta / (PI * eta * w).tanh())
}

/// 2πη e^{−2πημw}/(1 − e^{−2πηw}), arranged so no exponential overflows.
pub fn psi_mu(w: C64, mu: C64, eta: C64) -> Result<C64> {
    pole_check(cyl_pole_distance(w, eta))?;
    let x = 2.0 * PI * eta * w;
    let v = if x.re >= 0.0 { (-mu * x).exp() / (1.0 - (-x).exp()) } else { ((1.0 - mu) * x).exp() / (x.exp() - 1.0) };
    Ok(2.0 * PI * eta * v)
}

fn need_trig(extra: Option<TrigParams>) -> Result<TrigParams> {
    extra.ok_or_else(|| Error::Invalid("this kernel needs (mu, eta)".into()))
}

fn strip_check(w: C64, lower: bool, height: Option<f64>) -> Result<()> {
    let (lo, hi) = match (lower, height) {
        (true, Some(h)) => (-h * (1.0 - ZONE_MARGIN), -h * ZONE_MARGIN),
        (false, Some(h)) => (h * ZONE_MARGIN, h * (1.0 - ZONE_MARGIN)),
        (true, None) => (f64::NEG_INFINITY, -1e-12),
        (false, None) => (1e-12, f64::INFINITY),
    };
    if w.im > lo && w.im < hi {
        Ok(())
    } else {
        Err(Error::Strip(format!("Im w = {} must lie in ({lo}, {hi})", w.im)))
    }
}

/// Closed form of a degenerate kernel. The ± variants share their closed
/// forms and differ only in the half-plane or strip they accept.
pub fn degenerate_kernel(kernel_id: DegenerateKernelId, w: C64, extra: Option<TrigParams>) -> Result<DegenerateKernelValue> {
    use DegenerateKernelId::*;
    let value = match kernel_id {
        PhiPlus => {
            strip_check(w, true, None)?;
            phi(w)?
        }
        PhiMinus => {
            strip_check(w, false, None)?;
            phi(w)?
        }
        PsiTrig => pi_ctg(w)?,
        PsiTildePlus => {
            strip_check(w, true, None)?;
            pi_ctg(w)?
        }
        PsiTildeMinus => {
            strip_check(w, false, None)?;
            pi_ctg(w)?
        }
        PsiCth => {
            let t = need_trig(extra)?;
            strip_check(w, true, Some(t.strip_height()))?;
            psi_cth(w, t.eta)?
        }
        PsiMuPlus => {
            let t = need_trig(extra)?;
            strip_check(w, true, Some(t.strip_height()))?;
            psi_mu(w, t.mu, t.eta)?
        }
        PsiMuMinus => {
            let t = need_trig(extra)?;
            strip_check(w, false, Some(t.strip_height()))?;
            psi_mu(w, t.mu, t.eta)?
        }
    };
    Ok(DegenerateKernelValue { value, kernel_id })
}

/// ψ̃^±(w) through its geometric series with `n` terms:
/// ±(πi + 2πi Σ_{k=1}^{n} e^{∓2πikw}) for the respective half-plane.
pub fn psi_tilde_series(w: C64, plus: bool, n: usize) -> C64 {
    let s = if plus { 1.0 } else { -1.0 };
    let ratio = (-2.0 * PI * I * w * s).exp();
    let mut term = C64::new(1.0, 0.0);
    let mut acc = C64::new(0.0, 0.0);
    for _ in 0..n {
        term *= ratio;
        acc += term;
    }
    (PI * I + 2.0 * PI * I * acc) * s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DegenerateKind {
    /// 𝒦₀ rational matrix, |u| > |v|
    RaK0,
    /// 𝒦₀ trigonometric matrix, |u| > |v|
    RbK0,
    /// cylinder rational matrix with Φ⁺, Im u < Im v
    RaCyl,
    /// cylinder trigonometric matrix with ψ̃⁺, Im u < Im v
    RbCyl,
    /// cylinder trigonometric matrix with cth and Ψμ±
    RcCyl,
    /// RaCyl with Φ⁻, Im u > Im v
    RaCylMinus,
    /// RbCyl with ψ̃⁻, Im u > Im v
    RbCylMinus,
}

impl DegenerateKind {
    pub const FIVE: [DegenerateKind; 5] =
        [DegenerateKind::RaK0, DegenerateKind::RbK0, DegenerateKind::RaCyl, DegenerateKind::RbCyl, DegenerateKind::RcCyl];

    pub fn name(self) -> &'static str {
        match self {
            Self::RaK0 => "R_A_K0",
            Self::RbK0 => "R_B_K0",
            Self::RaCyl => "R_A_CYL",
            Self::RbCyl => "R_B_CYL",
            Self::RcCyl => "R_C_CYL",
            Self::RaCylMinus => "R_A_CYL_MINUS",
            Self::RbCylMinus => "R_B_CYL_MINUS",
        }
    }
}

fn annulus_check(u: C64, v: C64, bound: f64) -> Result<()> {
    let (a, b) = (u.norm(), v.norm());
    if a >= bound || b >= bound || a <= b * (1.0 + 1e-3) {
        return Err(Error::Domain(format!("need {bound} > |u| > |v|, got |u| = {a}, |v| = {b}")));
    }
    Ok(())
}

fn with_diag(d: C64, e23: C64, e32: C64) -> RMatrix4 {
    let a = d * 0.5;
    RMatrix4::weight_zero([a, -a, -a, a], e23, e32)
}

/// One of the degenerate r-matrices at (u, v).
pub fn build_degenerate_r(kind: DegenerateKind, u: C64, v: C64, extra: Option<TrigParams>) -> Result<RMatrix4> {
    use DegenerateKernelId as K;
    let w = u - v;
    let pi_i = PI * I;
    Ok(match kind {
        DegenerateKind::RaK0 => {
            annulus_check(u, v, f64::INFINITY)?;
            let f = phi(w)?;
            with_diag(f, f, f)
        }
        DegenerateKind::RbK0 => {
            annulus_check(u, v, 1.0)?;
            let f = pi_ctg(w)?;
            with_diag(f, f - pi_i, f + pi_i)
        }
        DegenerateKind::RaCyl | DegenerateKind::RaCylMinus => {
            let id = if kind == DegenerateKind::RaCyl { K::PhiPlus } else { K::PhiMinus };
            let f = degenerate_kernel(id, w, None)?.value;
            with_diag(f, f, f)
        }
        DegenerateKind::RbCyl | DegenerateKind::RbCylMinus => {
            let id = if kind == DegenerateKind::RbCyl { K::PsiTildePlus } else { K::PsiTildeMinus };
            let f = degenerate_kernel(id, w, None)?.value;
            with_diag(f, f - pi_i, f + pi_i)
        }
        DegenerateKind::RcCyl => {
            let d = degenerate_kernel(K::PsiCth, w, extra)?.value;
            let e23 = -degenerate_kernel(K::PsiMuMinus, -w, extra)?.value;
            let e32 = degenerate_kernel(K::PsiMuPlus, w, extra)?.value;
            with_diag(d, e23, e32)
        }
    })
}

/// |−Ψμ⁻(v−u) − Ψ⁺_{1−μ}(u−v)|: the two readings of the (2,3) entry of the
/// cylinder trigonometric matrix.
pub fn rc_entry_defect(u: C64, v: C64, t: TrigParams) -> Result<f64> {
    let a = -psi_mu(v - u, t.mu, t.eta)?;
    let b = psi_mu(u - v, 1.0 - t.mu, t.eta)?;
    Ok((a - b).norm())
}

/// Rational dynamical matrix: φ on the diagonal, ∓1/λ + φ off it.
pub fn rational_dynamical_r(u: C64, v: C64, lambda: C64) -> Result<RMatrix4> {
    annulus_check(u, v, f64::INFINITY)?;
    if lambda.norm() <= POLE_MARGIN {
        return Err(Error::NearPole { arg: PoleArg::Lambda, distance: lambda.norm(), margin: POLE_MARGIN });
    }
    let f = phi(u - v)?;
    Ok(with_diag(f, f - 1.0 / lambda, f + 1.0 / lambda))
}

/// Which rescaled elliptic kernel to follow along a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitKernel {
    /// θ′/θ; limit 1/w (A), π ctg πw (B), πη cth πηw (C).
    G0,
    /// θ(w+λ)/(θ(w)θ(λ)); limit 1/λ + 1/w (A) or π ctg πλ + π ctg πw (B).
    GLambda(C64),
    /// g_μ on the cylinder path; limit Ψμ⁺ (C only).
    PsiMu,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitError {
    pub kernel_id: DegenerateKernelId,
    pub max_error: f64,
    /// True when theta went through the modular transformation.
    pub modular: bool,
}

/// Max over samples of |rescaled elliptic kernel − degenerate kernel|.
pub fn limit_error(case: &DegenerationCase, kernel: LimitKernel, samples: &[C64]) -> Result<LimitError> {
    if samples.is_empty() {
        return Err(Error::Domain("no sample points".into()));
    }
    let p = case.params()?;
    let modular = p.im_tau() < MODULAR_THRESHOLD;
    let mut worst = 0.0f64;
    let mut id = DegenerateKernelId::PsiTrig;
    for &w in samples {
        let (err, kid) = match (*case, kernel) {
            (DegenerationCase::Rational { omega, .. }, LimitKernel::G0) => ((g0(w / omega, &p)? / omega - phi(w)?).norm(), DegenerateKernelId::PhiPlus),
            (DegenerationCase::Rational { omega, .. }, LimitKernel::GLambda(l)) => (
                (g_lambda(w / omega, l / omega, &p)? / omega - (1.0 / l + phi(w)?)).norm(),
                DegenerateKernelId::PhiPlus,
            ),
            (DegenerationCase::Trig { .. }, LimitKernel::G0) => ((g0(w, &p)? - pi_ctg(w)?).norm(), DegenerateKernelId::PsiTrig),
            (DegenerationCase::Trig { .. }, LimitKernel::GLambda(l)) => {
                ((g_lambda(w, l, &p)? - (pi_ctg(l)? + pi_ctg(w)?)).norm(), DegenerateKernelId::PsiTrig)
            }
            (DegenerationCase::TrigCyl { omega, trig }, LimitKernel::G0) => {
                let target = degenerate_kernel(DegenerateKernelId::PsiCth, w, Some(trig))?.value;
                ((g0(w / omega, &p)? / omega - target).norm(), DegenerateKernelId::PsiCth)
            }
            (DegenerationCase::TrigCyl { omega, trig }, LimitKernel::PsiMu) => {
                let target = degenerate_kernel(DegenerateKernelId::PsiMuPlus, w, Some(trig))?.value;
                ((g_lambda(w / omega, trig.mu, &p)? / omega - target).norm(), DegenerateKernelId::PsiMuPlus)
            }
            (c, k) => return Err(Error::Invalid(format!("kernel {k:?} has no limit along case {:?}", c.case_id()))),
        };
        worst = worst.max(err);
        id = kid;
    }
    Ok(LimitError { kernel_id: id, max_error: worst, modular })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderRow {
    pub scale: f64,
    pub kernel_id: DegenerateKernelId,
    pub max_error: f64,
    /// Least-squares rate over the whole ladder: log-log slope for A and C,
    /// log-linear slope in T for B.
    pub fitted_rate: f64,
    pub modular: bool,
}

/// Fixed data of a ladder besides the scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderBase {
    pub tau: C64,
    pub trig: Option<TrigParams>,
}

impl Default for LadderBase {
    fn default() -> Self {
        Self { tau: I, trig: None }
    }
}

pub fn default_samples(case: CaseId) -> Vec<C64> {
    match case {
        CaseId::A => vec![C64::new(0.5, 0.0), C64::new(0.3, 0.2), C64::new(-0.4, 0.1)],
        CaseId::B => vec![C64::new(0.3, -0.1), C64::new(0.2, 0.15), C64::new(-0.35, -0.05)],
        CaseId::C => vec![C64::new(0.2, -0.2), C64::new(-0.3, -0.4), C64::new(0.1, -0.6)],
    }
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Errors along a strictly increasing ladder of scales (ω for A and C, T for B).
pub fn degeneration_ladder(case: CaseId, scales: &[f64], kernel: LimitKernel, samples: &[C64], base: LadderBase) -> Result<Vec<LadderRow>> {
    if scales.len() < 2 {
        return Err(Error::Domain("a ladder needs at least two scales".into()));
    }
    if scales.windows(2).any(|w| !(w[1] > w[0])) || !(scales[0] > 0.0) {
        return Err(Error::Domain("scales must be positive and strictly increasing".into()));
    }
    let mut rows = Vec::with_capacity(scales.len());
    for &s in scales {
        let c = match case {
            CaseId::A => DegenerationCase::rational(s, base.tau)?,
            CaseId::B => DegenerationCase::trig(s)?,
            CaseId::C => DegenerationCase::trig_cyl(s, base.trig.ok_or_else(|| Error::Invalid("case c needs (mu, eta)".into()))?)?,
        };
        let e = limit_error(&c, kernel, samples)?;
        rows.push(LadderRow { scale: s, kernel_id: e.kernel_id, max_error: e.max_error, fitted_rate: f64::NAN, modular: e.modular });
    }
    let xs: Vec<f64> = match case {
        CaseId::B => scales.to_vec(),
        _ => scales.iter().map(|s| s.ln()).collect(),
    };
    let ys: Vec<f64> = rows.iter().map(|r| r.max_error.max(f64::MIN_POSITIVE).ln()).collect();
    let rate = slope(&xs, &ys);
    for r in &mut rows {
        r.fitted_rate = rate;
    }
    Ok(rows)
}

/// Strictly decreasing errors, except that entries already below `floor`
/// count as converged.
pub fn is_monotone_decreasing(rows: &[LadderRow], floor: f64) -> bool {
    rows.windows(2).all(|w| w[1].max_error < w[0].max_error || w[1].max_error < floor)
}
