//! Principal-value lattice sums that rebuild elliptic kernels from
//! cotangents and trigonometric kernels from 1/u, scalar and matrix-valued.

use std::f64::consts::PI;

use crate::cnum::{C64, I};
use crate::degenerate::{build_degenerate_r, psi_tilde_series, DegenerateKind, TrigParams};
use crate::error::{Error, Result};
use crate::green::kernels::POLE_MARGIN;
use crate::rmatrix::{build_r, RMatrix4};
use crate::theta::EllipticParams;

const ZERO: C64 = C64::new(0.0, 0.0);
/// Cap for the rational-to-trigonometric default truncation.
pub const MAX_RATIONAL_N: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TailMode {
    /// Σ_{n=−N}^{N} term by term.
    Plain,
    /// n and −n combined first, with the ±πi limits cancelled analytically.
    Paired,
    /// Σ_{n=0}^{N} only; not a principal value and not convergent.
    OneSided,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragingConfig {
    pub n: usize,
    pub tail_mode: TailMode,
    /// Add the analytic tail Σ_{|n|>N} to the rational-to-trigonometric sums.
    pub tail_correction: bool,
}

impl AveragingConfig {
    pub fn new(n: usize, tail_mode: TailMode) -> Self {
        Self { n, tail_mode, tail_correction: false }
    }

    pub fn with_tail_correction(mut self, on: bool) -> Self {
        self.tail_correction = on;
        self
    }
}

/// Truncation for a geometric tail e^{−2πn·margin} below `tol`, after an
/// offset `shift` in the exponent.
pub fn elliptic_n_for(tol: f64, margin: f64, shift: f64) -> Result<usize> {
    if !(margin > 0.0) {
        return Err(Error::Band(format!("decay margin {margin} must be positive")));
    }
    Ok((((1.0 / tol).ln() + 2.0 * PI * shift.abs()) / (2.0 * PI * margin)).ceil().max(1.0) as usize + 2)
}

/// ceil(10/tol), capped.
pub fn rational_n_for(tol: f64) -> usize {
    ((10.0 / tol).ceil() as usize).min(MAX_RATIONAL_N)
}

fn check_band(lambda: C64, p: &EllipticParams) -> Result<()> {
    let t = p.im_tau();
    if !(lambda.im < 0.0 && lambda.im > -t) {
        return Err(Error::Band(format!("need -Im tau < Im lambda < 0, got Im lambda = {} with Im tau = {t}", lambda.im)));
    }
    if (lambda - C64::new(lambda.re.round(), 0.0)).norm() <= POLE_MARGIN {
        return Err(Error::Band("lambda must stay off the integers".into()));
    }
    Ok(())
}

fn ctg_arg(u: C64, n: i64, p: &EllipticParams) -> Result<C64> {
    let z = PI * (u - p.tau() * n as f64);
    let x = z / PI;
    if (x - C64::new(x.re.round(), 0.0)).norm() <= POLE_MARGIN {
        return Err(Error::NearPole { arg: crate::error::PoleArg::W, distance: (x - C64::new(x.re.round(), 0.0)).norm(), margin: POLE_MARGIN });
    }
    Ok(z)
}

/// ctg z − i, stable for Im z < 0.
fn ctg_minus_i(z: C64) -> C64 {
    if z.im < 0.0 {
        2.0 * I / ((2.0 * I * z).exp() - 1.0)
    } else {
        1.0 / z.tan() - I
    }
}

/// ctg z + i, stable for Im z > 0.
fn ctg_plus_i(z: C64) -> C64 {
    if z.im > 0.0 {
        2.0 * I / (1.0 - (-2.0 * I * z).exp())
    } else {
        1.0 / z.tan() + I
    }
}

/// v.p. Σ π ctg π(u − nτ), the lattice average giving θ′/θ.
pub fn vp_ctg_sum(u: C64, p: &EllipticParams, cfg: &AveragingConfig) -> Result<C64> {
    let n = cfg.n as i64;
    let mut acc = PI / ctg_arg(u, 0, p)?.tan();
    match cfg.tail_mode {
        TailMode::Plain => {
            for k in 1..=n {
                acc += PI / ctg_arg(u, k, p)?.tan() + PI / ctg_arg(u, -k, p)?.tan();
            }
        }
        TailMode::Paired => {
            for k in 1..=n {
                // Im of the n > 0 argument goes to −∞, of n < 0 to +∞
                let a = ctg_arg(u, k, p)?;
                let b = ctg_arg(u, -k, p)?;
                acc += PI * (ctg_minus_i(a) + ctg_plus_i(b));
            }
        }
        TailMode::OneSided => {
            for k in 1..=n {
                acc += PI / ctg_arg(u, k, p)?.tan();
            }
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LambdaSign {
    /// Σ π e^{−2πinλ}(ctg π(u−nτ) + i) → θ(u+λ)/(θ(u)θ(λ))
    Plus,
    /// Σ π e^{2πinλ}(ctg π(u−nτ) − i) → θ(u−λ)/(θ(u)θ(−λ))
    Minus,
}

fn glambda_term(u: C64, lambda: C64, k: i64, sign: LambdaSign, p: &EllipticParams) -> Result<C64> {
    let z = ctg_arg(u, k, p)?;
    Ok(match sign {
        LambdaSign::Plus => {
            let c = if k < 0 { ctg_plus_i(z) } else { 1.0 / z.tan() + I };
            PI * (-2.0 * PI * I * lambda * k as f64).exp() * c
        }
        LambdaSign::Minus => {
            let c = if k > 0 { ctg_minus_i(z) } else { 1.0 / z.tan() - I };
            PI * (2.0 * PI * I * lambda * k as f64).exp() * c
        }
    })
}

/// v.p. partial sum for the twisted kernels, valid for −Im τ < Im λ < 0.
pub fn vp_glambda_sum(u: C64, lambda: C64, sign: LambdaSign, p: &EllipticParams, cfg: &AveragingConfig) -> Result<C64> {
    check_band(lambda, p)?;
    let n = cfg.n as i64;
    let lo = if cfg.tail_mode == TailMode::OneSided { 0 } else { -n };
    let mut acc = ZERO;
    if cfg.tail_mode == TailMode::Paired {
        acc += glambda_term(u, lambda, 0, sign, p)?;
        for k in 1..=n {
            acc += glambda_term(u, lambda, k, sign, p)? + glambda_term(u, lambda, -k, sign, p)?;
        }
        return Ok(acc);
    }
    for k in lo..=n {
        acc += glambda_term(u, lambda, k, sign, p)?;
    }
    Ok(acc)
}

/// Which trigonometric matrix enters at lattice step n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThetaPolicy {
    /// ψ̃⁺ for n ≥ 0, ψ̃⁻ for n < 0
    Switched,
    /// ψ̃⁺ for every n
    AlwaysPlus,
}

/// How ψ̃^± is evaluated: closed π ctg, or its geometric series with K
/// terms (which only converges in its own half-plane).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrigRepresentation {
    Closed,
    Series(usize),
}

/// Σ_{|n|≤N} (Aⁿ⊗id) 𝔯^{(b),ϑₙ}(u − nτ) with A: E ↦ e^{2πiλ}E, F ↦ e^{−2πiλ}F.
pub fn average_rmatrix_elliptic(u: C64, lambda: C64, p: &EllipticParams, cfg: &AveragingConfig) -> Result<RMatrix4> {
    average_rmatrix_elliptic_with(u, lambda, p, cfg, ThetaPolicy::Switched, TrigRepresentation::Closed)
}

pub fn average_rmatrix_elliptic_with(
    u: C64,
    lambda: C64,
    p: &EllipticParams,
    cfg: &AveragingConfig,
    policy: ThetaPolicy,
    repr: TrigRepresentation,
) -> Result<RMatrix4> {
    check_band(lambda, p)?;
    if let TrigRepresentation::Closed = repr {
        // closed forms coincide for both ϑ; reuse the stable scalar sums
        let d = vp_ctg_sum(u, p, cfg)? * 0.5;
        let e23 = vp_glambda_sum(u, lambda, LambdaSign::Minus, p, cfg)?;
        let e32 = vp_glambda_sum(u, lambda, LambdaSign::Plus, p, cfg)?;
        return Ok(RMatrix4::weight_zero([d, -d, -d, d], e23, e32));
    }
    let TrigRepresentation::Series(terms) = repr else { unreachable!() };
    let n = cfg.n as i64;
    let lo = if cfg.tail_mode == TailMode::OneSided { 0 } else { -n };
    let (mut d, mut e23, mut e32) = (ZERO, ZERO, ZERO);
    for k in lo..=n {
        let x = u - p.tau() * k as f64;
        let plus = match policy {
            ThetaPolicy::Switched => k >= 0,
            ThetaPolicy::AlwaysPlus => true,
        };
        let psi = psi_tilde_series(x, plus, terms);
        let twist = (2.0 * PI * I * lambda * k as f64).exp();
        d += psi;
        e23 += twist * (psi - PI * I);
        e32 += (psi + PI * I) / twist;
    }
    let d = d * 0.5;
    Ok(RMatrix4::weight_zero([d, -d, -d, d], e23, e32))
}

/// Largest entrywise deviation from the elliptic r-matrix at (u, 0).
pub fn rmatrix_elliptic_residual(u: C64, lambda: C64, p: &EllipticParams, cfg: &AveragingConfig) -> Result<f64> {
    let avg = average_rmatrix_elliptic(u, lambda, p, cfg)?;
    let exact = build_r(u, ZERO, lambda, p)?;
    Ok((avg.matrix() - exact.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

fn check_real_mu(t: &TrigParams) -> Result<()> {
    if t.mu().im != 0.0 {
        return Err(Error::Zone(format!(
            "the lattice sum over e^(2 pi i mu n) only converges for real mu, got Im mu = {}",
            t.mu().im
        )));
    }
    Ok(())
}

/// 2πη e^{2πημu}/(e^{2πηu} − 1), arranged so no exponential overflows.
pub fn rational_to_trig_target(u: C64, mu: C64, eta: C64) -> C64 {
    let x = 2.0 * PI * eta * u;
    let v = if x.re <= 0.0 { (mu * x).exp() / (x.exp() - 1.0) } else { ((mu - 1.0) * x).exp() / (1.0 - (-x).exp()) };
    2.0 * PI * eta * v
}

/// Σ_{n≥m} zⁿ·coef/(n + c) via Euler's transform, z ≠ 1:
/// z^m Σ_k Δᵏf(m) zᵏ/(1−z)^{k+1} with Δᵏ[1/(n+c)] = (−1)ᵏk!/∏_{j≤k}(n+c+j).
fn euler_tail(z: C64, coef: C64, c: C64, m: usize) -> C64 {
    let one_minus = 1.0 - z;
    let mut acc = ZERO;
    let mut delta = coef / (c + m as f64);
    let mut geo = 1.0 / one_minus;
    let mut last = f64::INFINITY;
    for k in 0..40 {
        let term = delta * geo;
        if term.norm() > last {
            break;
        }
        acc += term;
        last = term.norm();
        if last < 1e-18 * acc.norm() {
            break;
        }
        delta *= -((k + 1) as f64) / (c + (m + k + 1) as f64);
        geo *= z / one_minus;
    }
    acc * z.powf(m as f64)
}

/// Σ_{n≥m} iη[1/(n+a) − 1/(n−a)] by Euler–Maclaurin.
fn diagonal_tail(eta: C64, a: C64, m: usize) -> C64 {
    let x = m as f64;
    let h = |k: u32| -> C64 {
        let mut f = 1.0;
        for j in 1..=k {
            f *= -(j as f64);
        }
        I * eta * f * (1.0 / (x + a).powu(k + 1) - 1.0 / (x - a).powu(k + 1))
    };
    let integral = I * eta * ((x - a) / (x + a)).ln();
    integral + h(0) * 0.5 - h(1) / 12.0 + h(3) / 720.0 - h(5) / 30240.0
}

fn rational_term(u: C64, n: i64, eta: C64) -> Result<C64> {
    let d = u - I * n as f64 / eta;
    if d.norm() <= POLE_MARGIN {
        return Err(Error::NearPole { arg: crate::error::PoleArg::W, distance: d.norm(), margin: POLE_MARGIN });
    }
    Ok(1.0 / d)
}

/// Σ_{|n|≤N} e^{2πiσμn}/(u − iη⁻¹n) with σ = ±1, plus the analytic tail when
/// requested.
fn rational_sum(u: C64, mu: C64, sigma: f64, eta: C64, cfg: &AveragingConfig) -> Result<C64> {
    let n = cfg.n as i64;
    let z = (2.0 * PI * I * mu * sigma).exp();
    let lo = if cfg.tail_mode == TailMode::OneSided { 0 } else { -n };
    let mut acc = ZERO;
    if cfg.tail_mode == TailMode::Paired {
        acc += rational_term(u, 0, eta)?;
        let mut zk = C64::new(1.0, 0.0);
        for k in 1..=n {
            zk *= z;
            acc += zk * rational_term(u, k, eta)? + rational_term(u, -k, eta)? / zk;
        }
    } else {
        for k in lo..=n {
            acc += z.powf(k as f64) * rational_term(u, k, eta)?;
        }
    }
    if cfg.tail_correction && cfg.tail_mode != TailMode::OneSided {
        let m = cfg.n + 1;
        let c_pos = I * eta * u;
        if (z - 1.0).norm() < 1e-12 {
            acc += diagonal_tail(eta, c_pos, m);
        } else {
            // 1/(u − in/η) = iη/(n + iηu), 1/(u + im/η) = −iη/(m − iηu)
            acc += euler_tail(z, I * eta, c_pos, m) + euler_tail(1.0 / z, -I * eta, -c_pos, m);
        }
    }
    Ok(acc)
}

/// v.p. Σ e^{2πiμn}/(u − iη⁻¹n), expected 2πη e^{2πημu}/(e^{2πηu} − 1).
pub fn vp_rational_to_trig(u: C64, trig: &TrigParams, cfg: &AveragingConfig) -> Result<C64> {
    check_real_mu(trig)?;
    rational_sum(u, trig.mu(), 1.0, trig.eta(), cfg)
}

/// Σ (Aⁿ⊗id) 𝔯^{(a),ϑₙ}(u − iη⁻¹n) with A: E ↦ e^{2πiμ}E.
pub fn average_rmatrix_c(u: C64, trig: &TrigParams, cfg: &AveragingConfig) -> Result<RMatrix4> {
    check_real_mu(trig)?;
    let eta = trig.eta();
    let d = rational_sum(u, ZERO, 1.0, eta, cfg)? * 0.5;
    let e23 = rational_sum(u, trig.mu(), 1.0, eta, cfg)?;
    let e32 = rational_sum(u, trig.mu(), -1.0, eta, cfg)?;
    Ok(RMatrix4::weight_zero([d, -d, -d, d], e23, e32))
}

/// Largest entrywise deviation of the averaged matrix from the cylinder
/// trigonometric r-matrix at (u, 0).
pub fn rmatrix_c_residual(u: C64, trig: &TrigParams, cfg: &AveragingConfig) -> Result<f64> {
    let avg = average_rmatrix_c(u, trig, cfg)?;
    let exact = build_degenerate_r(DegenerateKind::RcCyl, u, ZERO, Some(*trig))?;
    Ok((avg.matrix() - exact.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AverageIdentity {
    Ctg,
    GLambdaPlus,
    GLambdaMinus,
    RMatrixElliptic,
    RationalToTrig,
    RMatrixC,
}

impl AverageIdentity {
    pub const ALL: [AverageIdentity; 6] = [
        AverageIdentity::Ctg,
        AverageIdentity::GLambdaPlus,
        AverageIdentity::GLambdaMinus,
        AverageIdentity::RMatrixElliptic,
        AverageIdentity::RationalToTrig,
        AverageIdentity::RMatrixC,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AverageIdentity::Ctg => "avctg",
            AverageIdentity::GLambdaPlus => "avctg-p",
            AverageIdentity::GLambdaMinus => "avctg-m",
            AverageIdentity::RMatrixElliptic => "rmatrix-elliptic",
            AverageIdentity::RationalToTrig => "rational-to-trig",
            AverageIdentity::RMatrixC => "rmatrix-c",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown averaging identity '{s}'")))
    }

    /// True for the sums whose target is an elliptic kernel.
    pub fn is_elliptic(self) -> bool {
        !matches!(self, AverageIdentity::RationalToTrig | AverageIdentity::RMatrixC)
    }
}

/// Point and parameters of an averaging run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AverageInputs {
    pub u: C64,
    pub lambda: C64,
    pub params: Option<EllipticParams>,
    pub trig: Option<TrigParams>,
}

/// Distance of the partial sum with cfg.n terms from its closed target
/// (entrywise maximum for the matrix identities).
pub fn average_residual(identity: AverageIdentity, inputs: &AverageInputs, cfg: &AveragingConfig) -> Result<f64> {
    let u = inputs.u;
    if identity.is_elliptic() {
        let p = inputs.params.as_ref().ok_or_else(|| Error::Invalid(format!("{} needs tau", identity.name())))?;
        let l = inputs.lambda;
        return match identity {
            AverageIdentity::Ctg => Ok((vp_ctg_sum(u, p, cfg)? - crate::green::kernels::g0(u, p)?).norm()),
            AverageIdentity::GLambdaPlus => {
                Ok((vp_glambda_sum(u, l, LambdaSign::Plus, p, cfg)? - crate::green::kernels::g_lambda(u, l, p)?).norm())
            }
            AverageIdentity::GLambdaMinus => {
                Ok((vp_glambda_sum(u, l, LambdaSign::Minus, p, cfg)? - crate::green::kernels::g_lambda(u, -l, p)?).norm())
            }
            _ => rmatrix_elliptic_residual(u, l, p, cfg),
        };
    }
    let t = inputs.trig.as_ref().ok_or_else(|| Error::Invalid(format!("{} needs mu and eta", identity.name())))?;
    match identity {
        AverageIdentity::RationalToTrig => Ok((vp_rational_to_trig(u, t, cfg)? - rational_to_trig_target(u, t.mu(), t.eta())).norm()),
        _ => rmatrix_c_residual(u, t, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnum::c;
    use crate::green::kernels::{g0, g_lambda};

    fn params(re: f64, im: f64) -> EllipticParams {
        EllipticParams::from_parts(re, im).unwrap()
    }

    #[test]
    fn ctg_sum_examples() {
        let p = params(0.0, 0.9);
        let u = c(0.3, 0.2);
        let cfg = AveragingConfig::new(25, TailMode::Paired);
        let s = vp_ctg_sum(u, &p, &cfg).unwrap();
        assert!((s - g0(u, &p).unwrap()).norm() < 1e-9);
        let s1 = vp_ctg_sum(u + 1.0, &p, &cfg).unwrap();
        assert!((s1 - s).norm() < 1e-10);
        let plain = vp_ctg_sum(u, &p, &AveragingConfig::new(25, TailMode::Plain)).unwrap();
        assert!((plain - s).norm() < 1e-9);
        let e = |n| (vp_ctg_sum(u, &p, &AveragingConfig::new(n, TailMode::Paired)).unwrap() - g0(u, &p).unwrap()).norm();
        assert!(e(1) / e(6) >= 10.0);
        let one = |n| (vp_ctg_sum(u, &p, &AveragingConfig::new(n, TailMode::OneSided)).unwrap() - g0(u, &p).unwrap()).norm();
        assert!(one(10) > 1e-2 && one(20) >= one(10));
    }

    #[test]
    fn glambda_sum_examples() {
        let p = params(0.0, 0.8);
        let (u, l) = (c(0.25, 0.1), c(0.2, -0.3));
        let cfg = AveragingConfig::new(30, TailMode::Plain);
        let s = vp_glambda_sum(u, l, LambdaSign::Plus, &p, &cfg).unwrap();
        assert!((s - g_lambda(u, l, &p).unwrap()).norm() < 1e-9);
        let m = vp_glambda_sum(u, l, LambdaSign::Minus, &p, &cfg).unwrap();
        assert!((m - g_lambda(u, -l, &p).unwrap()).norm() < 1e-9);
        let flipped = vp_glambda_sum(-u, l, LambdaSign::Minus, &p, &cfg).unwrap();
        assert!((flipped + s).norm() < 1e-10);
        assert!(vp_glambda_sum(u, c(0.2, 0.1), LambdaSign::Plus, &p, &cfg).is_err());
    }

    #[test]
    fn matrix_average() {
        let p = params(0.0, 0.8);
        let (u, l) = (c(0.3, -0.2), c(0.15, -0.25));
        let cfg = AveragingConfig::new(30, TailMode::Paired);
        assert!(rmatrix_elliptic_residual(u, l, &p, &cfg).unwrap() < 1e-8);
        let series = average_rmatrix_elliptic_with(u, l, &p, &cfg, ThetaPolicy::Switched, TrigRepresentation::Series(24)).unwrap();
        let exact = build_r(u, ZERO, l, &p).unwrap();
        let err = (series.matrix() - exact.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
        let bad = |n| {
            let c = AveragingConfig::new(n, TailMode::Plain);
            let m = average_rmatrix_elliptic_with(u, l, &p, &c, ThetaPolicy::AlwaysPlus, TrigRepresentation::Series(24)).unwrap();
            (m.matrix() - exact.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max)
        };
        assert!(bad(2).is_finite() && bad(2) > 1e-2 && bad(4) >= bad(2));
    }

    #[test]
    fn rational_to_trig() {
        let t = TrigParams::new(c(0.5, 0.0), c(1.0, 0.0)).unwrap();
        let u = c(0.3, -0.2);
        let target = rational_to_trig_target(u, t.mu(), t.eta());
        assert!((target - PI / (PI * u).sinh()).norm() < 1e-12);
        let raw = vp_rational_to_trig(u, &t, &AveragingConfig::new(400, TailMode::Paired)).unwrap();
        let raw_err = (raw - target).norm();
        assert!(raw_err > 1e-6 && raw_err < 1e-5, "{raw_err}");
        let cfg = AveragingConfig::new(400, TailMode::Paired).with_tail_correction(true);
        let fixed = vp_rational_to_trig(u, &t, &cfg).unwrap();
        assert!((fixed - target).norm() < 1e-10, "{}", (fixed - target).norm());
        let t2 = TrigParams::new(c(0.3, 0.0), c(1.2, 0.4)).unwrap();
        let fixed = vp_rational_to_trig(u, &t2, &cfg).unwrap();
        assert!((fixed - rational_to_trig_target(u, t2.mu(), t2.eta())).norm() < 1e-10);
        assert!(rmatrix_c_residual(u, &t, &cfg).unwrap() < 1e-10);
        assert!(rmatrix_c_residual(u, &t2, &cfg).unwrap() < 1e-10);
        let complex_mu = TrigParams::new(c(0.6, 0.1), c(1.0, 0.3)).unwrap();
        assert!(vp_rational_to_trig(u, &complex_mu, &cfg).is_err());
    }
}
