//! Randomized verification suites. Each suite draws its sample points
//! sequentially from a seeded ChaCha8 stream, evaluates them in parallel and
//! aggregates in draw order, so reports depend only on the configuration.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cnum::{format_complex, C64, I};
use crate::degenerate::{DegenerateKind, TrigParams};
use crate::error::{Error, Result};
use crate::green::convolution::{convolution_residual, ConvolutionId};
use crate::green::fourier::{heat_identity_residual, HeatVariant, Sign};
use crate::green::kernels::{fay_residual, g0, g_lambda, dlambda_g_lambda, shift_residual, StripPoint};
use crate::rmatrix::{build_r, cdybe_residual, cybe_residual, hhl_defect, rll_residual, slice_hhl_defect, LSign};
use crate::series::{expand_dual_basis, green_series_check, projection_algebra_residual, LaurentSeries};
use crate::theta::{theta, theta_derivs, EllipticParams};

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    QuasiPeriodicity,
    Fay,
    Duality,
    Projections,
    ConvolutionK0,
    ConvolutionCyl,
    Shift,
    Heat,
    Hhl,
    Cdybe,
    Rll,
    CybeA,
    CybeB,
    CybeC,
    GreenSeries,
}

impl Suite {
    pub const ALL: [Suite; 15] = [
        Suite::QuasiPeriodicity,
        Suite::Fay,
        Suite::Duality,
        Suite::Projections,
        Suite::ConvolutionK0,
        Suite::ConvolutionCyl,
        Suite::Shift,
        Suite::Heat,
        Suite::Hhl,
        Suite::Cdybe,
        Suite::Rll,
        Suite::CybeA,
        Suite::CybeB,
        Suite::CybeC,
        Suite::GreenSeries,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::QuasiPeriodicity => "quasi-periodicity",
            Suite::Fay => "fay",
            Suite::Duality => "duality",
            Suite::Projections => "projections",
            Suite::ConvolutionK0 => "convolution-k0",
            Suite::ConvolutionCyl => "convolution-cyl",
            Suite::Shift => "shift",
            Suite::Heat => "heat",
            Suite::Hhl => "hhl",
            Suite::Cdybe => "cdybe",
            Suite::Rll => "rll",
            Suite::CybeA => "cybe-a",
            Suite::CybeB => "cybe-b",
            Suite::CybeC => "cybe-c",
            Suite::GreenSeries => "green-series",
        }
    }

    /// The identity the suite checks, in formula form.
    pub fn identity(self) -> &'static str {
        match self {
            Suite::QuasiPeriodicity => "theta(u+1) = -theta(u), theta(u+tau) = -exp(-2 pi i u - pi i tau) theta(u), theta(0) = 0, theta'(0) = 1",
            Suite::Fay => "g_l(u-z) g_l(z) = g_l(u) (g0(u-z) + g0(z)) - d_l g_l(u)  (degenerate Fay identity)",
            Suite::Duality => "<eps^(n;l), eps_(m;l)> = delta_nm for |n|,|m| <= N, l generic and l = 0",
            Suite::Projections => "P+ + P- = id, P+ P+ = P+, P- P- = P-, P+ P- = P- P+ = 0 for P_l and P_0",
            Suite::ConvolutionK0 => "<G_l^a(u,z) G_l^b(z,v)>_z and <G G>_z residue-side convolutions, six identities",
            Suite::ConvolutionCyl => "<G_l^a(u-z) G_l^b(z-v)>_z and <G G>_z segment convolutions with d_l and gamma terms, seven identities",
            Suite::Shift => "g_l(w - k tau) = exp(2 pi i k l) g_l(w) for k in {-2,-1,1,2}",
            Suite::Heat => "(1/2 pi i) d_u d_l G_l^(+-) = d_tau G_l^(+-), (1/4 pi i) d_u gamma = d_tau G",
            Suite::Hhl => "[H(x)1 + 1(x)H, r] = 0 and [H_slot + H_3, L^(+-)] = 0",
            Suite::Cdybe => "[r12,r13] + [r12,r23] + [r13,r23] = H1 d_l r23 - H2 d_l r13 + H3 d_l r12",
            Suite::Rll => "[L1,L2] = [L1+L2, r12] + H1 d_l L2 - H2 d_l L1 + H3 d_l r12 at c = 0, all sign pairs",
            Suite::CybeA => "[r12,r13] + [r12,r23] + [r13,r23] = 0 for the rational matrices (K0 and cylinder)",
            Suite::CybeB => "[r12,r13] + [r12,r23] + [r13,r23] = 0 for the trigonometric matrices (K0 and cylinder)",
            Suite::CybeC => "[r12,r13] + [r12,r23] + [r13,r23] = 0 for the cylinder cth / Psi_mu matrix",
            Suite::GreenSeries => "G_l(u,z) = sum_n eps^(n;l)(u) eps_(n;l)(z): z-Taylor coefficients of g_l(u-z)",
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Suite::QuasiPeriodicity | Suite::Projections => 1e-10,
            Suite::Fay | Suite::Duality | Suite::Shift | Suite::GreenSeries => 1e-9,
            Suite::Hhl => 1e-12,
            _ => 1e-8,
        }
    }

    /// Header line naming the suite and its identity.
    pub fn header(self) -> String {
        format!("{}: {}", self.name(), self.identity())
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown suite '{s}'; run --list-suites for the available names")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    /// Fixed modulus; drawn per sample when absent.
    pub tau: Option<C64>,
    /// Fixed dynamical parameter; drawn from the band when absent.
    pub lambda: Option<C64>,
    /// Fixed (μ, η) for cybe-c; drawn from the zone when absent.
    pub trig: Option<TrigParams>,
    pub quadrature_nodes: usize,
    /// Series order for duality, projections and green-series.
    pub truncation: usize,
}

impl SuiteConfig {
    pub fn new(suite: Suite, samples: usize, seed: u64) -> Self {
        Self {
            seed,
            samples,
            tol: suite.default_tolerance(),
            tau: None,
            lambda: None,
            trig: None,
            quadrature_nodes: 128,
            truncation: if suite == Suite::GreenSeries { 8 } else { 12 },
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Invalid("samples must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Invalid(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.quadrature_nodes < crate::green::quadrature::MIN_NODES {
            return Err(Error::Invalid(format!("quadrature nodes must be at least {}", crate::green::quadrature::MIN_NODES)));
        }
        if let Some(t) = self.tau {
            EllipticParams::new(t)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub inputs: BTreeMap<String, String>,
    /// Non-finite residuals (evaluation errors) serialize as null.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    pub samples: usize,
    pub tolerance: f64,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub failures: Vec<Failure>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("suite,seed,samples,tolerance,max_residual,mean_residual,failures,passed\n");
        out.push_str(&format!(
            "{},{},{},{:e},{:e},{:e},{},{}\n",
            self.suite,
            self.seed,
            self.samples,
            self.tolerance,
            self.max_residual,
            self.mean_residual,
            self.failures.len(),
            self.passed
        ));
        out
    }
}

/// One drawn configuration.
#[derive(Debug, Clone)]
struct Point {
    tau: C64,
    lambda: Option<C64>,
    trig: Option<TrigParams>,
    zs: Vec<(&'static str, C64)>,
    series: Option<LaurentSeries>,
}

impl Point {
    fn inputs(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        if self.tau != ZERO {
            m.insert("tau".to_string(), format_complex(self.tau));
        }
        if let Some(l) = self.lambda {
            m.insert("lambda".to_string(), format_complex(l));
        }
        if let Some(t) = self.trig {
            m.insert("mu".to_string(), format_complex(t.mu()));
            m.insert("eta".to_string(), format_complex(t.eta()));
        }
        for (k, z) in &self.zs {
            m.insert(k.to_string(), format_complex(*z));
        }
        if let Some(s) = &self.series {
            m.insert("series_window".to_string(), format!("[{}, {}]", s.min_deg(), s.max_deg()));
        }
        m
    }

    fn z(&self, name: &str) -> C64 {
        self.zs.iter().find(|(k, _)| *k == name).map(|(_, z)| *z).expect("drawn point")
    }
}

struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    fn complex_box(&mut self, re: (f64, f64), im: (f64, f64)) -> C64 {
        let a = self.uniform(re.0, re.1);
        let b = self.uniform(im.0, im.1);
        C64::new(a, b)
    }

    fn tau(&mut self, fixed: Option<C64>, im: (f64, f64)) -> C64 {
        match fixed {
            Some(t) => t,
            None => self.complex_box((-0.5, 0.5), im),
        }
    }

    /// −0.9·Im τ ≤ Im λ ≤ −0.1·Im τ, the band with margin 0.1·Im τ.
    fn lambda(&mut self, fixed: Option<C64>, tau: C64) -> C64 {
        match fixed {
            Some(l) => l,
            None => self.complex_box((-0.5, 0.5), (-0.9 * tau.im, -0.1 * tau.im)),
        }
    }

    /// A point of the fundamental box with lattice distance at least `gap`
    /// from every entry of `avoid` (differences included).
    fn generic(&mut self, p: &EllipticParams, avoid: &[C64], gap: f64) -> C64 {
        let t = p.im_tau();
        loop {
            let z = self.complex_box((-0.5, 0.5), (-0.45 * t, 0.45 * t));
            if p.lattice_distance(z) >= gap && avoid.iter().all(|a| p.lattice_distance(z - a) >= gap) {
                return z;
            }
        }
    }

    fn polar(&mut self, r: f64) -> C64 {
        C64::from_polar(r, self.uniform(0.0, 2.0 * PI))
    }

    fn trig(&mut self, fixed: Option<TrigParams>) -> Result<TrigParams> {
        if let Some(t) = fixed {
            return Ok(t);
        }
        loop {
            let eta = self.complex_box((0.6, 1.5), (-0.5, 0.5));
            let slope = eta.im / eta.re;
            let mu_re = self.uniform(0.15, 0.85);
            let mu = C64::new(mu_re, slope * mu_re * self.uniform(0.2, 0.8));
            if let Ok(t) = TrigParams::new(mu, eta) {
                return Ok(t);
            }
        }
    }
}

fn params(tau: C64) -> Result<EllipticParams> {
    EllipticParams::new(tau)
}

fn draw(suite: Suite, index: usize, s: &mut Sampler, cfg: &SuiteConfig) -> Result<Point> {
    let mut pt = Point { tau: ZERO, lambda: None, trig: None, zs: Vec::new(), series: None };
    match suite {
        Suite::QuasiPeriodicity => {
            pt.tau = s.tau(cfg.tau, (0.3, 2.0));
            let p = params(pt.tau)?;
            let u = s.generic(&p, &[], 0.05);
            pt.zs.push(("u", u));
        }
        Suite::Fay => {
            pt.tau = s.tau(cfg.tau, (0.5, 1.5));
            let p = params(pt.tau)?;
            pt.lambda = Some(s.lambda(cfg.lambda, pt.tau));
            let u = s.generic(&p, &[], 0.1);
            let z = s.generic(&p, &[u], 0.1);
            pt.zs.extend([("u", u), ("z", z)]);
        }
        Suite::Duality | Suite::Projections | Suite::GreenSeries => {
            pt.tau = s.tau(cfg.tau, (0.7, 1.5));
            let p = params(pt.tau)?;
            // the first sample always exercises the λ = 0 table
            pt.lambda = Some(if index == 0 { ZERO } else { s.lambda(cfg.lambda, pt.tau) });
            if suite == Suite::GreenSeries {
                let r = p.shortest_period().min(pt.tau.norm()).min(1.0) * s.uniform(0.2, 0.45);
                pt.zs.push(("u", s.polar(r)));
            }
            if suite == Suite::Projections {
                let lo = -(s.uniform(1.0, 9.0).floor() as i64);
                let hi = s.uniform(3.0, 11.0).floor() as i64;
                let coeffs = (lo..=hi).map(|_| s.complex_box((-1.0, 1.0), (-1.0, 1.0))).collect();
                pt.series = Some(LaurentSeries::new(lo, coeffs, false)?);
            }
        }
        Suite::ConvolutionK0 => {
            pt.tau = s.tau(cfg.tau, (0.8, 1.5));
            let p = params(pt.tau)?;
            pt.lambda = Some(s.lambda(cfg.lambda, pt.tau));
            let rho = p.shortest_period();
            let big = rho * s.uniform(0.2, 0.3);
            let small = big * s.uniform(0.3, 0.6);
            let (u, v) = (s.polar(big), s.polar(small));
            pt.zs.extend([("u", u), ("v", v)]);
        }
        Suite::ConvolutionCyl => {
            pt.tau = s.tau(cfg.tau, (0.6, 1.2));
            let t = pt.tau.im;
            pt.lambda = Some(s.lambda(cfg.lambda, pt.tau));
            let u = s.complex_box((-0.5, 0.5), (-0.3 * t, -0.1 * t));
            let v = s.complex_box((-0.5, 0.5), (0.1 * t, 0.3 * t));
            pt.zs.extend([("u", u), ("v", v)]);
        }
        Suite::Shift => {
            pt.tau = s.tau(cfg.tau, (0.5, 1.5));
            let p = params(pt.tau)?;
            pt.lambda = Some(s.lambda(cfg.lambda, pt.tau));
            pt.zs.push(("w", s.generic(&p, &[], 0.1)));
        }
        Suite::Heat => {
            pt.tau = s.tau(cfg.tau, (0.6, 1.2));
            let t = pt.tau.im;
            pt.lambda = Some(s.lambda(cfg.lambda, pt.tau));
            let lower = s.complex_box((-0.5, 0.5), (-0.85 * t, -0.15 * t));
            let upper = s.complex_box((-0.5, 0.5), (0.15 * t, 0.85 * t));
            pt.zs.extend([("w_lower", lower), ("w_upper", upper)]);
        }
        Suite::Hhl | Suite::Cdybe | Suite::Rll => {
            pt.tau = s.tau(cfg.tau, (0.6, 1.4));
            let p = params(pt.tau)?;
            pt.lambda = Some(s.lambda(cfg.lambda, pt.tau));
            let u1 = s.generic(&p, &[], 0.1);
            let u2 = s.generic(&p, &[u1], 0.1);
            let u3 = s.generic(&p, &[u1, u2], 0.1);
            pt.zs.extend([("u1", u1), ("u2", u2), ("u3", u3)]);
        }
        Suite::CybeA | Suite::CybeB | Suite::CybeC => {
            let trig = s.trig(cfg.trig)?;
            // K0 annulus ordering |u1| > |u2| > |u3| > 0 inside the unit disc
            let r1 = s.uniform(0.3, 0.6);
            let r2 = r1 * s.uniform(0.3, 0.7);
            let r3 = r2 * s.uniform(0.3, 0.7);
            let (a1, a2, a3) = (s.polar(r1), s.polar(r2), s.polar(r3));
            // cylinder ordering Im u1 < Im u2 < Im u3 within the narrowest strip
            let h = trig.strip_height().min(1.0);
            let i1 = -0.45 * h * s.uniform(0.3, 1.0);
            let i3 = 0.45 * h * s.uniform(0.3, 1.0);
            let i2 = i1 + (i3 - i1) * s.uniform(0.3, 0.7);
            let c1 = C64::new(s.uniform(-0.5, 0.5), i1);
            let c2 = C64::new(s.uniform(-0.5, 0.5), i2);
            let c3 = C64::new(s.uniform(-0.5, 0.5), i3);
            pt.zs.extend([("k0_u1", a1), ("k0_u2", a2), ("k0_u3", a3), ("cyl_u1", c1), ("cyl_u2", c2), ("cyl_u3", c3)]);
            if suite == Suite::CybeC {
                pt.trig = Some(trig);
            }
        }
    }
    Ok(pt)
}

fn rel(a: C64, scale: f64) -> f64 {
    a.norm() / scale.max(1.0)
}

fn evaluate(suite: Suite, pt: &Point, cfg: &SuiteConfig) -> Result<f64> {
    let lambda = pt.lambda.unwrap_or(ZERO);
    match suite {
        Suite::QuasiPeriodicity => {
            let p = params(pt.tau)?;
            let u = pt.z("u");
            let t0 = theta(u, &p)?;
            let t1 = theta(u + 1.0, &p)?;
            let tt = theta(u + p.tau(), &p)?;
            let factor = -(-2.0 * PI * I * u - PI * I * p.tau()).exp();
            let d = theta_derivs(ZERO, &p)?;
            let q1 = (t1 + t0).norm() / t0.norm();
            let q2 = (tt - factor * t0).norm() / tt.norm();
            Ok(q1.max(q2).max(d.d0.norm()).max((d.d1 - 1.0).norm()))
        }
        Suite::Fay => {
            let p = params(pt.tau)?;
            let (u, z) = (pt.z("u"), pt.z("z"));
            let r = fay_residual(u, z, lambda, &p)?;
            let scale = (g_lambda(u - z, lambda, &p)? * g_lambda(z, lambda, &p)?).norm().max(dlambda_g_lambda(u, lambda, &p)?.norm());
            Ok(rel(r, scale))
        }
        Suite::Duality => {
            let p = params(pt.tau)?;
            expand_dual_basis(lambda, &p, cfg.truncation)?.duality_defect()
        }
        Suite::Projections => {
            let p = params(pt.tau)?;
            let s = pt.series.as_ref().expect("drawn series");
            let table = expand_dual_basis(lambda, &p, cfg.truncation)?;
            let zero = expand_dual_basis(ZERO, &p, cfg.truncation)?;
            Ok(projection_algebra_residual(s, &table)?.max(projection_algebra_residual(s, &zero)?))
        }
        Suite::GreenSeries => {
            let p = params(pt.tau)?;
            green_series_check(lambda, &p, cfg.truncation, pt.z("u"))
        }
        Suite::ConvolutionK0 => {
            let p = params(pt.tau)?;
            let (big, small) = (pt.z("u"), pt.z("v"));
            let mut worst = 0.0f64;
            for id in ConvolutionId::K0 {
                let (u, v) = if id == ConvolutionId::K0MinusMinus { (small, big) } else { (big, small) };
                worst = worst.max(convolution_residual(id, u, v, lambda, &p, cfg.quadrature_nodes)?.norm());
            }
            Ok(worst)
        }
        Suite::ConvolutionCyl => {
            let p = params(pt.tau)?;
            let (lo, hi) = (pt.z("u"), pt.z("v"));
            let mut worst = 0.0f64;
            for id in ConvolutionId::CYL {
                let (u, v) = if id == ConvolutionId::CylMinusMinus { (hi, lo) } else { (lo, hi) };
                worst = worst.max(convolution_residual(id, u, v, lambda, &p, cfg.quadrature_nodes)?.norm());
            }
            Ok(worst)
        }
        Suite::Shift => {
            let p = params(pt.tau)?;
            let w = pt.z("w");
            let mut worst = 0.0f64;
            for k in [-2, -1, 1, 2] {
                worst = worst.max(shift_residual(w, lambda, k, &p)?);
            }
            Ok(worst)
        }
        Suite::Heat => {
            let p = params(pt.tau)?;
            let lower = StripPoint::lower(pt.z("w_lower"), &p)?;
            let upper = StripPoint::upper(pt.z("w_upper"), &p)?;
            let cases = [
                (lower, HeatVariant::Lambda { lambda, sign: Sign::Plus }),
                (upper, HeatVariant::Lambda { lambda, sign: Sign::Minus }),
                (lower, HeatVariant::Gamma),
            ];
            let mut worst = 0.0f64;
            for (w, v) in cases {
                let r = heat_identity_residual(&w, v, &p)?;
                let scale = match v {
                    HeatVariant::Lambda { .. } => g_lambda(w.w(), lambda, &p)?.norm(),
                    HeatVariant::Gamma => g0(w.w(), &p)?.norm(),
                };
                worst = worst.max(rel(r, scale));
            }
            Ok(worst)
        }
        Suite::Hhl => {
            let p = params(pt.tau)?;
            let (u1, u2, u3) = (pt.z("u1"), pt.z("u2"), pt.z("u3"));
            let mut worst = hhl_defect(&build_r(u1, u2, lambda, &p)?);
            for sign in [LSign::Plus, LSign::Minus] {
                for slot in [0, 1] {
                    worst = worst.max(slice_hhl_defect(sign, u1, u3, slot, lambda, &p)?);
                }
            }
            Ok(worst)
        }
        Suite::Cdybe => {
            let p = params(pt.tau)?;
            cdybe_residual(pt.z("u1"), pt.z("u2"), pt.z("u3"), lambda, &p)
        }
        Suite::Rll => {
            let p = params(pt.tau)?;
            let (u, v, w) = (pt.z("u1"), pt.z("u2"), pt.z("u3"));
            let mut worst = 0.0f64;
            for s1 in [LSign::Plus, LSign::Minus] {
                for s2 in [LSign::Plus, LSign::Minus] {
                    worst = worst.max(rll_residual(u, v, w, lambda, (s1, s2), &p)?);
                }
            }
            Ok(worst)
        }
        Suite::CybeA | Suite::CybeB | Suite::CybeC => {
            let kinds: &[DegenerateKind] = match suite {
                Suite::CybeA => &[DegenerateKind::RaK0, DegenerateKind::RaCyl],
                Suite::CybeB => &[DegenerateKind::RbK0, DegenerateKind::RbCyl],
                _ => &[DegenerateKind::RcCyl],
            };
            let mut worst = 0.0f64;
            for &kind in kinds {
                let pre = if matches!(kind, DegenerateKind::RaK0 | DegenerateKind::RbK0) { "k0" } else { "cyl" };
                let get = |i: usize| pt.z(&format!("{pre}_u{i}"));
                worst = worst.max(cybe_residual(kind, get(1), get(2), get(3), pt.trig)?);
            }
            Ok(worst)
        }
    }
}

/// Draw `cfg.samples` points for `suite` and evaluate them.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let mut sampler = Sampler::new(cfg.seed);
    let points = (0..cfg.samples).map(|i| draw(suite, i, &mut sampler, cfg)).collect::<Result<Vec<_>>>()?;
    let residuals: Vec<f64> =
        points.par_iter().map(|pt| evaluate(suite, pt, cfg).unwrap_or(f64::INFINITY)).collect();
    let mut failures = Vec::new();
    let mut max_residual = 0.0f64;
    let mut sum = 0.0;
    for (pt, &r) in points.iter().zip(&residuals) {
        max_residual = max_residual.max(r);
        sum += r;
        if !(r < cfg.tol) {
            failures.push(Failure { inputs: pt.inputs(), residual: r });
        }
    }
    let passed = max_residual < cfg.tol && failures.is_empty();
    Ok(VerificationReport {
        suite: suite.name().to_string(),
        seed: cfg.seed,
        samples: cfg.samples,
        tolerance: cfg.tol,
        max_residual,
        mean_residual: sum / cfg.samples as f64,
        failures,
        passed,
    })
}

/// One `name  identity` line per suite.
pub fn suite_listing() -> String {
    Suite::ALL.iter().map(|s| format!("{:<18} {}\n", s.name(), s.identity())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_small_runs() {
        let mut bad = Vec::new();
        for suite in Suite::ALL {
            let cfg = SuiteConfig::new(suite, 4, 11);
            let r = run_suite(suite, &cfg).unwrap();
            if !r.passed {
                bad.push(r.to_json());
            }
        }
        assert!(bad.is_empty(), "{}", bad.join("\n"));
    }

    #[test]
    fn names_round_trip() {
        for suite in Suite::ALL {
            assert_eq!(suite.name().parse::<Suite>().unwrap(), suite);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn reports_are_reproducible() {
        let cfg = SuiteConfig::new(Suite::Fay, 10, 3);
        let a = run_suite(Suite::Fay, &cfg).unwrap().to_json();
        let b = run_suite(Suite::Fay, &cfg).unwrap().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn floor_tolerance_fails() {
        let cfg = SuiteConfig::new(Suite::Cdybe, 1, 7).with_tol(1e-20);
        let r = run_suite(Suite::Cdybe, &cfg).unwrap();
        assert!(!r.passed);
        assert_eq!(r.failures.len(), 1);
    }
}
