//! Truncated Laurent series around u = 0, the residue pairing, the
//! λ-dependent dual bases and the projections built from them.

use std::ops::{Add, Mul, Neg, Sub};

use crate::cnum::C64;
use crate::error::{Error, Result};
use crate::green::kernels::{g0, g_lambda, POLE_MARGIN};
use crate::green::quadrature::circle_pairing;
use crate::theta::{theta, theta_taylor, EllipticParams};

const ZERO: C64 = C64::new(0.0, 0.0);
/// Largest internal degree used when a series is evaluated at a point.
pub const MAX_INTERNAL_DEGREE: usize = 400;

/// Σ_{k=min}^{max} c_k u^k. When `exact` is false the terms above `max_deg`
/// are unknown, not zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentSeries {
    min_deg: i64,
    max_deg: i64,
    coeffs: Vec<C64>,
    exact: bool,
}

impl LaurentSeries {
    pub fn new(min_deg: i64, coeffs: Vec<C64>, exact: bool) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Invalid("a Laurent series needs at least one coefficient".into()));
        }
        let max_deg = min_deg + coeffs.len() as i64 - 1;
        Ok(Self { min_deg, max_deg, coeffs, exact })
    }

    /// Zero series known through `max_deg`.
    pub fn zero(min_deg: i64, max_deg: i64, exact: bool) -> Self {
        let n = (max_deg - min_deg + 1).max(1) as usize;
        Self { min_deg, max_deg: min_deg + n as i64 - 1, coeffs: vec![ZERO; n], exact }
    }

    /// c·u^k, exact.
    pub fn monomial(k: i64, c: C64) -> Self {
        Self { min_deg: k, max_deg: k, coeffs: vec![c], exact: true }
    }

    pub fn min_deg(&self) -> i64 {
        self.min_deg
    }

    pub fn max_deg(&self) -> i64 {
        self.max_deg
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Highest degree whose coefficient is certified.
    pub fn known_through(&self) -> i64 {
        if self.exact {
            i64::MAX
        } else {
            self.max_deg
        }
    }

    /// Coefficient of u^k: zero below the window, `None` past a truncation.
    pub fn coeff(&self, k: i64) -> Option<C64> {
        if k < self.min_deg {
            Some(ZERO)
        } else if k <= self.max_deg {
            Some(self.coeffs[(k - self.min_deg) as usize])
        } else if self.exact {
            Some(ZERO)
        } else {
            None
        }
    }

    /// Drop everything above degree `k`; the result is no longer exact.
    pub fn truncate(&self, k: i64) -> Self {
        if k >= self.max_deg {
            return Self { exact: false, ..self.clone() };
        }
        if k < self.min_deg {
            return Self::zero(self.min_deg, self.min_deg, false);
        }
        let n = (k - self.min_deg + 1) as usize;
        Self { min_deg: self.min_deg, max_deg: k, coeffs: self.coeffs[..n].to_vec(), exact: false }
    }

    pub fn scale(&self, a: C64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * a).collect(), ..self.clone() }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Evaluate the known part at u.
    pub fn eval(&self, u: C64) -> C64 {
        let mut acc = ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * u + c;
        }
        acc * u.powi(self.min_deg as i32)
    }

    /// Max coefficient deviation over the degrees certified in both series.
    pub fn max_diff(&self, other: &Self) -> f64 {
        let lo = self.min_deg.min(other.min_deg);
        let hi = self.known_through().min(other.known_through()).min(self.max_deg.max(other.max_deg));
        (lo..=hi)
            .map(|k| match (self.coeff(k), other.coeff(k)) {
                (Some(a), Some(b)) => (a - b).norm(),
                _ => 0.0,
            })
            .fold(0.0, f64::max)
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        let lo = self.min_deg.min(other.min_deg);
        let top = self.max_deg.max(other.max_deg);
        let exact = self.exact && other.exact;
        let hi = if exact { top } else { self.known_through().min(other.known_through()).min(top) };
        let coeffs = (lo..=hi).map(|k| self.coeff(k).unwrap_or(ZERO) + other.coeff(k).unwrap_or(ZERO) * sign).collect();
        Self { min_deg: lo, max_deg: hi, coeffs, exact }
    }
}

impl Add for &LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, rhs: Self) -> LaurentSeries {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, rhs: Self) -> LaurentSeries {
        self.combine(rhs, -1.0)
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &LaurentSeries {
    type Output = LaurentSeries;
    /// Truncates to the degrees where every contributing term is known.
    fn mul(self, rhs: Self) -> LaurentSeries {
        let lo = self.min_deg + rhs.min_deg;
        let cap_a = if self.exact { i64::MAX } else { self.max_deg.saturating_add(rhs.min_deg) };
        let cap_b = if rhs.exact { i64::MAX } else { rhs.max_deg.saturating_add(self.min_deg) };
        let exact = self.exact && rhs.exact;
        let hi = cap_a.min(cap_b).min(self.max_deg + rhs.max_deg);
        if hi < lo {
            return LaurentSeries::zero(lo, lo - 1, false);
        }
        let mut coeffs = vec![ZERO; (hi - lo + 1) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                let k = i + j;
                if k < coeffs.len() {
                    coeffs[k] += a * b;
                }
            }
        }
        LaurentSeries { min_deg: lo, max_deg: hi, coeffs, exact }
    }
}

/// Coefficient of u^{−1} in a·b.
pub fn residue_pair(a: &LaurentSeries, b: &LaurentSeries) -> Result<C64> {
    let lo = a.min_deg + b.min_deg;
    if lo > -1 {
        return Ok(ZERO);
    }
    if !a.exact && a.max_deg + b.min_deg < -1 || !b.exact && b.max_deg + a.min_deg < -1 {
        return Err(Error::WindowInsufficient(-1));
    }
    let mut acc = ZERO;
    for (i, x) in a.coeffs.iter().enumerate() {
        let k = -1 - (a.min_deg + i as i64);
        if let Some(y) = b.coeff(k) {
            acc += x * y;
        }
    }
    Ok(acc)
}

/// Laurent coefficients c_{−1..=max} of θ(u+λ)/(θ(u)θ(λ)), or of θ′/θ when
/// λ = 0, obtained by dividing Taylor series.
pub fn kernel_laurent(lambda: C64, p: &EllipticParams, max: usize) -> Result<LaurentSeries> {
    let n = max + 2;
    let zero = C64::new(0.0, 0.0);
    let t0 = theta_taylor(zero, p, n + 1)?;
    // θ(u)/u
    let b: Vec<C64> = t0[1..].to_vec();
    let a: Vec<C64> = if lambda == zero {
        (0..n).map(|k| t0[k + 1] * (k as f64 + 1.0)).collect()
    } else {
        if p.lattice_distance(lambda) <= POLE_MARGIN {
            return Err(Error::NearPole {
                arg: crate::error::PoleArg::Lambda,
                distance: p.lattice_distance(lambda),
                margin: POLE_MARGIN,
            });
        }
        let th = theta(lambda, p)?;
        theta_taylor(lambda, p, n)?.into_iter().map(|x| x / th).collect()
    };
    let mut q = vec![zero; n];
    for k in 0..n {
        let mut s = a[k];
        for j in 1..=k {
            s -= b[j] * q[k - j];
        }
        q[k] = s / b[0];
    }
    LaurentSeries::new(-1, q, false).map(|s| s.truncate(max as i64))
}

/// Generalized binomial C(j, n), exact in integers while it fits so that
/// C(a+b, a) and C(a+b, b) round to the same double.
fn binomial(j: i64, n: usize) -> f64 {
    let mut exact: Option<i128> = Some(1);
    let mut approx = 1.0f64;
    for i in 0..n {
        let (num, den) = ((j - i as i64) as i128, i as i128 + 1);
        exact = exact.and_then(|b| b.checked_mul(num)).map(|b| b / den);
        approx *= num as f64 / den as f64;
    }
    match exact {
        Some(b) if b.unsigned_abs() < (1u128 << 53) => b as f64,
        _ => approx,
    }
}

/// (1/n!) d^n/du^n of a series with window starting at −1, known through
/// `top`, truncated at `keep`.
fn scaled_derivative(f: &LaurentSeries, n: usize, keep: i64) -> LaurentSeries {
    let lo = -(n as i64) - 1;
    let hi = keep.min(f.max_deg - n as i64);
    let coeffs = (lo..=hi)
        .map(|d| {
            let j = d + n as i64;
            f.coeff(j).unwrap_or(ZERO) * binomial(j, n)
        })
        .collect();
    LaurentSeries { min_deg: lo, max_deg: hi, coeffs, exact: false }
}

/// ε^{n;λ} and ε_{n;λ} for −N−1 ≤ n ≤ N, each known on [−N−1, N].
#[derive(Debug, Clone)]
pub struct DualBasisTable {
    lambda: C64,
    tau: C64,
    order: usize,
    upper: Vec<LaurentSeries>,
    lower: Vec<LaurentSeries>,
}

impl DualBasisTable {
    pub fn lambda(&self) -> C64 {
        self.lambda
    }

    pub fn tau(&self) -> C64 {
        self.tau
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn index(&self, n: i64) -> Result<usize> {
        let big = self.order as i64;
        if n < -big - 1 || n > big {
            return Err(Error::WindowInsufficient(n));
        }
        Ok((n + big + 1) as usize)
    }

    /// ε^{n;λ}
    pub fn upper(&self, n: i64) -> Result<&LaurentSeries> {
        Ok(&self.upper[self.index(n)?])
    }

    /// ε_{n;λ}
    pub fn lower(&self, n: i64) -> Result<&LaurentSeries> {
        Ok(&self.lower[self.index(n)?])
    }

    /// Matrix of ⟨ε^n, ε_m⟩ for n, m in [−N−1, N].
    pub fn duality_matrix(&self) -> Result<Vec<Vec<C64>>> {
        let big = self.order as i64;
        (-big - 1..=big)
            .map(|n| (-big - 1..=big).map(|m| residue_pair(self.upper(n)?, self.lower(m)?)).collect())
            .collect()
    }

    /// Largest deviation of the duality matrix from the identity.
    pub fn duality_defect(&self) -> Result<f64> {
        let m = self.duality_matrix()?;
        let mut worst = 0.0f64;
        for (i, row) in m.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((x - want).norm());
            }
        }
        Ok(worst)
    }
}

/// Build the dual bases for λ (λ = 0 exactly selects the θ′/θ family).
pub fn expand_dual_basis(lambda: C64, p: &EllipticParams, order: usize) -> Result<DualBasisTable> {
    let big = order as i64;
    let f = kernel_laurent(lambda, p, 2 * order)?;
    // generator of the lower family: θ(u−λ)/(θ(u)θ(−λ)) = −F(−u)
    let g_coeffs: Vec<C64> = (-1..=f.max_deg)
        .map(|k| {
            let s = if k.rem_euclid(2) == 0 { -1.0 } else { 1.0 };
            f.coeff(k).unwrap_or(ZERO) * s
        })
        .collect();
    let g = LaurentSeries::new(-1, g_coeffs, false)?;
    let mut upper = Vec::with_capacity(2 * order + 2);
    let mut lower = Vec::with_capacity(2 * order + 2);
    for n in -big - 1..=big {
        if n >= 0 {
            upper.push(scaled_derivative(&f, n as usize, big));
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            lower.push(LaurentSeries::monomial(n, C64::new(sign, 0.0)));
        } else {
            let k = (-n - 1) as usize;
            upper.push(LaurentSeries::monomial(k as i64, C64::new(1.0, 0.0)));
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            lower.push(scaled_derivative(&g, k, big).scale(C64::new(sign, 0.0)));
        }
    }
    Ok(DualBasisTable { lambda, tau: p.tau(), order, upper, lower })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Projection {
    PlusLambda,
    MinusLambda,
    PlusZero,
    MinusZero,
}

/// Project a series onto the span of {ε_n}_{n≥0} (plus) or {ε_n}_{n<0} (minus).
/// The zero variants require a table built at λ = 0.
pub fn project(s: &LaurentSeries, table: &DualBasisTable, which: Projection) -> Result<LaurentSeries> {
    let zero_table = table.lambda == ZERO;
    match which {
        Projection::PlusZero | Projection::MinusZero if !zero_table => {
            return Err(Error::Invalid("the P± projections need a table built at lambda = 0".into()))
        }
        _ => {}
    }
    let big = table.order as i64;
    if s.min_deg < -big - 1 {
        return Err(Error::WindowInsufficient(s.min_deg));
    }
    match which {
        Projection::PlusLambda | Projection::PlusZero => {
            let top = big.min(s.known_through());
            if top < 0 {
                return Ok(LaurentSeries::zero(0, 0, false));
            }
            let coeffs = (0..=top)
                .map(|n| {
                    let a = residue_pair(table.upper(n)?, s)?;
                    Ok(if n % 2 == 0 { a } else { -a })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(LaurentSeries { min_deg: 0, max_deg: top, coeffs, exact: false })
        }
        Projection::MinusLambda | Projection::MinusZero => {
            let top = big.min(s.known_through());
            let mut acc = LaurentSeries::zero(s.min_deg.min(0), top, false);
            for k in s.min_deg..0 {
                let a = s.coeff(k).unwrap_or(ZERO);
                if a != ZERO {
                    acc = &acc + &table.lower(k)?.scale(a);
                }
            }
            Ok(acc.truncate(top))
        }
    }
}

/// Worst of P⁺+P⁻ = id, P⁺P⁺ = P⁺, P⁻P⁻ = P⁻, P⁺P⁻ = 0 and P⁻P⁺ = 0 on `s`,
/// using the λ or the λ = 0 projections according to the table. Relative to
/// the largest coefficient of s, P⁺s and P⁻s: the λ-basis is far from the
/// monomials, so the two components can be much larger than s itself.
pub fn projection_algebra_residual(s: &LaurentSeries, table: &DualBasisTable) -> Result<f64> {
    let (plus_id, minus_id) =
        if table.lambda == ZERO { (Projection::PlusZero, Projection::MinusZero) } else { (Projection::PlusLambda, Projection::MinusLambda) };
    let plus = project(s, table, plus_id)?;
    let minus = project(s, table, minus_id)?;
    let checks = [
        (&plus + &minus).max_diff(s),
        project(&plus, table, plus_id)?.max_diff(&plus),
        project(&minus, table, minus_id)?.max_diff(&minus),
        project(&minus, table, plus_id)?.max_abs(),
        project(&plus, table, minus_id)?.max_abs(),
    ];
    let scale = s.max_abs().max(plus.max_abs()).max(minus.max_abs()).max(1.0);
    Ok(checks.into_iter().fold(0.0, f64::max) / scale)
}

/// Largest coefficient deviation of Σ_k ⟨ε^k, u^m⟩ ε_k(z) from z^m over
/// −N−1 ≤ m ≤ N, the truncated form of Σ ε^k(u)ε_k(z) = δ(u,z).
pub fn delta_residual(table: &DualBasisTable) -> Result<f64> {
    let big = table.order as i64;
    let mut worst = 0.0f64;
    for m in -big - 1..=big {
        let probe = LaurentSeries::monomial(m, C64::new(1.0, 0.0));
        let mut acc = LaurentSeries::zero(-big - 1, big, false);
        for k in -big - 1..=big {
            let a = residue_pair(table.upper(k)?, &probe)?;
            if a != ZERO {
                acc = &acc + &table.lower(k)?.scale(a);
            }
        }
        worst = worst.max(acc.truncate(big).max_diff(&probe.truncate(big)));
    }
    Ok(worst)
}

/// Compare ε^{n;λ}(u) with the Taylor coefficients of z ↦ g_λ(u − z) in the
/// ε_{n;λ}(z) = (−z)^n basis, n = 0..=N. The Taylor side comes from a
/// Cauchy integral of the closed kernel. Deviations are relative to
/// max(1, |coefficient|).
pub fn green_series_check(lambda: C64, p: &EllipticParams, order: usize, u: C64) -> Result<f64> {
    let rho = p.tau().norm().min(1.0);
    if !(u.norm() > 0.0 && u.norm() < rho) {
        return Err(Error::Domain(format!("need 0 < |u| < min(1, |tau|) = {rho}, got {}", u.norm())));
    }
    if order < 4 {
        return Err(Error::Domain(format!("series order must be at least 4, got {order}")));
    }
    let ratio = u.norm() / p.shortest_period();
    let extra = if ratio < 1.0 { (40.0 / -ratio.ln()).ceil() as usize } else { MAX_INTERNAL_DEGREE };
    let internal = (order + extra).min(MAX_INTERNAL_DEGREE);
    let f = kernel_laurent(lambda, p, internal + order)?;
    let kernel = |w: C64| if lambda == ZERO { g0(w, p) } else { g_lambda(w, lambda, p) };
    let r = 0.5 * u.norm();
    let mut worst = 0.0f64;
    for n in 0..=order {
        let eps = scaled_derivative(&f, n, internal as i64).eval(u);
        let taylor = circle_pairing(|z| Ok(kernel(u - z)? * z.powi(-(n as i32) - 1)), r, 256)?;
        let want = if n % 2 == 0 { taylor } else { -taylor };
        worst = worst.max((eps - want).norm() / want.norm().max(1.0));
    }
    Ok(worst)
}
