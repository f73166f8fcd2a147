//! 4×4 dynamical r-matrices on ℂ²⊗ℂ², their 8×8 embeddings into a triple
//! tensor product, and residuals for CDYBE, rLL (central charge 0), the
//! weight-zero relation and the ordinary CYBE.

use nalgebra::{Matrix2, SMatrix};

use crate::cnum::C64;
use crate::degenerate::{build_degenerate_r, DegenerateKind, TrigParams};
use crate::error::{Error, Result};
use crate::green::kernels::{dlambda_g_lambda, g0, g_lambda};
use crate::theta::EllipticParams;

pub type Mat4 = SMatrix<C64, 4, 4>;
pub type Mat8 = SMatrix<C64, 8, 8>;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// H, E, F in the defining representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SL2Basis {
    pub h: Matrix2<C64>,
    pub e: Matrix2<C64>,
    pub f: Matrix2<C64>,
}

impl SL2Basis {
    pub fn standard() -> Self {
        Self {
            h: Matrix2::new(ONE, ZERO, ZERO, -ONE),
            e: Matrix2::new(ZERO, ONE, ZERO, ZERO),
            f: Matrix2::new(ZERO, ZERO, ONE, ZERO),
        }
    }

    /// Largest entry of [H,E]−2E, [H,F]+2F, [E,F]−H.
    pub fn relation_defect(&self) -> f64 {
        let cm = |a: &Matrix2<C64>, b: &Matrix2<C64>| a * b - b * a;
        let two = C64::new(2.0, 0.0);
        let d1 = cm(&self.h, &self.e) - self.e * two;
        let d2 = cm(&self.h, &self.f) + self.f * two;
        let d3 = cm(&self.e, &self.f) - self.h;
        [d1, d2, d3].iter().flat_map(|m| m.iter().map(|z| z.norm())).fold(0.0, f64::max)
    }
}

/// A matrix on ℂ²⊗ℂ² in the basis e₁⊗e₁, e₁⊗e₂, e₂⊗e₁, e₂⊗e₂, restricted
/// to the weight-zero block by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RMatrix4 {
    m: Mat4,
}

impl RMatrix4 {
    /// Diagonal (d₁, d₂, d₃, d₄) plus the (2,3) and (3,2) entries (1-based).
    pub fn weight_zero(diag: [C64; 4], e23: C64, e32: C64) -> Self {
        let mut m = Mat4::zeros();
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m[(1, 2)] = e23;
        m[(2, 1)] = e32;
        Self { m }
    }

    /// Accepts a dense matrix only if it vanishes outside the weight-zero block.
    pub fn from_matrix(m: Mat4) -> Result<Self> {
        for i in 0..4 {
            for j in 0..4 {
                let allowed = i == j || (i, j) == (1, 2) || (i, j) == (2, 1);
                if !allowed && m[(i, j)] != ZERO {
                    return Err(Error::Invalid(format!("entry ({}, {}) lies outside the weight-zero block", i + 1, j + 1)));
                }
            }
        }
        Ok(Self { m })
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.m
    }

    /// 1-based entry access.
    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.m[(i - 1, j - 1)]
    }

    /// Conjugate by the flip of the two tensor factors.
    pub fn swap12(&self) -> Self {
        let p = flip();
        Self { m: p * self.m * p }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { m: self.m + other.m }
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Rows of (re, im) pairs, for serialization.
    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..4).map(|i| (0..4).map(|j| self.m[(i, j)]).collect()).collect()
    }
}

fn flip() -> Mat4 {
    let mut p = Mat4::zeros();
    for a in 0..2 {
        for b in 0..2 {
            p[(2 * b + a, 2 * a + b)] = ONE;
        }
    }
    p
}

/// H⊗1 + 1⊗H.
pub fn total_h() -> Mat4 {
    Mat4::from_diagonal(&nalgebra::Vector4::new(C64::new(2.0, 0.0), ZERO, ZERO, C64::new(-2.0, 0.0)))
}

/// max |[H⊗1+1⊗H, R]|; zero by the sparsity pattern.
pub fn hhl_defect(r: &RMatrix4) -> f64 {
    let h = total_h();
    (h * r.m - r.m * h).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// The elliptic dynamical r-matrix at w = u − v.
pub fn build_r(u: C64, v: C64, lambda: C64, p: &EllipticParams) -> Result<RMatrix4> {
    let w = u - v;
    let a = g0(w, p)? * 0.5;
    Ok(RMatrix4::weight_zero([a, -a, -a, a], g_lambda(w, -lambda, p)?, g_lambda(w, lambda, p)?))
}

/// Entrywise ∂λ of `build_r`.
pub fn build_dlambda_r(u: C64, v: C64, lambda: C64, p: &EllipticParams) -> Result<RMatrix4> {
    let w = u - v;
    Ok(RMatrix4::weight_zero([ZERO; 4], -dlambda_g_lambda(w, -lambda, p)?, dlambda_g_lambda(w, lambda, p)?))
}

/// Embed a matrix on slots (i, j) of ℂ²⊗ℂ²⊗ℂ² (0-based, i ≠ j).
pub fn embed(m: &Mat4, i: usize, j: usize) -> Mat8 {
    assert!(i < 3 && j < 3 && i != j, "slots must be distinct and below 3");
    let k = 3 - i - j;
    let idx = |bits: [usize; 3]| 4 * bits[0] + 2 * bits[1] + bits[2];
    let mut out = Mat8::zeros();
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    let x = m[(2 * a + b, 2 * c + d)];
                    if x == ZERO {
                        continue;
                    }
                    for e in 0..2 {
                        let mut o = [0; 3];
                        let mut n = [0; 3];
                        o[i] = a;
                        o[j] = b;
                        o[k] = e;
                        n[i] = c;
                        n[j] = d;
                        n[k] = e;
                        out[(idx(o), idx(n))] += x;
                    }
                }
            }
        }
    }
    out
}

/// H in slot i of the triple product.
pub fn h_slot(i: usize) -> Mat8 {
    let mut out = Mat8::zeros();
    for s in 0..8 {
        let bit = (s >> (2 - i)) & 1;
        out[(s, s)] = if bit == 0 { ONE } else { -ONE };
    }
    out
}

fn comm(a: &Mat8, b: &Mat8) -> Mat8 {
    a * b - b * a
}

/// Which dynamical terms H₁∂λr₂₃, H₂∂λr₁₃, H₃∂λr₁₂ to keep.
pub type DynamicalMask = [bool; 3];

/// Relative CDYBE residual, see [`cdybe_residual_masked`].
pub fn cdybe_residual(u1: C64, u2: C64, u3: C64, lambda: C64, p: &EllipticParams) -> Result<f64> {
    cdybe_residual_masked(u1, u2, u3, lambda, p, [true; 3])
}

/// ‖Σ brackets − (H₁∂λr₂₃ − H₂∂λr₁₃ + H₃∂λr₁₂)‖_F / max(1, ‖Σ brackets‖_F),
/// keeping only the dynamical terms selected by `mask`.
pub fn cdybe_residual_masked(u1: C64, u2: C64, u3: C64, lambda: C64, p: &EllipticParams, mask: DynamicalMask) -> Result<f64> {
    let r12 = embed(build_r(u1, u2, lambda, p)?.matrix(), 0, 1);
    let r13 = embed(build_r(u1, u3, lambda, p)?.matrix(), 0, 2);
    let r23 = embed(build_r(u2, u3, lambda, p)?.matrix(), 1, 2);
    let d12 = embed(build_dlambda_r(u1, u2, lambda, p)?.matrix(), 0, 1);
    let d13 = embed(build_dlambda_r(u1, u3, lambda, p)?.matrix(), 0, 2);
    let d23 = embed(build_dlambda_r(u2, u3, lambda, p)?.matrix(), 1, 2);
    let lhs = comm(&r12, &r13) + comm(&r12, &r23) + comm(&r13, &r23);
    let mut rhs = Mat8::zeros();
    if mask[0] {
        rhs += h_slot(0) * d23;
    }
    if mask[1] {
        rhs -= h_slot(1) * d13;
    }
    if mask[2] {
        rhs += h_slot(2) * d12;
    }
    Ok((lhs - rhs).norm() / lhs.norm().max(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LSign {
    Plus,
    Minus,
}

/// L^±(x) realized as an r-matrix slice with auxiliary point w in slot 2:
/// L⁺(x) = r(x, w), L⁻(x) = −r(w, x) with slots swapped.
fn l_slice(sign: LSign, x: C64, w: C64, slot: usize, lambda: C64, p: &EllipticParams, d: bool) -> Result<Mat8> {
    let build = |a: C64, b: C64| if d { build_dlambda_r(a, b, lambda, p) } else { build_r(a, b, lambda, p) };
    Ok(match sign {
        LSign::Plus => embed(build(x, w)?.matrix(), slot, 2),
        LSign::Minus => -embed(build(w, x)?.matrix(), 2, slot),
    })
}

/// rLL residual at c = 0 with L-operators evaluated at the auxiliary point w:
/// [L₁,L₂] − ([L₁+L₂, r₁₂] + H₁∂λL₂ − H₂∂λL₁ + H₃∂λr₁₂), relative to
/// max(1, ‖[L₁,L₂]‖_F).
pub fn rll_residual(u: C64, v: C64, w: C64, lambda: C64, signs: (LSign, LSign), p: &EllipticParams) -> Result<f64> {
    let l1 = l_slice(signs.0, u, w, 0, lambda, p, false)?;
    let l2 = l_slice(signs.1, v, w, 1, lambda, p, false)?;
    let dl1 = l_slice(signs.0, u, w, 0, lambda, p, true)?;
    let dl2 = l_slice(signs.1, v, w, 1, lambda, p, true)?;
    let r = embed(build_r(u, v, lambda, p)?.matrix(), 0, 1);
    let dr = embed(build_dlambda_r(u, v, lambda, p)?.matrix(), 0, 1);
    let lhs = comm(&l1, &l2);
    let rhs = comm(&(l1 + l2), &r) + h_slot(0) * dl2 - h_slot(1) * dl1 + h_slot(2) * dr;
    Ok((lhs - rhs).norm() / lhs.norm().max(1.0))
}

/// max |[H_slot + H₃, L(x)]| for an L-slice in the given slot.
pub fn slice_hhl_defect(sign: LSign, x: C64, w: C64, slot: usize, lambda: C64, p: &EllipticParams) -> Result<f64> {
    let l = l_slice(sign, x, w, slot, lambda, p, false)?;
    let h = h_slot(slot) + h_slot(2);
    Ok(comm(&h, &l).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Non-dynamical CYBE residual for one of the degenerate matrices, relative
/// to max(1, largest single bracket).
pub fn cybe_residual(kind: DegenerateKind, u1: C64, u2: C64, u3: C64, extra: Option<TrigParams>) -> Result<f64> {
    let x = |a: C64, b: C64| build_degenerate_r(kind, a, b, extra);
    let x12 = embed(x(u1, u2)?.matrix(), 0, 1);
    let x13 = embed(x(u1, u3)?.matrix(), 0, 2);
    let x23 = embed(x(u2, u3)?.matrix(), 1, 2);
    let b = [comm(&x12, &x13), comm(&x12, &x23), comm(&x13, &x23)];
    let scale = b.iter().map(|m| m.norm()).fold(1.0, f64::max);
    Ok((b[0] + b[1] + b[2]).norm() / scale)
}
