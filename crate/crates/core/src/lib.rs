//! Odd theta function, elliptic Green kernels and dynamical elliptic
//! r-matrices for sl₂, with their rational and trigonometric degenerations
//! and numerical checks of the identities that tie them together.

pub mod averaging;
pub mod cnum;
pub mod degenerate;
pub mod error;
pub mod green;
pub mod rmatrix;
pub mod series;
pub mod theta;
pub mod verify;

pub use cnum::{c, format_complex, parse_complex, C64};
pub use error::{Error, PoleArg, Result};
pub use theta::{theta, theta_derivs, EllipticParams, ThetaDerivs};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/theta.md")]
    mod theta {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    mod kernels {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/rmatrix.md")]
    mod rmatrix {}
    #[doc = include_str!("../../../book/src/degenerations.md")]
    mod degenerations {}
    #[doc = include_str!("../../../book/src/averaging.md")]
    mod averaging {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
