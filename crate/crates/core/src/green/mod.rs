//! Elliptic Green kernels: closed forms, cylinder Fourier forms, the two
//! pairings and their convolution identities.

pub mod convolution;
pub mod fourier;
pub mod kernels;
pub mod quadrature;

pub use convolution::{convolution_residual, ConvolutionId};
pub use fourier::{fourier_g_cyl, gamma_fourier, heat_identity_residual, HeatVariant, Sign};
pub use kernels::{dlambda_g_lambda, evaluate, g0, g_lambda, gamma_closed, KernelId, KernelValue, Strip, StripPoint};
pub use quadrature::{circle_pairing, segment_pairing};
