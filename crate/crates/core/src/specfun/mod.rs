//! Special functions and quadrature.
//!
//! Everything here is a pure function of its arguments and safe to call from
//! many threads at once.

mod bessel;
mod gauss;
mod oscillatory;
mod quad;

pub use bessel::{bessel_k0, bessel_k0_scaled, k0_cumulative, k0_tail, EULER_GAMMA};
pub use gauss::{gauss_hermite, gauss_legendre, GaussRule};
pub use oscillatory::{euler_limit, integrate_oscillatory};
pub use quad::{integrate, Mapping, QuadArray, QuadValue, QuadratureResult, QuadratureSpec};
