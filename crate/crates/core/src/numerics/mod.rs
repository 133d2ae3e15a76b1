//! Special functions, quadrature, interpolation and scalar optimization.

mod gamma;
mod interp;
mod laguerre;
mod optimize;
mod quadrature;

pub use gamma::{gamma, upper_incomplete_gamma, upper_incomplete_gamma_scaled};
pub use interp::MonotoneCubic;
pub use laguerre::laguerre;
pub use optimize::{bracket_maximum, golden_section_max, maximize};
pub use quadrature::{
    integrate_radial, Integrand, QuadratureRule, QuadratureSettings, DEFAULT_ORDER, DEFAULT_REL_TOL, MAX_PANELS,
};
