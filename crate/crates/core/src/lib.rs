//! Near-concentric Fabry-Perot cavity modelling.
//!
//! The crate predicts the transmission linewidth of symmetric two-mirror
//! cavities close to the concentric point, where both finite mirror apertures
//! (diffraction loss) and wavefront aberrations of the input beam broaden the
//! observed resonance. It also designs aberration-free anaclastic cavity
//! lenses and evaluates single-atom cavity-QED figures of merit.
//!
//! All numerical routines are generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to `f64`, which is what the CLI uses.

pub mod anaclastic;
pub mod cqed;
pub mod decomposition;
pub mod error;
pub mod loss;
pub mod modes;
pub mod numerics;
pub mod optics;
pub mod raytrace;
pub mod scalar;
pub mod spectrum;

pub use error::{CavityError, Result};
pub use modes::ModeIndex;
pub use optics::{OpticalConstants, DEFAULT_WAVELENGTH, LIGHT_SPEED};
pub use scalar::Scalar;

pub type OpticalConstants64 = optics::OpticalConstants<f64>;
pub type CavityGeometry64 = optics::CavityGeometry<f64>;
pub type BeamGeometry64 = optics::BeamGeometry<f64>;
pub type TransverseMode64 = modes::TransverseMode<f64>;
pub type QuadratureSettings64 = numerics::QuadratureSettings<f64>;
pub type WavefrontProfile64 = raytrace::WavefrontProfile<f64>;
pub type PlanoConcaveSubstrate64 = raytrace::PlanoConcaveSubstrate<f64>;
pub type AnaclasticPrescription64 = anaclastic::AnaclasticPrescription<f64>;
pub type AberratedInput64 = decomposition::AberratedInput<f64>;
pub type Decomposition64 = decomposition::Decomposition<f64>;
pub type Spectrum64 = spectrum::Spectrum<f64>;
pub type LineSet64 = spectrum::LineSet<f64>;
pub type CavityFamily64 = spectrum::CavityFamily<f64>;
pub type CurveSettings64 = spectrum::CurveSettings<f64>;
pub type AtomParameters64 = cqed::AtomParameters<f64>;
pub type CqedPoint64 = cqed::CqedPoint<f64>;
