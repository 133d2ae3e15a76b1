//! Round-trip power retention, finesse and linewidth of the diffraction-only loss model.
//!
//! Linewidths are FWHM in ordinary frequency (Hz). Angular and half-width
//! conversions go through [`angular`] and [`half_width`] only.

use serde::{Deserialize, Serialize};

use crate::error::{domain, CavityError, Result};
use crate::modes::{clipped_power, ModeIndex};
use crate::numerics::QuadratureSettings;
use crate::optics::{free_spectral_range, mirror_waist, BeamGeometry, CavityGeometry, OpticalConstants};
use crate::scalar::Scalar;

/// Fraction of intracavity power surviving one round trip.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct RoundTrip<T> {
    rho: T,
}

impl<T: Scalar> RoundTrip<T> {
    pub fn new(rho: T) -> Result<Self> {
        if !(rho > T::zero() && rho < T::one()) {
            return domain(format!("round-trip power fraction must lie in (0, 1), got {rho}"));
        }
        Ok(Self { rho })
    }

    /// Both mirrors at `reflectivity` times a clipping factor in `(0, 1]`.
    pub fn from_clipping(reflectivity: T, clipping: T) -> Result<Self> {
        if !(reflectivity > T::zero() && reflectivity < T::one()) {
            return domain(format!("mirror reflectivity must lie in (0, 1), got {reflectivity}"));
        }
        Self::new(reflectivity.sq() * clipping)
    }

    pub fn rho(&self) -> T {
        self.rho
    }
}

/// `ρ = ρ0 (1 - exp(-2a²/w²))²` with `ρ0 = reflectivity²`.
pub fn round_trip_power<T: Scalar>(mirror_reflectivity: T, aperture: T, w_mirror: T) -> Result<RoundTrip<T>> {
    if !(aperture > T::zero()) || !(w_mirror > T::zero()) {
        return domain(format!(
            "aperture and beam radius must be positive, got a = {aperture}, w = {w_mirror}"
        ));
    }
    let enclosed = -(-T::two() * aperture.sq() / w_mirror.sq()).exp_m1();
    RoundTrip::from_clipping(mirror_reflectivity, enclosed.sq())
}

/// `F = π / (2 asin((1 - √ρ) / (2 ρ^{1/4})))`.
pub fn finesse<T: Scalar>(rt: RoundTrip<T>) -> Result<T> {
    let rho = rt.rho();
    let arg = (T::one() - rho.sqrt()) / (T::two() * rho.sqrt().sqrt());
    if arg >= T::one() {
        return Err(CavityError::SubUnityFinesse { rho: rho.as_f64() });
    }
    Ok(T::PI() / (T::two() * arg.asin()))
}

/// `κ = c / (2 L F)`, FWHM in Hz.
pub fn linewidth<T: Scalar>(geometry: &CavityGeometry<T>, finesse: T, constants: &OpticalConstants<T>) -> Result<T> {
    if !(finesse > T::zero()) {
        return domain(format!("finesse must be positive, got {finesse}"));
    }
    Ok(free_spectral_range(geometry, constants) / finesse)
}

/// Fundamental-mode linewidth using the Gaussian closed form for the clipping.
pub fn fundamental_linewidth<T: Scalar>(geometry: &CavityGeometry<T>, constants: &OpticalConstants<T>) -> Result<T> {
    let w = mirror_waist(geometry, constants)?;
    let rt = round_trip_power(geometry.mirror_reflectivity(), geometry.aperture_radius(), w)?;
    linewidth(geometry, finesse(rt)?, constants)
}

/// Finesse of mode `index`, with its own aperture clipping.
pub fn per_mode_finesse<T: Scalar>(
    index: ModeIndex,
    geometry: &CavityGeometry<T>,
    beam: &BeamGeometry<T>,
    quadrature: &QuadratureSettings<T>,
) -> Result<T> {
    let clip = clipped_power(
        index,
        beam,
        geometry.aperture_radius(),
        geometry.mirror_position(),
        quadrature,
    )?;
    finesse(RoundTrip::from_clipping(geometry.mirror_reflectivity(), clip)?)
}

/// `κ_{l,p} = c / (2 L F_{l,p})`.
pub fn per_mode_linewidth<T: Scalar>(
    index: ModeIndex,
    geometry: &CavityGeometry<T>,
    beam: &BeamGeometry<T>,
    constants: &OpticalConstants<T>,
    quadrature: &QuadratureSettings<T>,
) -> Result<T> {
    linewidth(
        geometry,
        per_mode_finesse(index, geometry, beam, quadrature)?,
        constants,
    )
}

/// Ordinary-frequency width to angular frequency (`× 2π`).
pub fn angular<T: Scalar>(frequency: T) -> T {
    T::TAU() * frequency
}

/// FWHM to half width at half maximum.
pub fn half_width<T: Scalar>(fwhm: T) -> T {
    fwhm * T::half()
}
