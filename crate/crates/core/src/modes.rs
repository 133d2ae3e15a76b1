//! Laguerre-Gaussian cavity modes.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{CavityError, Result};
use crate::numerics::{laguerre, QuadratureSettings};
use crate::optics::{BeamGeometry, BeamSample, CavityGeometry, OpticalConstants};
use crate::scalar::Scalar;

/// Transverse mode label: azimuthal `l`, radial `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeIndex {
    pub l: i32,
    pub p: u32,
}

impl ModeIndex {
    pub const FUNDAMENTAL: ModeIndex = ModeIndex { l: 0, p: 0 };

    pub fn new(l: i32, p: u32) -> Self {
        Self { l, p }
    }

    pub fn radial(p: u32) -> Self {
        Self { l: 0, p }
    }

    pub fn abs_l(&self) -> u32 {
        self.l.unsigned_abs()
    }

    /// `|l| + 2p`, the transverse order entering the mode spacing.
    pub fn order(&self) -> u32 {
        self.abs_l() + 2 * self.p
    }
}

/// A Laguerre-Gaussian mode bound to a beam, normalized over the transverse plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseMode<T> {
    pub index: ModeIndex,
    pub beam: BeamGeometry<T>,
    normalization: T,
}

impl<T: Scalar> TransverseMode<T> {
    pub fn new(index: ModeIndex, beam: BeamGeometry<T>) -> Self {
        Self {
            index,
            beam,
            normalization: normalization(index),
        }
    }

    /// `C_{l,p} = sqrt(2 p! / (π (p + |l|)!))`.
    pub fn normalization(&self) -> T {
        self.normalization
    }

    /// Real radial amplitude (no phase factors) at radius `r` for the beam sample `s`.
    pub fn radial_amplitude(&self, r: T, s: &BeamSample<T>) -> T {
        let w = s.waist;
        let l = self.index.abs_l();
        let rho = r / w;
        let x = T::two() * rho * rho;
        let power = (T::two().sqrt() * rho).powi(l as i32);
        self.normalization / w * power * (-rho * rho).exp() * laguerre(self.index.p, T::from_u32(l).unwrap(), x)
    }

    /// Complex field at `(r, φ, z)`.
    pub fn field(&self, r: T, phi: T, z: T) -> Complex<T> {
        let s = self.beam.beam_at(z);
        let amplitude = self.radial_amplitude(r, &s);
        let k = self.beam.wavenumber();
        let gouy_order = T::from_u32(2 * self.index.p + self.index.abs_l() + 1).unwrap();
        let phase = k * r * r / (T::two() * s.curvature_radius) + T::from_i32(self.index.l).unwrap() * phi
            - gouy_order * s.gouy_phase;
        Complex::from_polar(amplitude, phase)
    }

    /// Radius beyond which the mode carries negligible power, in units of `r`.
    pub fn far_radius(&self, z: T) -> T {
        let w = self.beam.beam_at(z).waist;
        let x_far = T::from_u32(4 * self.index.p + 2 * self.index.abs_l() + 130).unwrap();
        w * (x_far * T::half()).sqrt()
    }
}

fn normalization<T: Scalar>(index: ModeIndex) -> T {
    // ln(p! / (p + |l|)!) = -Σ_{k=p+1}^{p+|l|} ln k
    let log_ratio: f64 = -((index.p + 1)..=(index.p + index.abs_l()))
        .map(|k| (k as f64).ln())
        .sum::<f64>();
    T::lit((2.0 / std::f64::consts::PI).sqrt() * (0.5 * log_ratio).exp())
}

/// Laguerre-Gaussian field `Ψ_{l,p}(r, φ, z)`.
pub fn lg_field<T: Scalar>(mode: &TransverseMode<T>, r: T, phi: T, z: T) -> Complex<T> {
    mode.field(r, phi, z)
}

/// Frequency offset of mode `index` from the fundamental of the same longitudinal order.
pub fn mode_frequency_shift<T: Scalar>(
    index: ModeIndex,
    geometry: &CavityGeometry<T>,
    constants: &OpticalConstants<T>,
) -> Result<T> {
    if !geometry.is_stable() {
        return Err(CavityError::UnstableGeometry {
            length: geometry.length().as_f64(),
            roc: geometry.mirror_roc().as_f64(),
        });
    }
    let length = geometry.length();
    // arccos(1 - L/R) = π - 2 asin(sqrt(d / 2R)), exact in the gap d.
    let gouy = T::PI()
        - T::two()
            * (geometry.concentric_gap() / (T::two() * geometry.mirror_roc()))
                .sqrt()
                .asin();
    let order = T::from_u32(index.order()).unwrap();
    Ok(constants.light_speed / (T::TAU() * length) * order * gouy)
}

/// Power of the normalized mode inside radius `aperture` at `z_mirror`.
pub fn enclosed_power<T: Scalar>(
    index: ModeIndex,
    beam: &BeamGeometry<T>,
    aperture: T,
    z_mirror: T,
    quadrature: &QuadratureSettings<T>,
) -> Result<T> {
    if !(aperture > T::zero()) {
        return crate::error::domain(format!("aperture must be positive, got {aperture}"));
    }
    let mode = TransverseMode::new(index, *beam);
    let sample = beam.beam_at(z_mirror);
    let upper = aperture.min(mode.far_radius(z_mirror));
    let inside: T = quadrature.integrate(
        |r| {
            let a = mode.radial_amplitude(r, &sample);
            T::TAU() * r * a * a
        },
        T::zero(),
        upper,
    )?;
    Ok(inside.min(T::one()))
}

/// Squared enclosed power, the per-round-trip clipping factor without `ρ0`.
pub fn clipped_power<T: Scalar>(
    index: ModeIndex,
    beam: &BeamGeometry<T>,
    aperture: T,
    z_mirror: T,
    quadrature: &QuadratureSettings<T>,
) -> Result<T> {
    Ok(enclosed_power(index, beam, aperture, z_mirror, quadrature)?.sq())
}
