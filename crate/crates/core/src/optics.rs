//! Physical constants, symmetric two-mirror cavity geometry and Gaussian beams.
//!
//! Axial coordinates put the cavity center at `z = 0` and the mirrors at
//! `z = ±L/2`. The cavity length is stored as the concentric gap `d = 2R - L`
//! because near the concentric point `L` and `2R` agree to many digits and
//! every quantity of interest (Rayleigh range, mode spacing) depends on `d`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, CavityError, Result};
use crate::scalar::Scalar;

/// Speed of light in vacuum, m/s.
pub const LIGHT_SPEED: f64 = 299_792_458.0;

/// Default operating wavelength (Rb D2 region), m.
pub const DEFAULT_WAVELENGTH: f64 = 780e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpticalConstants<T> {
    pub wavelength: T,
    pub light_speed: T,
}

impl<T: Scalar> OpticalConstants<T> {
    pub fn new(wavelength: T) -> Result<Self> {
        if !(wavelength > T::zero()) || !wavelength.is_finite() {
            return domain(format!("wavelength must be positive, got {wavelength}"));
        }
        Ok(Self {
            wavelength,
            light_speed: T::lit(LIGHT_SPEED),
        })
    }

    /// Vacuum wavenumber `2π/λ`.
    pub fn wavenumber(&self) -> T {
        T::TAU() / self.wavelength
    }
}

impl<T: Scalar> Default for OpticalConstants<T> {
    fn default() -> Self {
        Self {
            wavelength: T::lit(DEFAULT_WAVELENGTH),
            light_speed: T::lit(LIGHT_SPEED),
        }
    }
}

/// Symmetric cavity of two identical spherical mirrors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityGeometry<T> {
    mirror_roc: T,
    concentric_gap: T,
    aperture_radius: T,
    mirror_reflectivity: T,
}

impl<T: Scalar> CavityGeometry<T> {
    /// Builds a cavity from its distance `gap = 2R - L` to the concentric point.
    pub fn from_gap(mirror_roc: T, gap: T, aperture_radius: T, mirror_reflectivity: T) -> Result<Self> {
        if !(mirror_roc > T::zero()) || !mirror_roc.is_finite() {
            return domain(format!("mirror radius of curvature must be positive, got {mirror_roc}"));
        }
        if !(gap >= T::zero()) || !(gap < T::two() * mirror_roc) {
            return Err(CavityError::UnstableGeometry {
                length: (T::two() * mirror_roc - gap).as_f64(),
                roc: mirror_roc.as_f64(),
            });
        }
        if !(aperture_radius > T::zero()) {
            return domain(format!("aperture radius must be positive, got {aperture_radius}"));
        }
        if !(mirror_reflectivity > T::zero() && mirror_reflectivity < T::one()) {
            return domain(format!(
                "mirror reflectivity must lie in (0, 1), got {mirror_reflectivity}"
            ));
        }
        Ok(Self {
            mirror_roc,
            concentric_gap: gap,
            aperture_radius,
            mirror_reflectivity,
        })
    }

    pub fn from_length(mirror_roc: T, length: T, aperture_radius: T, mirror_reflectivity: T) -> Result<Self> {
        if !(length > T::zero()) || !(length <= T::two() * mirror_roc) {
            return Err(CavityError::UnstableGeometry {
                length: length.as_f64(),
                roc: mirror_roc.as_f64(),
            });
        }
        Self::from_gap(
            mirror_roc,
            T::two() * mirror_roc - length,
            aperture_radius,
            mirror_reflectivity,
        )
    }

    pub fn mirror_roc(&self) -> T {
        self.mirror_roc
    }

    pub fn length(&self) -> T {
        T::two() * self.mirror_roc - self.concentric_gap
    }

    /// `d = 2R - L`, zero at the concentric point.
    pub fn concentric_gap(&self) -> T {
        self.concentric_gap
    }

    pub fn aperture_radius(&self) -> T {
        self.aperture_radius
    }

    pub fn mirror_reflectivity(&self) -> T {
        self.mirror_reflectivity
    }

    /// Axial position of the mirrors relative to the cavity center.
    pub fn mirror_position(&self) -> T {
        self.length() * T::half()
    }

    /// True for `0 < L < 2R`.
    pub fn is_stable(&self) -> bool {
        self.concentric_gap > T::zero() && self.concentric_gap < T::two() * self.mirror_roc
    }

    pub fn with_aperture(mut self, aperture_radius: T) -> Result<Self> {
        self.aperture_radius = aperture_radius;
        Self::from_gap(
            self.mirror_roc,
            self.concentric_gap,
            aperture_radius,
            self.mirror_reflectivity,
        )
    }

    fn unstable(&self) -> CavityError {
        CavityError::UnstableGeometry {
            length: self.length().as_f64(),
            roc: self.mirror_roc.as_f64(),
        }
    }
}

/// Fundamental Gaussian beam: waist, waist location and Rayleigh range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamGeometry<T> {
    waist_radius: T,
    waist_position: T,
    rayleigh_range: T,
    wavelength: T,
}

/// Beam parameters evaluated at one axial position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSample<T> {
    pub waist: T,
    /// Wavefront radius of curvature; `+∞` at the waist.
    pub curvature_radius: T,
    pub gouy_phase: T,
}

impl<T: Scalar> BeamGeometry<T> {
    pub fn new(waist_radius: T, waist_position: T, wavelength: T) -> Result<Self> {
        if !(waist_radius > T::zero()) || !waist_radius.is_finite() {
            return domain(format!("beam waist must be positive, got {waist_radius}"));
        }
        if !(wavelength > T::zero()) {
            return domain(format!("wavelength must be positive, got {wavelength}"));
        }
        Ok(Self {
            waist_radius,
            waist_position,
            rayleigh_range: T::PI() * waist_radius.sq() / wavelength,
            wavelength,
        })
    }

    /// Beam with a given Rayleigh range; the waist follows from `w0² = λ z_R / π`.
    pub fn from_rayleigh_range(rayleigh_range: T, waist_position: T, wavelength: T) -> Result<Self> {
        if !(rayleigh_range > T::zero()) {
            return domain(format!("Rayleigh range must be positive, got {rayleigh_range}"));
        }
        Ok(Self {
            waist_radius: (wavelength * rayleigh_range / T::PI()).sqrt(),
            waist_position,
            rayleigh_range,
            wavelength,
        })
    }

    pub fn waist_radius(&self) -> T {
        self.waist_radius
    }

    pub fn waist_position(&self) -> T {
        self.waist_position
    }

    pub fn rayleigh_range(&self) -> T {
        self.rayleigh_range
    }

    pub fn wavelength(&self) -> T {
        self.wavelength
    }

    pub fn wavenumber(&self) -> T {
        T::TAU() / self.wavelength
    }

    /// Waist, curvature and Gouy phase at axial position `z`.
    pub fn beam_at(&self, z: T) -> BeamSample<T> {
        self.beam_at_offset(z - self.waist_position)
    }

    /// Same as [`beam_at`](Self::beam_at) with `dz` measured from the waist.
    pub fn beam_at_offset(&self, dz: T) -> BeamSample<T> {
        let zr = self.rayleigh_range;
        let ratio = dz / zr;
        let curvature_radius = if dz == T::zero() {
            T::infinity()
        } else {
            dz + zr.sq() / dz
        };
        BeamSample {
            waist: self.waist_radius * (T::one() + ratio.sq()).sqrt(),
            curvature_radius,
            gouy_phase: ratio.atan(),
        }
    }
}

/// Fundamental mode of a symmetric cavity, waist at the cavity center.
pub fn fundamental_mode<T: Scalar>(
    geometry: &CavityGeometry<T>,
    constants: &OpticalConstants<T>,
) -> Result<BeamGeometry<T>> {
    if !geometry.is_stable() {
        return Err(geometry.unstable());
    }
    // z_R² = (L/2)(R - L/2) with R - L/2 = d/2.
    let half = geometry.length() * T::half();
    let zr = (half * geometry.concentric_gap() * T::half()).sqrt();
    BeamGeometry::from_rayleigh_range(zr, T::zero(), constants.wavelength)
}

/// Beam radius of the fundamental mode on the mirrors.
pub fn mirror_waist<T: Scalar>(geometry: &CavityGeometry<T>, constants: &OpticalConstants<T>) -> Result<T> {
    let beam = fundamental_mode(geometry, constants)?;
    Ok(beam.beam_at(geometry.mirror_position()).waist)
}

/// `u = 2 w / L`.
pub fn focusing_parameter<T: Scalar>(w_mirror: T, length: T) -> T {
    T::two() * w_mirror / length
}

pub fn free_spectral_range<T: Scalar>(geometry: &CavityGeometry<T>, constants: &OpticalConstants<T>) -> T {
    constants.light_speed / (T::two() * geometry.length())
}

/// Focusing parameter of the fundamental mode for a cavity with gap `gap`.
fn focusing_for_gap<T: Scalar>(roc: T, gap: T, wavelength: T) -> T {
    let x = roc - gap * T::half();
    // w_m² = (λR/π) √(x / (R - x)), R - x = d/2
    let w2 = wavelength * roc / T::PI() * (x / (gap * T::half())).sqrt();
    w2.sqrt() / x
}

/// Concentric gap on the near-concentric branch whose fundamental mode has
/// focusing parameter `u`.
///
/// `u(L)` is smallest at `L = 3R/2` and rises monotonically from there to
/// the concentric limit, so the branch is `3R/2 <= L < 2R`.
pub fn gap_for_focusing<T: Scalar>(mirror_roc: T, u: T, constants: &OpticalConstants<T>) -> Result<T> {
    if !(u > T::zero()) || !u.is_finite() {
        return domain(format!("focusing parameter must be positive, got {u}"));
    }
    let lambda = constants.wavelength;
    let widest = mirror_roc * T::half();
    let u_min = focusing_for_gap(mirror_roc, widest, lambda);
    if u < u_min {
        return domain(format!(
            "focusing parameter {u} below the branch minimum {u_min} for R = {mirror_roc} m"
        ));
    }
    // The x = R estimate bounds the true gap from below.
    let mut lo = (T::two() * lambda.sq() / (T::PI().sq() * u.powi(4) * mirror_roc)).min(widest);
    let mut hi = widest;
    if focusing_for_gap(mirror_roc, lo, lambda) < u {
        return Ok(lo);
    }
    for _ in 0..400 {
        let mid = (lo * hi).sqrt();
        if !(mid > lo && mid < hi) {
            break;
        }
        if focusing_for_gap(mirror_roc, mid, lambda) > u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

/// Cavity whose fundamental mode has focusing parameter `u`.
pub fn geometry_for_focusing<T: Scalar>(
    mirror_roc: T,
    u: T,
    aperture_radius: T,
    mirror_reflectivity: T,
    constants: &OpticalConstants<T>,
) -> Result<CavityGeometry<T>> {
    let gap = gap_for_focusing(mirror_roc, u, constants)?;
    CavityGeometry::from_gap(mirror_roc, gap, aperture_radius, mirror_reflectivity)
}
