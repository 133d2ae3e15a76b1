//! Ellipsoidal (anaclastic) cavity lens design and aberration check.
//!
//! The front face is the ellipsoid `(1 - z/a)² + (r/b)² = 1` with its vertex
//! at `z = 0`. Its far focus lies at `z = f`, and the reflective back face is
//! a sphere of radius `R_m` centered on that focus. A plane wave entering the
//! front face therefore reaches the mirror with a flat (spherical) phase.
//!
//! The hyperbola form `(1 - z/a)² - (r/b)² = 1` sometimes quoted for this
//! surface cannot reproduce the half-axes or the `1/n` eccentricity; only the
//! ellipse does.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::numerics::golden_section_max;
use crate::optics::CavityGeometry;
use crate::raytrace::{
    fan_max_retardance, retardance_anaclastic, LensTrain, SurfaceProfile, WavefrontProfile, DEFAULT_SAMPLES,
};
use crate::scalar::Scalar;

pub const DEFAULT_FOCAL_LENGTH: f64 = 10e-3;
pub const DEFAULT_INDEX: f64 = 1.76583;
pub const DEFAULT_MIRROR_ROC: f64 = 5.5e-3;
pub const DEFAULT_REFLECTIVITY: f64 = 0.9936;
pub const DEFAULT_APERTURE: f64 = 4e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnaclasticPrescription<T> {
    pub focal_length: T,
    pub refractive_index: T,
    pub half_axis_a: T,
    pub half_axis_b: T,
    pub mirror_roc: T,
    pub mirror_reflectivity: T,
}

impl<T: Scalar> AnaclasticPrescription<T> {
    /// `√(a² - b²) / a`, equal to `1/n` for a valid design.
    pub fn eccentricity(&self) -> T {
        (self.half_axis_a.sq() - self.half_axis_b.sq()).sqrt() / self.half_axis_a
    }

    /// Axial position of the mirror vertex.
    pub fn mirror_vertex_z(&self) -> T {
        self.focal_length - self.mirror_roc
    }

    /// Length of the cavity formed by two such lenses sharing the focus.
    pub fn concentric_length(&self) -> T {
        T::two() * self.mirror_roc
    }

    /// Radius of curvature of the ellipsoid at its vertex, `b²/a`.
    pub fn vertex_roc(&self) -> T {
        self.half_axis_b.sq() / self.half_axis_a
    }

    pub fn front_surface(&self) -> Result<SurfaceProfile<T>> {
        SurfaceProfile::ellipsoid(self.half_axis_a, self.half_axis_b, T::zero(), self.half_axis_b)
    }

    /// Lens with the design front face and a mirror clear aperture `aperture`.
    pub fn lens(&self, aperture: T) -> Result<LensTrain<T>> {
        self.lens_with_front(self.front_surface()?, aperture)
    }

    /// Same lens with `front` substituted for the ellipsoid.
    pub fn lens_with_front(&self, front: SurfaceProfile<T>, aperture: T) -> Result<LensTrain<T>> {
        if !(aperture > T::zero() && aperture < self.mirror_roc) {
            return domain(format!(
                "mirror aperture must lie in (0, R_m = {}), got {aperture}",
                self.mirror_roc
            ));
        }
        Ok(LensTrain {
            front,
            index: self.refractive_index,
            mirror_roc: self.mirror_roc,
            mirror_center_z: self.focal_length,
            mirror_aperture: aperture,
        })
    }

    /// Front-face height whose ray reaches mirror height `r_mirror` in the ideal design.
    pub fn entrance_height(&self, r_mirror: T) -> Result<T> {
        let front = self.front_surface()?;
        let mirror_height = |h: T| {
            let z = front.sag(h).unwrap_or(self.half_axis_a);
            let theta = h.atan2(self.focal_length - z);
            self.mirror_roc * theta.sin()
        };
        if !(r_mirror >= T::zero()) || r_mirror > mirror_height(self.half_axis_b) {
            return domain(format!(
                "mirror height {r_mirror} is not reachable through the front face"
            ));
        }
        let (mut lo, mut hi) = (T::zero(), self.half_axis_b);
        for _ in 0..200 {
            let mid = T::half() * (lo + hi);
            if !(mid > lo && mid < hi) {
                break;
            }
            if mirror_height(mid) < r_mirror {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(T::half() * (lo + hi))
    }

    /// Sphere through the vertex minimizing the squared sag error over the
    /// front-face heights used by mirror aperture `aperture`.
    pub fn best_fit_sphere(&self, aperture: T) -> Result<SurfaceProfile<T>> {
        let front = self.front_surface()?;
        let h_max = self.entrance_height(aperture)?;
        let n = 200;
        let heights: Vec<T> = (0..=n)
            .map(|i| h_max * T::from_usize_lossy(i) / T::from_usize_lossy(n))
            .collect();
        let target: Vec<T> = heights.iter().map(|&h| front.sag(h).expect("h <= b")).collect();
        let misfit = |roc: T| {
            -heights
                .iter()
                .zip(&target)
                .map(|(&h, &z)| {
                    let q = (roc.sq() - h.sq()).max(T::zero());
                    (h.sq() / (roc + q.sqrt()) - z).sq()
                })
                .fold(T::zero(), |a, b| a + b)
        };
        let lo = self.vertex_roc().max(h_max);
        let (roc, _) = golden_section_max(misfit, lo, T::lit(10.0) * self.vertex_roc().max(h_max), T::lit(1e-12));
        SurfaceProfile::sphere(roc, T::zero(), self.half_axis_b.min(roc))
    }
}

/// Ellipsoid half-axes for focal length `f` and index `n`, with the mirror
/// centered on the focus.
pub fn design<T: Scalar>(focal_length: T, refractive_index: T, mirror_roc: T) -> Result<AnaclasticPrescription<T>> {
    design_with_reflectivity(focal_length, refractive_index, mirror_roc, T::lit(DEFAULT_REFLECTIVITY))
}

pub fn design_with_reflectivity<T: Scalar>(
    focal_length: T,
    refractive_index: T,
    mirror_roc: T,
    mirror_reflectivity: T,
) -> Result<AnaclasticPrescription<T>> {
    let n = refractive_index;
    let f = focal_length;
    if !(n > T::one()) || !n.is_finite() {
        return domain(format!("refractive index must exceed 1, got {n}"));
    }
    if !(f > T::zero()) || !f.is_finite() {
        return domain(format!("focal length must be positive, got {f}"));
    }
    if !(mirror_roc > T::zero() && mirror_roc < f) {
        return domain(format!("mirror radius must lie in (0, f = {f}), got {mirror_roc}"));
    }
    if !(mirror_reflectivity > T::zero() && mirror_reflectivity < T::one()) {
        return domain(format!(
            "mirror reflectivity must lie in (0, 1), got {mirror_reflectivity}"
        ));
    }
    Ok(AnaclasticPrescription {
        focal_length: f,
        refractive_index: n,
        half_axis_a: f * n / (n + T::one()),
        half_axis_b: f * ((n - T::one()) / (n + T::one())).sqrt(),
        mirror_roc,
        mirror_reflectivity,
    })
}

/// Symmetric cavity of two lenses `gap` short of concentric.
pub fn concentric_cavity<T: Scalar>(
    prescription: &AnaclasticPrescription<T>,
    gap: T,
    aperture: T,
) -> Result<CavityGeometry<T>> {
    CavityGeometry::from_gap(prescription.mirror_roc, gap, aperture, prescription.mirror_reflectivity)
}

/// Traced retardance at the mirror for a collimated input, out to `aperture`.
pub fn retardance<T: Scalar>(
    prescription: &AnaclasticPrescription<T>,
    aperture: T,
    wavenumber: T,
) -> Result<WavefrontProfile<T>> {
    retardance_anaclastic(&prescription.lens(aperture)?, aperture, DEFAULT_SAMPLES, wavenumber)
}

/// Largest `|φ(r)|` over the mirror aperture.
pub fn verify<T: Scalar>(prescription: &AnaclasticPrescription<T>, aperture: T, wavenumber: T) -> Result<T> {
    if aperture == T::zero() {
        return Ok(T::zero());
    }
    if aperture > prescription.half_axis_b {
        return domain(format!(
            "aperture {aperture} exceeds the ellipsoid half-axis b = {}",
            prescription.half_axis_b
        ));
    }
    Ok(retardance(prescription, aperture, wavenumber)?.max_abs())
}

/// Largest `|φ|` when `front` replaces the ellipsoid, for the input beam that
/// fills mirror aperture `aperture` in the design.
pub fn verify_substitute<T: Scalar>(
    prescription: &AnaclasticPrescription<T>,
    front: SurfaceProfile<T>,
    aperture: T,
    wavenumber: T,
) -> Result<T> {
    let h_max = prescription.entrance_height(aperture)?;
    let lens = prescription.lens_with_front(front, aperture)?;
    fan_max_retardance(&lens, h_max, 4 * DEFAULT_SAMPLES, wavenumber)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raytrace::SurfaceKind;
    use proptest::prelude::*;

    const MM: f64 = 1e-3;

    fn k() -> f64 {
        std::f64::consts::TAU / 780e-9
    }

    fn default_design() -> AnaclasticPrescription<f64> {
        design(DEFAULT_FOCAL_LENGTH, DEFAULT_INDEX, DEFAULT_MIRROR_ROC).unwrap()
    }

    #[test]
    fn half_axes() {
        let p = default_design();
        assert!((p.half_axis_a / MM - 6.3844).abs() < 1e-4);
        assert!((p.half_axis_b / MM - 5.2620).abs() < 1e-4);
        assert!((p.eccentricity() - 0.56631).abs() < 1e-5);
        let q = design(20.0 * MM, 1.5, 5.0 * MM).unwrap();
        assert!((q.half_axis_a / MM - 12.0).abs() < 1e-12);
        assert!((q.half_axis_b / MM - 8.944).abs() < 1e-3);
    }

    #[test]
    fn high_index_limit() {
        let p = design(10.0 * MM, 1e9, 5.0 * MM).unwrap();
        assert!((p.half_axis_a / (10.0 * MM) - 1.0).abs() < 1e-8);
        assert!((p.half_axis_b / (10.0 * MM) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn invalid_inputs() {
        assert!(design(10.0 * MM, 1.0, 5.0 * MM).is_err());
        assert!(design(10.0 * MM, 0.8, 5.0 * MM).is_err());
        assert!(design(-1.0, 1.5, 5.0 * MM).is_err());
        assert!(design(10.0 * MM, 1.5, 10.0 * MM).is_err());
    }

    #[test]
    fn concentric_geometry() {
        let p = default_design();
        let g = concentric_cavity(&p, 0.0, 4.0 * MM).unwrap();
        assert!((g.length() - 11.0 * MM).abs() < 1e-15);
        let g = concentric_cavity(&p, 2.4e-6, 4.0 * MM).unwrap();
        assert!((g.length() / MM - 10.9976).abs() < 1e-12);
    }

    #[test]
    fn design_is_aberration_free() {
        let p = default_design();
        let max = verify(&p, 4.0 * MM, k()).unwrap();
        assert!(max < std::f64::consts::TAU / 1000.0, "{max}");
        assert_eq!(verify(&p, 0.0, k()).unwrap(), 0.0);
        assert!(verify(&p, 6.0 * MM, k()).is_err());
    }

    #[test]
    fn spherical_substitutes_aberrate() {
        let p = default_design();
        let aperture = 4.0 * MM;
        let vertex = SurfaceProfile::sphere(p.vertex_roc(), 0.0, p.half_axis_b.min(p.vertex_roc())).unwrap();
        let max = verify_substitute(&p, vertex, aperture, k()).unwrap();
        assert!(max > std::f64::consts::TAU, "{max}");

        let fit = p.best_fit_sphere(aperture).unwrap();
        let SurfaceKind::Sphere { roc, .. } = fit.kind else {
            panic!()
        };
        assert!(roc > p.vertex_roc());
        let max = verify_substitute(&p, fit, aperture, k()).unwrap();
        assert!(max > std::f64::consts::TAU / 10.0, "{max}");

        let ideal = verify_substitute(&p, p.front_surface().unwrap(), aperture, k()).unwrap();
        assert!(ideal < std::f64::consts::TAU / 1000.0, "{ideal}");
    }

    #[test]
    fn perturbed_half_axis_aberrates() {
        let mut p = default_design();
        p.half_axis_b *= 1.01;
        let max = verify(&p, 4.0 * MM, k()).unwrap();
        assert!(max > std::f64::consts::TAU / 10.0, "{max}");
    }

    #[test]
    fn collimated_rays_cross_axis_at_focus() {
        let p = default_design();
        let lens = p.lens(4.0 * MM).unwrap();
        for h in [0.1, 1.0, 2.5, 4.0, 5.0] {
            let ray = lens.refracted(h * MM, 0).unwrap();
            let z = ray.axis_crossing().unwrap();
            assert!((z - p.focal_length).abs() < 1e-7 * p.focal_length, "h={h} z={z}");
        }
    }

    #[test]
    fn json_round_trip() {
        let p = default_design();
        let s = serde_json::to_string(&p).unwrap();
        let back: AnaclasticPrescription<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(p, back);
    }

    proptest! {
        #[test]
        fn eccentricity_is_inverse_index(f_mm in 1.0f64..50.0, n in 1.3f64..2.0) {
            let p = design(f_mm * MM, n, 0.5 * f_mm * MM).unwrap();
            prop_assert!((p.eccentricity() * n - 1.0).abs() < 1e-12);
            prop_assert!((p.half_axis_a - p.focal_length * n / (n + 1.0)).abs() < 1e-9 * p.half_axis_a);
        }
    }
}
