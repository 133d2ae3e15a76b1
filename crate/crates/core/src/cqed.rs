//! Single-atom cavity-QED figures of merit versus focusing parameter.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::loss::{angular, finesse, round_trip_power};
use crate::numerics::{maximize, upper_incomplete_gamma_scaled};
use crate::optics::{free_spectral_range, mirror_waist, OpticalConstants};
use crate::scalar::Scalar;
use crate::spectrum::AnaclasticFamily;

/// Rb D2 natural linewidth, 2π × 6.067 MHz.
pub const RB_D2_GAMMA: f64 = std::f64::consts::TAU * 6.067e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomParameters<T> {
    /// Spontaneous decay rate, rad/s.
    pub gamma: T,
}

impl<T: Scalar> AtomParameters<T> {
    pub fn new(gamma: T) -> Result<Self> {
        if !(gamma > T::zero()) || !gamma.is_finite() {
            return domain(format!("atomic decay rate must be positive, got {gamma}"));
        }
        Ok(Self { gamma })
    }

    pub fn rubidium_d2() -> Self {
        Self {
            gamma: T::lit(RB_D2_GAMMA),
        }
    }
}

impl<T: Scalar> Default for AtomParameters<T> {
    fn default() -> Self {
        Self::rubidium_d2()
    }
}

/// Scattering ratio `R_sc(u)` of a focused dipole-matched beam.
///
/// Written with `e^x Γ(s, x)` at `x = 1/u²`, so the `e^{2/u²}` prefactor never
/// appears on its own and small `u` does not overflow.
pub fn scattering_ratio<T: Scalar>(u: T) -> Result<T> {
    if !(u > T::zero()) || !u.is_finite() {
        return domain(format!("focusing parameter must be positive, got {u}"));
    }
    let x = (u * u).recip();
    let quarter = T::lit(0.25);
    let g_minus = upper_incomplete_gamma_scaled(-quarter, x)?;
    let g_plus = upper_incomplete_gamma_scaled(quarter, x)?;
    Ok(T::lit(0.75) / u.powi(3) * (g_minus + u * g_plus).sq())
}

/// `g0 = √(π γ c R_sc(u) / L)` in rad/s.
pub fn coupling_strength<T: Scalar>(
    u: T,
    length: T,
    atom: &AtomParameters<T>,
    constants: &OpticalConstants<T>,
) -> Result<T> {
    if !(length > T::zero()) {
        return domain(format!("cavity length must be positive, got {length}"));
    }
    Ok((T::PI() * atom.gamma * constants.light_speed * scattering_ratio(u)? / length).sqrt())
}

/// `V_eff = 3 λ² L / (4π R_sc(u))`, in units of `λ³`.
pub fn effective_mode_volume<T: Scalar>(u: T, length: T, wavelength: T) -> Result<T> {
    if !(length > T::zero() && wavelength > T::zero()) {
        return domain(format!(
            "length and wavelength must be positive, got L = {length}, λ = {wavelength}"
        ));
    }
    Ok(T::lit(3.0) * length / (T::lit(4.0) * T::PI() * wavelength * scattering_ratio(u)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CqedPoint<T> {
    pub u: T,
    pub r_sc: T,
    /// rad/s.
    pub g0: T,
    /// Angular FWHM `2π c / (2 L F)`, rad/s.
    pub kappa: T,
    pub finesse: T,
    pub cooperativity: T,
    pub v_eff_lambda3: T,
}

impl<T: Scalar> CqedPoint<T> {
    /// Relative mismatch between `C` and `g0² / (κ γ)`.
    pub fn consistency(&self, atom: &AtomParameters<T>) -> T {
        let c = self.g0.sq() / (self.kappa * atom.gamma);
        ((c - self.cooperativity) / self.cooperativity).abs()
    }
}

/// Figures of merit for the anaclastic cavity whose mode has focusing parameter `u`.
///
/// Uses the diffraction-only linewidth of the fundamental mode.
pub fn cqed_point<T: Scalar>(
    family: &AnaclasticFamily<T>,
    u: T,
    atom: &AtomParameters<T>,
    constants: &OpticalConstants<T>,
) -> Result<CqedPoint<T>> {
    let cavity = crate::spectrum::CavityFamily::Anaclastic(*family);
    let geometry = cavity.geometry(u, constants)?;
    let w = mirror_waist(&geometry, constants)?;
    let f = finesse(round_trip_power(
        geometry.mirror_reflectivity(),
        geometry.aperture_radius(),
        w,
    )?)?;
    let kappa = angular(free_spectral_range(&geometry, constants) / f);
    let length = geometry.length();
    let g0 = coupling_strength(u, length, atom, constants)?;
    Ok(CqedPoint {
        u,
        r_sc: scattering_ratio(u)?,
        g0,
        kappa,
        finesse: f,
        cooperativity: g0.sq() / (kappa * atom.gamma),
        v_eff_lambda3: effective_mode_volume(u, length, constants.wavelength)?,
    })
}

/// [`cqed_point`] over `us`, in input order.
pub fn cooperativity_curve<T: Scalar>(
    family: &AnaclasticFamily<T>,
    us: &[T],
    atom: &AtomParameters<T>,
    constants: &OpticalConstants<T>,
) -> Result<Vec<CqedPoint<T>>> {
    us.par_iter().map(|&u| cqed_point(family, u, atom, constants)).collect()
}

/// Focusing parameter maximizing the cooperativity inside `[lo, hi]`, to `|Δu| < 1e-4`.
///
/// A maximum at either end of the bracket is a bracket error.
pub fn optimize_u<T: Scalar>(
    family: &AnaclasticFamily<T>,
    atom: &AtomParameters<T>,
    constants: &OpticalConstants<T>,
    lo: T,
    hi: T,
) -> Result<CqedPoint<T>> {
    if !(lo > T::zero() && hi > lo) {
        return domain(format!("bracket must satisfy 0 < lo < hi, got [{lo}, {hi}]"));
    }
    let c = |u: T| {
        cqed_point(family, u, atom, constants)
            .map(|p| p.cooperativity)
            .unwrap_or(T::neg_infinity())
    };
    let (u, _) = maximize(c, lo, hi, T::lit(1e-5))?;
    cqed_point(family, u, atom, constants)
}

/// CSV with header naming units per column.
pub fn curve_to_csv<T: Scalar>(points: &[CqedPoint<T>]) -> String {
    let mut out = String::from("u,R_sc,g0_rad_s,kappa_rad_s,C,V_eff_lambda3\n");
    for p in points {
        let _ = writeln!(
            out,
            "{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}",
            p.u.as_f64(),
            p.r_sc.as_f64(),
            p.g0.as_f64(),
            p.kappa.as_f64(),
            p.cooperativity.as_f64(),
            p.v_eff_lambda3.as_f64()
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn consts() -> OpticalConstants<f64> {
        OpticalConstants::default()
    }

    #[test]
    fn scattering_ratio_values() {
        let r = scattering_ratio(0.365f64).unwrap();
        assert!((r - 0.318979).abs() < 1e-5, "{r}");
        assert!(scattering_ratio(0.0f64).is_err());
        assert!(scattering_ratio(-0.2f64).is_err());
        // Deep weak focusing stays finite.
        let tiny = scattering_ratio(0.01f64).unwrap();
        assert!(tiny > 0.0 && tiny < 1e-3);
    }

    #[test]
    fn scattering_ratio_increases() {
        let mut last = 0.0;
        for i in 1..=200 {
            let u = i as f64 / 200.0;
            let r = scattering_ratio(u).unwrap();
            assert!(r > last, "u={u}");
            last = r;
        }
    }

    #[test]
    fn direct_form_agrees_where_finite() {
        use crate::numerics::upper_incomplete_gamma;
        for &u in &[0.2f64, 0.3, 0.5, 0.9, 1.3] {
            let x = 1.0 / (u * u);
            let direct = 0.75 / u.powi(3)
                * (2.0 * x).exp()
                * (upper_incomplete_gamma(-0.25, x).unwrap() + u * upper_incomplete_gamma(0.25, x).unwrap()).powi(2);
            let r = scattering_ratio(u).unwrap();
            assert!(((direct - r) / r).abs() < 1e-10, "u={u}");
        }
    }

    #[test]
    fn mode_volume() {
        let v: f64 = effective_mode_volume(0.73, 11e-3, 780e-9).unwrap();
        assert!((v / 4100.0 - 1.0).abs() < 0.05, "{v}");
        let v1: f64 = effective_mode_volume(0.365, 11e-3, 780e-9).unwrap();
        let v2 = effective_mode_volume(0.73, 11e-3, 780e-9).unwrap();
        let ratio = scattering_ratio(0.73).unwrap() / scattering_ratio(0.365).unwrap();
        assert!((v1 / v2 / ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coupling_scaling() {
        let atom = AtomParameters::rubidium_d2();
        let c = consts();
        let g1 = coupling_strength(0.365, 11e-3, &atom, &c).unwrap();
        let g4 = coupling_strength(0.365, 44e-3, &atom, &c).unwrap();
        assert!((g1 / g4 - 2.0).abs() < 1e-12);
        let doubled = AtomParameters::new(2.0 * atom.gamma).unwrap();
        let g2 = coupling_strength(0.365, 11e-3, &doubled, &c).unwrap();
        assert!((g2 / g1 - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cooperativity_is_finesse_times_ratio() {
        let fam = AnaclasticFamily::default();
        let atom = AtomParameters::rubidium_d2();
        for i in 0..20 {
            let u = 0.05 + 0.04 * i as f64;
            let p = cqed_point(&fam, u, &atom, &consts()).unwrap();
            assert!((p.cooperativity / (p.finesse * p.r_sc) - 1.0).abs() < 1e-10);
            assert!(p.consistency(&atom) < 1e-12);
        }
    }

    #[test]
    fn optimum_is_interior() {
        let fam = AnaclasticFamily::default();
        let atom = AtomParameters::rubidium_d2();
        let best = optimize_u(&fam, &atom, &consts(), 0.05, 1.0).unwrap();
        assert!(best.u > 0.3 && best.u < 0.45, "{}", best.u);
        assert!(best.cooperativity > 120.0 && best.cooperativity < 180.0);
        assert!(optimize_u(&fam, &atom, &consts(), 0.05, 0.2).is_err());
    }
}
