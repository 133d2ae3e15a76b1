//! Projection of an aberrated input beam onto the cavity's radial LG modes.

use std::fmt::Write as _;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::modes::{ModeIndex, TransverseMode};
use crate::numerics::QuadratureSettings;
use crate::optics::{fundamental_mode, BeamGeometry, CavityGeometry, OpticalConstants};
use crate::raytrace::WavefrontProfile;
use crate::scalar::Scalar;

/// Default highest radial index in a decomposition.
pub const DEFAULT_P_MAX: u32 = 50;
/// Populations below this are reported as exactly zero.
pub const POPULATION_FLOOR: f64 = 1e-12;

/// Cavity fundamental mode carrying an extra radial phase `φ(r)` at the mirror.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AberratedInput<T> {
    pub beam: BeamGeometry<T>,
    pub retardance: WavefrontProfile<T>,
}

impl<T: Scalar> AberratedInput<T> {
    pub fn new(beam: BeamGeometry<T>, retardance: WavefrontProfile<T>) -> Self {
        Self { beam, retardance }
    }

    /// Input matched to the fundamental mode of `geometry`.
    pub fn for_cavity(
        geometry: &CavityGeometry<T>,
        constants: &OpticalConstants<T>,
        retardance: WavefrontProfile<T>,
    ) -> Result<Self> {
        Ok(Self::new(fundamental_mode(geometry, constants)?, retardance))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModePopulation<T> {
    pub index: ModeIndex,
    pub gamma: T,
}

/// Populations for `l = 0`, `p = 0..=p_max` and the power they leave out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition<T> {
    pub populations: Vec<ModePopulation<T>>,
    /// `1 - Σγ`.
    pub residual: T,
}

impl<T: Scalar> Decomposition<T> {
    pub fn total(&self) -> T {
        self.populations.iter().fold(T::zero(), |acc, m| acc + m.gamma)
    }

    /// CSV with header `l,p,gamma`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,p,gamma\n");
        for m in &self.populations {
            let _ = writeln!(out, "{},{},{:.11e}", m.index.l, m.index.p, m.gamma.as_f64());
        }
        out
    }
}

/// `γ = |∫∫ Ψ*_{l,p} ξ r dr dφ|²` over the disc of radius `aperture` at `z_mirror`.
///
/// The retardance is radial, so every `l != 0` mode has zero overlap.
pub fn population<T: Scalar>(
    input: &AberratedInput<T>,
    index: ModeIndex,
    aperture: T,
    z_mirror: T,
    quadrature: &QuadratureSettings<T>,
) -> Result<T> {
    if index.l != 0 {
        return Ok(T::zero());
    }
    if !(aperture > T::zero()) {
        return domain(format!("aperture must be positive, got {aperture}"));
    }
    let mode = TransverseMode::new(index, input.beam);
    let fundamental = TransverseMode::new(ModeIndex::FUNDAMENTAL, input.beam);
    let sample = input.beam.beam_at(z_mirror);
    let phase = input.retardance.interpolator();
    // Curvature and Gouy factors shared by both fields drop out of |overlap|².
    let upper = aperture.min(input.retardance.r_max()).min(mode.far_radius(z_mirror));
    let overlap: Complex<T> = quadrature.integrate(
        |r| {
            let amp = mode.radial_amplitude(r, &sample) * fundamental.radial_amplitude(r, &sample);
            Complex::from_polar(T::TAU() * r * amp, phase.eval(r))
        },
        T::zero(),
        upper,
    )?;
    let gamma = overlap.norm_sqr();
    Ok(if gamma < T::lit(POPULATION_FLOOR) {
        T::zero()
    } else {
        gamma
    })
}

/// Radial populations `p = 0..=p_max`, in order of `p`.
pub fn decompose<T: Scalar>(
    input: &AberratedInput<T>,
    p_max: u32,
    aperture: T,
    z_mirror: T,
    quadrature: &QuadratureSettings<T>,
) -> Result<Decomposition<T>> {
    let populations = (0..=p_max)
        .into_par_iter()
        .map(|p| {
            let index = ModeIndex::radial(p);
            population(input, index, aperture, z_mirror, quadrature).map(|gamma| ModePopulation { index, gamma })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut d = Decomposition {
        populations,
        residual: T::zero(),
    };
    d.residual = T::one() - d.total();
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(phase: impl Fn(f64) -> f64) -> AberratedInput<f64> {
        let beam = BeamGeometry::new(1e-3, 0.0, 780e-9).unwrap();
        let r: Vec<f64> = (0..=200).map(|i| 8e-3 * i as f64 / 200.0).collect();
        let ph = r.iter().map(|&x| phase(x)).collect();
        AberratedInput::new(beam, WavefrontProfile::new(r, ph).unwrap())
    }

    #[test]
    fn unaberrated_input_is_pure_fundamental() {
        let inp = AberratedInput::new(
            BeamGeometry::new(1e-3, 0.0, 780e-9).unwrap(),
            WavefrontProfile::flat(1.0).unwrap(),
        );
        let q = QuadratureSettings::<f64>::default();
        let d = decompose(&inp, 8, 1.0, 0.3, &q).unwrap();
        assert!((d.populations[0].gamma - 1.0).abs() < 1e-10);
        assert!(d.populations[1..].iter().all(|m| m.gamma == 0.0));
        assert!(d.residual.abs() < 1e-10);
    }

    #[test]
    fn azimuthal_modes_vanish() {
        let inp = input(|r| 3e6 * r * r);
        let q = QuadratureSettings::default();
        for l in [-2, 1, 5] {
            assert_eq!(population(&inp, ModeIndex::new(l, 3), 1.0, 0.0, &q).unwrap(), 0.0);
        }
    }

    #[test]
    fn aberration_spreads_power() {
        let inp = input(|r| 2.0 * (r / 1e-3).powi(4));
        let q = QuadratureSettings::default();
        let d = decompose(&inp, 20, 1.0, 0.0, &q).unwrap();
        assert!(d.populations[0].gamma < 0.99);
        assert!(d.populations[1].gamma > 1e-3);
        assert!(d.total() <= 1.0 + 1e-9);
        assert!(d.total() > 0.9);
        assert!(d.populations.windows(2).all(|w| w[0].index.p + 1 == w[1].index.p));
    }

    #[test]
    fn gauge_invariance() {
        let q = QuadratureSettings::default();
        let base = input(|r| 1.5 * (r / 1e-3).powi(2));
        let shifted = AberratedInput::new(base.beam, base.retardance.with_offset(2.7));
        let a = decompose(&base, 6, 1.0, 0.0, &q).unwrap();
        let b = decompose(&shifted, 6, 1.0, 0.0, &q).unwrap();
        for (x, y) in a.populations.iter().zip(&b.populations) {
            assert!((x.gamma - y.gamma).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_rows() {
        let inp = input(|_| 0.0);
        let d = decompose(&inp, 2, 1.0, 0.0, &QuadratureSettings::default()).unwrap();
        let csv = d.to_csv();
        assert!(csv.starts_with("l,p,gamma\n0,0,"));
        assert_eq!(csv.lines().count(), 4);
    }
}
