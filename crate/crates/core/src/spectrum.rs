//! Transmission spectra as sums of per-mode Lorentzian lines, and the
//! linewidth a scan of such a spectrum would show.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::anaclastic::{self, AnaclasticPrescription};
use crate::decomposition::{decompose, AberratedInput, ModePopulation, DEFAULT_P_MAX};
use crate::error::{domain, CavityError, Result};
use crate::loss::{fundamental_linewidth, per_mode_linewidth};
use crate::modes::{mode_frequency_shift, ModeIndex};
use crate::numerics::{golden_section_max, QuadratureSettings};
use crate::optics::{free_spectral_range, geometry_for_focusing, BeamGeometry, CavityGeometry, OpticalConstants};
use crate::raytrace::{
    retardance_planoconcave, InputWavefront, PlanoConcaveSubstrate, WavefrontProfile, DEFAULT_SAMPLES,
};
use crate::scalar::Scalar;

/// Coarse grid resolution, in samples per free spectral range.
pub const SAMPLES_PER_FSR: usize = 4096;
/// Default coarse span, in free spectral ranges.
pub const DEFAULT_SPAN_FSR: usize = 4;
/// Fewer samples than this across the FWHM makes the coarse grid unreliable.
pub const MIN_SAMPLES_PER_FWHM: usize = 5;

/// Transmission versus detuning from the fundamental resonance (Hz).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum<T> {
    pub detuning: Vec<T>,
    pub transmission: Vec<T>,
}

impl<T: Scalar> Spectrum<T> {
    pub fn new(detuning: Vec<T>, transmission: Vec<T>) -> Result<Self> {
        if detuning.len() != transmission.len() || detuning.len() < 3 {
            return domain("spectrum needs at least three (detuning, transmission) samples of equal length");
        }
        if !detuning.windows(2).all(|w| w[0] < w[1]) {
            return domain("spectrum detuning grid must increase strictly");
        }
        if transmission.iter().any(|t| !(*t >= T::zero())) {
            return domain("transmission samples must be nonnegative");
        }
        Ok(Self { detuning, transmission })
    }

    /// CSV with header `detuning_hz,transmission`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("detuning_hz,transmission\n");
        for (d, t) in self.detuning.iter().zip(&self.transmission) {
            let _ = writeln!(out, "{:.11e},{:.11e}", d.as_f64(), t.as_f64());
        }
        out
    }
}

/// One Lorentzian line of unit peak height times `weight`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralLine<T> {
    pub index: ModeIndex,
    pub weight: T,
    /// Center in Hz, folded into `(-FSR/2, FSR/2]`.
    pub center: T,
    pub fwhm: T,
}

/// Folds `shift` into `(-fsr/2, fsr/2]`.
pub fn wrap_center<T: Scalar>(shift: T, fsr: T) -> T {
    let half = fsr * T::half();
    let mut c = shift - fsr * (shift / fsr).round();
    if c <= -half {
        c += fsr;
    } else if c > half {
        c -= fsr;
    }
    c
}

/// Lines and their free spectral range; the spectrum repeats with period `fsr`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineSet<T> {
    pub lines: Vec<SpectralLine<T>>,
    pub fsr: T,
    /// Populated modes left out because their round trip keeps too little power
    /// for a resonance (finesse below one).
    pub skipped: Vec<ModeIndex>,
}

impl<T: Scalar> LineSet<T> {
    pub fn new(lines: Vec<SpectralLine<T>>, fsr: T) -> Result<Self> {
        if !(fsr > T::zero()) {
            return domain(format!("free spectral range must be positive, got {fsr}"));
        }
        if lines.iter().any(|l| !(l.fwhm > T::zero()) || !(l.weight >= T::zero())) {
            return domain("lines need positive width and nonnegative weight");
        }
        let lines = lines
            .into_iter()
            .map(|l| SpectralLine {
                center: wrap_center(l.center, fsr),
                ..l
            })
            .collect();
        Ok(Self {
            lines,
            fsr,
            skipped: Vec::new(),
        })
    }

    /// Lines for `populations` in `geometry`, with per-mode shifts and widths.
    pub fn for_populations(
        populations: &[ModePopulation<T>],
        geometry: &CavityGeometry<T>,
        beam: &BeamGeometry<T>,
        constants: &OpticalConstants<T>,
        quadrature: &QuadratureSettings<T>,
    ) -> Result<Self> {
        if populations.is_empty() {
            return domain("at least one mode population is required");
        }
        let fsr = free_spectral_range(geometry, constants);
        let built: Vec<Option<SpectralLine<T>>> = populations
            .par_iter()
            .filter(|m| m.gamma > T::zero())
            .map(|m| {
                let fwhm = match per_mode_linewidth(m.index, geometry, beam, constants, quadrature) {
                    Ok(k) => k,
                    Err(CavityError::SubUnityFinesse { .. }) => return Ok(None),
                    Err(e) => return Err(e),
                };
                Ok(Some(SpectralLine {
                    index: m.index,
                    weight: m.gamma,
                    center: mode_frequency_shift(m.index, geometry, constants)?,
                    fwhm,
                }))
            })
            .collect::<Result<_>>()?;
        let skipped = populations
            .iter()
            .filter(|m| m.gamma > T::zero())
            .zip(&built)
            .filter(|(_, l)| l.is_none())
            .map(|(m, _)| m.index)
            .collect();
        let mut set = Self::new(built.into_iter().flatten().collect(), fsr)?;
        set.skipped = skipped;
        Ok(set)
    }

    /// Transmission at detuning `nu`, summing each line's nearest periodic copies.
    pub fn eval(&self, nu: T) -> T {
        let base = (nu / self.fsr).round();
        let mut total = T::zero();
        for line in &self.lines {
            let hw = line.fwhm * T::half();
            for m in -3..=3 {
                let center = line.center + (base + T::lit(m as f64)) * self.fsr;
                let x = (nu - center) / hw;
                total += line.weight / (T::one() + x * x);
            }
        }
        total
    }

    pub fn narrowest(&self) -> Option<T> {
        self.lines.iter().map(|l| l.fwhm).reduce(|a, b| a.min(b))
    }

    /// Samples the line sum on `grid`.
    pub fn synthesize(&self, grid: Vec<T>) -> Result<Spectrum<T>> {
        let transmission = grid.par_iter().map(|&nu| self.eval(nu)).collect();
        Spectrum::new(grid, transmission)
    }

    /// FWHM of the line sum within one FSR of its global peak.
    ///
    /// The peak is located on a `samples_per_fsr` grid, then both the peak
    /// and the outermost half-maximum crossings are refined on the exact sum.
    pub fn fwhm(&self, samples_per_fsr: usize) -> Result<T> {
        if self.lines.is_empty() {
            return Err(CavityError::Range("no lines to measure".into()));
        }
        let step = self.fsr / T::from_usize_lossy(samples_per_fsr.max(8));
        let half = self.fsr * T::half();
        let coarse = self.synthesize(uniform_grid(-half, half, step)?)?;
        let (i_peak, _) = argmax(&coarse.transmission);
        let nu0 = coarse.detuning[i_peak];
        let (nu_peak, peak) = golden_section_max(|nu| self.eval(nu), nu0 - step, nu0 + step, step * T::lit(1e-9));
        let window = self.synthesize(uniform_grid(nu_peak - half, nu_peak + half, step)?)?;
        let level = peak * T::half();
        let (lo, hi) = outer_crossings(&window, level)?;
        let refine = |a: T, b: T| {
            let (mut a, mut b) = (a, b);
            let below_at_a = self.eval(a) < level;
            for _ in 0..200 {
                let mid = T::half() * (a + b);
                if !(mid > a && mid < b) {
                    break;
                }
                if (self.eval(mid) < level) == below_at_a {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            T::half() * (a + b)
        };
        let left = refine(window.detuning[lo - 1], window.detuning[lo]);
        let right = refine(window.detuning[hi], window.detuning[hi + 1]);
        Ok(right - left)
    }
}

/// `lo, lo + step, ...` up to and including `hi` (within rounding).
pub fn uniform_grid<T: Scalar>(lo: T, hi: T, step: T) -> Result<Vec<T>> {
    if !(step > T::zero()) || !(hi > lo) {
        return domain(format!("grid needs lo < hi and step > 0, got [{lo}, {hi}] step {step}"));
    }
    let n = ((hi - lo) / step + T::lit(1e-9)).floor().to_usize().unwrap_or(0);
    Ok((0..=n).map(|i| lo + step * T::from_usize_lossy(i)).collect())
}

fn argmax<T: Scalar>(v: &[T]) -> (usize, T) {
    v.iter().copied().enumerate().fold(
        (0, T::neg_infinity()),
        |(bi, bv), (i, x)| if x > bv { (i, x) } else { (bi, bv) },
    )
}

/// Indices of the first and last samples at or above `level`; both must
/// have a sample below `level` beyond them.
fn outer_crossings<T: Scalar>(s: &Spectrum<T>, level: T) -> Result<(usize, usize)> {
    let y = &s.transmission;
    let lo = y.iter().position(|&v| v >= level);
    let hi = y.iter().rposition(|&v| v >= level);
    match (lo, hi) {
        (Some(lo), Some(hi)) if lo > 0 && hi + 1 < y.len() => Ok((lo, hi)),
        _ => Err(CavityError::Range("no half-maximum crossing inside the grid".into())),
    }
}

/// Full width at half maximum of a sampled spectrum, from the outermost
/// half-maximum crossings, linearly interpolated.
pub fn fwhm<T: Scalar>(spectrum: &Spectrum<T>) -> Result<T> {
    let y = &spectrum.transmission;
    let x = &spectrum.detuning;
    let (i_peak, peak) = argmax(y);
    if !(peak > T::zero()) {
        return Err(CavityError::Range("spectrum has no positive peak".into()));
    }
    if i_peak == 0 || i_peak + 1 == y.len() {
        return Err(CavityError::Range("spectrum maximum lies at the grid edge".into()));
    }
    let level = peak * T::half();
    let (lo, hi) = outer_crossings(spectrum, level)?;
    let cross = |i: usize, j: usize| x[i] + (level - y[i]) * (x[j] - x[i]) / (y[j] - y[i]);
    Ok(cross(hi + 1, hi) - cross(lo - 1, lo))
}

/// Plano-concave mirrors entered through a plane substrate face.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanoConcaveFamily<T> {
    pub mirror_roc: T,
    pub aperture: T,
    pub reflectivity: T,
    pub substrate_index: T,
    pub substrate_thickness: T,
}

impl<T: Scalar> Default for PlanoConcaveFamily<T> {
    fn default() -> Self {
        Self {
            mirror_roc: T::lit(50e-3),
            aperture: T::lit(6.35e-3),
            reflectivity: T::lit(0.978),
            substrate_index: T::lit(1.5112),
            substrate_thickness: T::lit(4e-3),
        }
    }
}

/// Anaclastic lenses facing each other.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnaclasticFamily<T> {
    pub prescription: AnaclasticPrescription<T>,
    pub aperture: T,
}

impl<T: Scalar> Default for AnaclasticFamily<T> {
    fn default() -> Self {
        Self {
            prescription: anaclastic::design(
                T::lit(anaclastic::DEFAULT_FOCAL_LENGTH),
                T::lit(anaclastic::DEFAULT_INDEX),
                T::lit(anaclastic::DEFAULT_MIRROR_ROC),
            )
            .expect("default prescription is valid"),
            aperture: T::lit(anaclastic::DEFAULT_APERTURE),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum CavityFamily<T> {
    PlanoConcave(PlanoConcaveFamily<T>),
    Anaclastic(AnaclasticFamily<T>),
}

impl<T: Scalar> CavityFamily<T> {
    pub fn mirror_roc(&self) -> T {
        match self {
            Self::PlanoConcave(p) => p.mirror_roc,
            Self::Anaclastic(a) => a.prescription.mirror_roc,
        }
    }

    pub fn aperture(&self) -> T {
        match self {
            Self::PlanoConcave(p) => p.aperture,
            Self::Anaclastic(a) => a.aperture,
        }
    }

    pub fn reflectivity(&self) -> T {
        match self {
            Self::PlanoConcave(p) => p.reflectivity,
            Self::Anaclastic(a) => a.prescription.mirror_reflectivity,
        }
    }

    /// Cavity whose fundamental mode has focusing parameter `u`.
    pub fn geometry(&self, u: T, constants: &OpticalConstants<T>) -> Result<CavityGeometry<T>> {
        geometry_for_focusing(self.mirror_roc(), u, self.aperture(), self.reflectivity(), constants)
    }

    /// Phase retardance of the input beam at the mirror over the full aperture.
    pub fn retardance(&self, constants: &OpticalConstants<T>) -> Result<WavefrontProfile<T>> {
        let k = constants.wavenumber();
        match self {
            Self::PlanoConcave(p) => {
                let substrate = PlanoConcaveSubstrate {
                    mirror_roc: p.mirror_roc,
                    thickness: p.substrate_thickness,
                    index: p.substrate_index,
                    aperture: p.aperture,
                };
                let input = InputWavefront::Converging { target_z: p.mirror_roc };
                retardance_planoconcave(&substrate, input, p.aperture, DEFAULT_SAMPLES, k)
            }
            Self::Anaclastic(a) => anaclastic::retardance(&a.prescription, a.aperture, k),
        }
    }
}

/// Settings shared by every point of a linewidth curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSettings<T> {
    pub constants: OpticalConstants<T>,
    pub quadrature: QuadratureSettings<T>,
    pub p_max: u32,
    pub samples_per_fsr: usize,
}

impl<T: Scalar> Default for CurveSettings<T> {
    fn default() -> Self {
        Self {
            constants: OpticalConstants::default(),
            quadrature: QuadratureSettings::default(),
            p_max: DEFAULT_P_MAX,
            samples_per_fsr: SAMPLES_PER_FSR,
        }
    }
}

/// Linewidth at one focusing parameter. Failures are kept per point.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint<T> {
    pub u: T,
    pub fwhm: Result<T>,
    /// Modes dropped from the aberrated spectrum for sub-unity finesse.
    pub skipped: Vec<ModeIndex>,
}

/// Mode lines of the aberrated input at focusing parameter `u`.
pub fn aberrated_lines<T: Scalar>(
    family: &CavityFamily<T>,
    u: T,
    retardance: &WavefrontProfile<T>,
    settings: &CurveSettings<T>,
) -> Result<LineSet<T>> {
    let geometry = family.geometry(u, &settings.constants)?;
    let input = AberratedInput::for_cavity(&geometry, &settings.constants, retardance.clone())?;
    let d = decompose(
        &input,
        settings.p_max,
        geometry.aperture_radius(),
        geometry.mirror_position(),
        &settings.quadrature,
    )?;
    LineSet::for_populations(
        &d.populations,
        &geometry,
        &input.beam,
        &settings.constants,
        &settings.quadrature,
    )
}

/// Single fundamental line of the unaberrated cavity at `u`.
pub fn fundamental_lines<T: Scalar>(family: &CavityFamily<T>, u: T, settings: &CurveSettings<T>) -> Result<LineSet<T>> {
    let geometry = family.geometry(u, &settings.constants)?;
    let line = SpectralLine {
        index: ModeIndex::FUNDAMENTAL,
        weight: T::one(),
        center: T::zero(),
        fwhm: fundamental_linewidth(&geometry, &settings.constants)?,
    };
    LineSet::new(vec![line], free_spectral_range(&geometry, &settings.constants))
}

/// Observable linewidth versus `u`, with or without input-beam aberrations.
pub fn predicted_linewidth_curve<T: Scalar>(
    family: &CavityFamily<T>,
    us: &[T],
    with_aberrations: bool,
    settings: &CurveSettings<T>,
) -> Vec<CurvePoint<T>> {
    let retardance = if with_aberrations {
        match family.retardance(&settings.constants) {
            Ok(r) => Some(r),
            Err(e) => {
                return us
                    .iter()
                    .map(|&u| CurvePoint {
                        u,
                        fwhm: Err(e.clone()),
                        skipped: Vec::new(),
                    })
                    .collect()
            }
        }
    } else {
        None
    };
    us.par_iter()
        .map(|&u| match &retardance {
            None => CurvePoint {
                u,
                fwhm: family
                    .geometry(u, &settings.constants)
                    .and_then(|g| fundamental_linewidth(&g, &settings.constants)),
                skipped: Vec::new(),
            },
            Some(r) => match aberrated_lines(family, u, r, settings) {
                Ok(set) => CurvePoint {
                    u,
                    fwhm: set.fwhm(settings.samples_per_fsr),
                    skipped: set.skipped,
                },
                Err(e) => CurvePoint {
                    u,
                    fwhm: Err(e),
                    skipped: Vec::new(),
                },
            },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(center: f64, fwhm: f64, weight: f64) -> SpectralLine<f64> {
        SpectralLine {
            index: ModeIndex::FUNDAMENTAL,
            weight,
            center,
            fwhm,
        }
    }

    #[test]
    fn single_line_peaks_at_one() {
        let set = LineSet::new(vec![line(0.0, 1e6, 1.0)], 1e12).unwrap();
        assert!((set.eval(0.0) - 1.0).abs() < 1e-12);
        let s = set.synthesize(uniform_grid(-1e7, 1e7, 2e4).unwrap()).unwrap();
        let w = fwhm(&s).unwrap();
        assert!((w / 1e6 - 1.0).abs() < 0.005);
        assert!((set.fwhm(4096).unwrap() / 1e6 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn close_pair_broadens() {
        let k = 1e6;
        let set = LineSet::new(vec![line(-0.2 * k, k, 0.5), line(0.2 * k, k, 0.5)], 1e12).unwrap();
        let s = set.synthesize(uniform_grid(-1e7, 1e7, 1e3).unwrap()).unwrap();
        assert!(fwhm(&s).unwrap() > k);
    }

    #[test]
    fn doublet_spans_outer_flanks() {
        // Two unit lines at ±κ: the half-maximum level sits on the outer flanks.
        let k: f64 = 1e6;
        let set = LineSet::new(vec![line(-k, k, 1.0), line(k, k, 1.0)], 1e12).unwrap();
        let s = set.synthesize(uniform_grid(-1e7, 1e7, 1e2).unwrap()).unwrap();
        let peak = s.transmission.iter().cloned().fold(0.0, f64::max);
        // Outer crossing x > κ solves L(x - κ) + L(x + κ) = peak/2 with L(y) = 1/(1 + (2y/κ)²).
        let f =
            |x: f64| 1.0 / (1.0 + (2.0 * (x - k) / k).powi(2)) + 1.0 / (1.0 + (2.0 * (x + k) / k).powi(2)) - peak / 2.0;
        let (mut a, mut b) = (k, 3.0 * k);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(m) > 0.0 {
                a = m
            } else {
                b = m
            }
        }
        let w = fwhm(&s).unwrap();
        assert!((w - 2.0 * a).abs() < 1e-3 * k, "{w} vs {}", 2.0 * a);
        assert!(w > 2.0 * k);
    }

    #[test]
    fn flat_or_edge_spectra_error() {
        let flat = Spectrum::new(vec![0.0, 1.0, 2.0], vec![0.0; 3]).unwrap();
        assert!(matches!(fwhm(&flat), Err(CavityError::Range(_))));
        let edge = Spectrum::new(vec![0.0, 1.0, 2.0], vec![3.0, 2.0, 1.0]).unwrap();
        assert!(matches!(fwhm(&edge), Err(CavityError::Range(_))));
    }

    #[test]
    fn wrap_is_periodic() {
        let fsr: f64 = 1.5e9;
        for shift in [0.1e9, 0.74e9, -0.3e9, 3.2e9] {
            let a = LineSet::new(vec![line(shift, 1e7, 1.0)], fsr).unwrap();
            let b = LineSet::new(vec![line(shift + fsr, 1e7, 1.0)], fsr).unwrap();
            assert!((a.lines[0].center - b.lines[0].center).abs() < 1e-12 * fsr);
            for nu in [-0.7e9, 0.0, 0.2e9, 0.75e9] {
                assert!((a.eval(nu) - b.eval(nu)).abs() < 1e-12);
            }
        }
        assert_eq!(wrap_center(0.75e9, fsr), 0.75e9);
        assert_eq!(wrap_center(-0.75e9, fsr), 0.75e9);
    }

    #[test]
    fn weights_scale_out_of_fwhm() {
        let a = LineSet::new(vec![line(0.0, 1e6, 0.6), line(3e5, 2e6, 0.3)], 1e10).unwrap();
        let b = LineSet::new(vec![line(0.0, 1e6, 0.2), line(3e5, 2e6, 0.1)], 1e10).unwrap();
        assert!((a.fwhm(4096).unwrap() - b.fwhm(4096).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn diffraction_only_curves() {
        let s = CurveSettings::<f64>::default();
        let ana = CavityFamily::Anaclastic(AnaclasticFamily::default());
        for p in predicted_linewidth_curve(&ana, &[0.05, 0.1, 0.2], false, &s) {
            let k = p.fwhm.unwrap();
            assert!((k / 27.9e6 - 1.0).abs() < 0.03, "{k}");
        }
        let plano = CavityFamily::PlanoConcave(PlanoConcaveFamily::default());
        let k = predicted_linewidth_curve(&plano, &[0.02], false, &s)[0]
            .fwhm
            .clone()
            .unwrap();
        assert!((k / 10.6e6 - 1.0).abs() < 0.03, "{k}");
        // Beam wider than the mirror.
        let wide = predicted_linewidth_curve(&ana, &[1.2], false, &s)[0]
            .fwhm
            .clone()
            .unwrap();
        assert!(wide > 5.0 * 27.9e6, "{wide}");
    }
}
