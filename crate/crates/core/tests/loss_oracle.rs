//! Clipping and per-mode linewidths against oversampled Simpson quadrature.

use cavetic_core::loss::per_mode_linewidth;
use cavetic_core::modes::{clipped_power, ModeIndex};
use cavetic_core::optics::{fundamental_mode, geometry_for_focusing};
use cavetic_core::{OpticalConstants64, QuadratureSettings64};

/// `L_p(x)` from its explicit power series.
fn laguerre_series(p: u32, x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0; // (-x)^k / k! * C(p, k), built incrementally
    for k in 0..=p {
        if k > 0 {
            term *= -x * (p - k + 1) as f64 / (k as f64 * k as f64);
        }
        sum += term;
    }
    sum
}

/// Power of the normalized `LG_{0,p}` inside radius `a` for spot size `w`.
fn enclosed(p: u32, w: f64, a: f64) -> f64 {
    let intervals = 400_000;
    let h = a / intervals as f64;
    let f = |r: f64| {
        let amp = (2.0 / std::f64::consts::PI).sqrt() / w
            * (-(r * r) / (w * w)).exp()
            * laguerre_series(p, 2.0 * r * r / (w * w));
        std::f64::consts::TAU * r * amp * amp
    };
    let mut s = f(0.0) + f(a);
    for i in 1..intervals {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn clipped_power_p5() {
    let c = OpticalConstants64::default();
    let q = QuadratureSettings64::default();
    let g = geometry_for_focusing(50e-3, 0.047, 6.35e-3, 0.978, &c).unwrap();
    let beam = fundamental_mode(&g, &c).unwrap();
    let w = beam.beam_at(g.mirror_position()).waist;
    for a in [1.0 * w, 2.0 * w, g.aperture_radius()] {
        let oracle = enclosed(5, w, a).powi(2);
        let got = clipped_power(ModeIndex::radial(5), &beam, a, g.mirror_position(), &q).unwrap();
        assert!((got - oracle).abs() < 1e-9, "a={a}: {got} vs {oracle}");
    }
}

#[test]
fn linewidth_of_p10_at_u0047() {
    let c = OpticalConstants64::default();
    let q = QuadratureSettings64::default();
    let g = geometry_for_focusing(50e-3, 0.047, 6.35e-3, 0.978, &c).unwrap();
    let beam = fundamental_mode(&g, &c).unwrap();

    let (l, roc) = (g.length(), g.mirror_roc());
    let x = l / 2.0;
    let w = ((c.wavelength * roc / std::f64::consts::PI) * (x / (roc - x)).sqrt()).sqrt();
    let rho = 0.978f64.powi(2) * enclosed(10, w, 6.35e-3).powi(2);
    let finesse = std::f64::consts::PI / (2.0 * ((1.0 - rho.sqrt()) / (2.0 * rho.powf(0.25))).asin());
    let oracle = c.light_speed / (2.0 * l * finesse);

    let got = per_mode_linewidth(ModeIndex::radial(10), &g, &beam, &c, &q).unwrap();
    assert!(((got - oracle) / oracle).abs() < 1e-8, "{got} vs {oracle}");
    let k00 = per_mode_linewidth(ModeIndex::FUNDAMENTAL, &g, &beam, &c, &q).unwrap();
    assert!(got > k00);
}
