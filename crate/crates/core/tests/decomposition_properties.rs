//! Population sums, gauge freedom and convergence of the modal decomposition.

use cavetic_core::decomposition::{decompose, population, AberratedInput};
use cavetic_core::modes::ModeIndex;
use cavetic_core::numerics::QuadratureSettings;
use cavetic_core::raytrace::WavefrontProfile;
use cavetic_core::spectrum::{CavityFamily, PlanoConcaveFamily};
use cavetic_core::{BeamGeometry64, OpticalConstants64, QuadratureSettings64};
use proptest::prelude::*;

fn random_input(coeffs: &[f64], w: f64) -> AberratedInput<f64> {
    let beam = BeamGeometry64::new(w, 0.0, 780e-9).unwrap();
    let r: Vec<f64> = (0..=300).map(|i| 4.0 * w * i as f64 / 300.0).collect();
    let phase = r
        .iter()
        .map(|&x| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * (x / w).powi(k as i32 + 1))
                .sum()
        })
        .collect();
    AberratedInput::new(beam, WavefrontProfile::new(r, phase).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 10, ..ProptestConfig::default() })]

    #[test]
    fn populations_never_exceed_unity(
        coeffs in prop::collection::vec(-3.0f64..3.0, 1..5),
        w in 0.2e-3f64..2e-3,
        aperture_ratio in 0.8f64..5.0,
    ) {
        let input = random_input(&coeffs, w);
        let q = QuadratureSettings64::default();
        let d = decompose(&input, 30, aperture_ratio * w, 0.0, &q).unwrap();
        prop_assert!(d.total() <= 1.0 + 1e-6, "{}", d.total());
        prop_assert!(d.populations.iter().all(|m| m.gamma >= 0.0 && m.gamma <= 1.0));
        let shorter = decompose(&input, 12, aperture_ratio * w, 0.0, &q).unwrap();
        prop_assert!(shorter.total() <= d.total() + 1e-15);
    }
}

#[test]
fn constant_phase_changes_nothing() {
    let base = random_input(&[0.4, -1.1, 0.7], 1e-3);
    let q = QuadratureSettings64::default();
    for offset in [0.3, -2.0, 17.5] {
        let shifted = AberratedInput::new(base.beam, base.retardance.with_offset(offset));
        for p in 0..10 {
            let a = population(&base, ModeIndex::radial(p), 3e-3, 0.0, &q).unwrap();
            let b = population(&shifted, ModeIndex::radial(p), 3e-3, 0.0, &q).unwrap();
            assert!((a - b).abs() < 1e-12, "p={p}");
        }
    }
}

#[test]
fn flat_phase_populates_only_fundamental() {
    let input = AberratedInput::new(
        BeamGeometry64::new(1e-3, 0.0, 780e-9).unwrap(),
        WavefrontProfile::flat(0.1).unwrap(),
    );
    let q = QuadratureSettings64::default();
    let d = decompose(&input, 50, 0.1, 0.02, &q).unwrap();
    assert!((d.populations[0].gamma - 1.0).abs() < 1e-8);
    for l in [-3, -1, 1, 2] {
        assert_eq!(population(&input, ModeIndex::new(l, 0), 0.1, 0.0, &q).unwrap(), 0.0);
    }
    let single = decompose(&input, 0, 0.1, 0.0, &q).unwrap();
    assert_eq!(single.populations.len(), 1);
}

#[test]
fn plano_concave_at_u0047() {
    let c = OpticalConstants64::default();
    let family = CavityFamily::PlanoConcave(PlanoConcaveFamily::default());
    let g = family.geometry(0.047, &c).unwrap();
    let retardance = family.retardance(&c).unwrap();
    let input = AberratedInput::for_cavity(&g, &c, retardance).unwrap();
    let q = QuadratureSettings64::default();
    let d = decompose(&input, 50, g.aperture_radius(), g.mirror_position(), &q).unwrap();
    assert!(d.total() > 0.9, "{}", d.total());
    assert!(d.populations[0].gamma < 1.0 - 1e-3);

    let fine = QuadratureSettings::new(64, 1e-12, 8).unwrap();
    let d2 = decompose(&input, 50, g.aperture_radius(), g.mirror_position(), &fine).unwrap();
    for (a, b) in d.populations.iter().zip(&d2.populations) {
        assert!((a.gamma - b.gamma).abs() < 1e-6, "{:?}", a.index);
    }
}
