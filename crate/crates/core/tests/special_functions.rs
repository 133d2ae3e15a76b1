//! Laguerre polynomials, incomplete gamma and LG fields against independent references.

use cavetic_core::modes::{ModeIndex, TransverseMode};
use cavetic_core::numerics::{laguerre, upper_incomplete_gamma, upper_incomplete_gamma_scaled};
use cavetic_core::BeamGeometry64 as BeamGeometry;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

fn binomial(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `L_p^α(x) = Σ_k (-1)^k C(p+α, p-k) x^k / k!` in exact rationals, integer `α`.
fn laguerre_exact(p: u64, alpha: u64, x: &BigRational) -> BigRational {
    let mut sum = BigRational::zero();
    let mut power = BigRational::one();
    let mut factorial = BigInt::one();
    for k in 0..=p {
        if k > 0 {
            power = &power * x;
            factorial *= BigInt::from(k);
        }
        let term = BigRational::new(binomial(p + alpha, p - k), factorial.clone()) * &power;
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum
}

#[test]
fn laguerre_matches_exact_series() {
    // Abscissae exactly representable in binary.
    let xs = [(1, 8), (1, 2), (3, 2), (7, 2), (37, 4), (25, 1)];
    let mut worst: f64 = 0.0;
    for p in 0..=50u64 {
        for alpha in [0u64, 1, 3] {
            for &(num, den) in &xs {
                let xr = BigRational::new(BigInt::from(num), BigInt::from(den));
                let exact = laguerre_exact(p, alpha, &xr).to_f64().unwrap();
                let x = num as f64 / den as f64;
                let got = laguerre(p as u32, alpha as f64, x);
                let err = ((got - exact) / exact).abs();
                worst = worst.max(err);
                assert!(err < 1e-10, "p={p} alpha={alpha} x={x}: {got} vs {exact}");
            }
        }
    }
    assert!(worst < 1e-10);
}

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tol`.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50)
}

#[test]
fn incomplete_gamma_matches_adaptive_integration() {
    for &s in &[-0.25f64, 0.25] {
        for &x in &[0.5f64, 1.0, 2.0, 7.5, 30.0] {
            // e^x Γ(s, x) = ∫_0^∞ (x + τ)^{s-1} e^{-τ} dτ, truncated where e^{-τ} < 1e-30.
            let f = |tau: f64| (x + tau).powf(s - 1.0) * (-tau).exp();
            let oracle = simpson(&f, 0.0, 70.0, 1e-15);
            let got = upper_incomplete_gamma_scaled(s, x).unwrap();
            assert!(((got - oracle) / oracle).abs() < 1e-9, "s={s} x={x}: {got} vs {oracle}");
            let unscaled = upper_incomplete_gamma(s, x).unwrap();
            assert!(((unscaled - oracle * (-x).exp()) / unscaled).abs() < 1e-9);
        }
    }
}

#[test]
fn lg_field_matches_high_precision_values() {
    // LG_{l=0,p=3}, w0 = 1 mm, λ = 780 nm, evaluated to 40 digits.
    let beam = BeamGeometry::new(1e-3, 0.0, 780e-9).unwrap();
    let mode = TransverseMode::new(ModeIndex::radial(3), beam);
    let at_waist = [
        (0.0, 797.884_560_802_865_4),
        (2e-4, 589.909_219_878_238),
        (5e-4, -90.619_830_109_937_26),
        (8e-4, -307.934_516_767_280_5),
        (1e-3, -97.841_775_449_159_93),
        (1.5e-3, 226.009_112_620_984_1),
        (2.2e-3, -243.900_216_141_091_96),
    ];
    for (r, v) in at_waist {
        let psi = mode.field(r, 0.0, 0.0);
        assert!((psi.re - v).abs() < 1e-10 * v.abs(), "r={r}");
        assert!(psi.im.abs() < 1e-10 * v.abs());
    }
    let zr = beam.rayleigh_range();
    let off_waist = [
        (3e-4, 269.983_408_186_802_24f64, 295.444_869_489_225_85),
        (9e-4, -74.668_053_875_496_72, -186.728_731_320_710_68),
    ];
    for (r, re, im) in off_waist {
        let psi = mode.field(r, 0.0, zr);
        let scale = re.hypot(im);
        assert!(
            (psi.re - re).abs() < 1e-9 * scale && (psi.im - im).abs() < 1e-9 * scale,
            "r={r}: {psi}"
        );
    }
}

#[test]
fn lg_modes_are_orthonormal() {
    let beam = BeamGeometry::new(0.7e-3, 0.0, 780e-9).unwrap();
    let z = 0.4 * beam.rayleigh_range();
    let s = beam.beam_at(z);
    let modes: Vec<_> = [0u32, 1, 4, 9, 17]
        .iter()
        .map(|&p| TransverseMode::new(ModeIndex::radial(p), beam))
        .collect();
    let r_max = 14.0 * s.waist;
    for a in &modes {
        for b in &modes {
            let f = |r: f64| std::f64::consts::TAU * r * a.radial_amplitude(r, &s) * b.radial_amplitude(r, &s);
            let v = simpson(&f, 0.0, r_max, 1e-13);
            let expected = if a.index == b.index { 1.0 } else { 0.0 };
            assert!((v - expected).abs() < 1e-8, "{:?} {:?}: {v}", a.index, b.index);
        }
    }
    let twisted = TransverseMode::new(ModeIndex::new(3, 2), beam);
    let f = |r: f64| std::f64::consts::TAU * r * twisted.radial_amplitude(r, &s).powi(2);
    assert!((simpson(&f, 0.0, r_max, 1e-13) - 1.0).abs() < 1e-8);
}
