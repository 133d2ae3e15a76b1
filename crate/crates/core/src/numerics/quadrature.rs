//! Gauss-Legendre rules and composite panel integration.

use std::ops::{Add, Mul};

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{domain, CavityError, Result};
use crate::scalar::Scalar;

pub const DEFAULT_ORDER: usize = 64;
pub const DEFAULT_REL_TOL: f64 = 1e-10;
/// Hard cap on composite panels.
pub const MAX_PANELS: usize = 1 << 12;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Scalar> QuadratureRule<T> {
    /// Builds the `order`-point rule by Newton iteration on `P_order`.
    pub fn gauss_legendre(order: usize) -> Result<Self> {
        if order == 0 {
            return domain("quadrature order must be at least 1");
        }
        let n = order;
        let nf = T::from_usize_lossy(n);
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess for the i-th largest root.
            let mut x = (T::PI() * (T::from_usize_lossy(i) + T::lit(0.75)) / (nf + T::half())).cos();
            let mut deriv = T::one();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                deriv = dp;
                let dx = p / dp;
                x -= dx;
                if dx.abs() <= T::epsilon() * T::lit(4.0) {
                    let (_, dp) = legendre_with_derivative(n, x);
                    deriv = dp;
                    break;
                }
            }
            let w = T::two() / ((T::one() - x * x) * deriv * deriv);
            nodes[n - 1 - i] = x;
            nodes[i] = -x;
            weights[n - 1 - i] = w;
            weights[i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        Ok(Self { nodes, weights })
    }

    /// The default order-64 rule.
    pub fn standard() -> Self {
        Self::gauss_legendre(DEFAULT_ORDER).expect("order 64 is valid")
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Composite estimate over `panels` equal panels.
    ///
    /// Returns the integral together with the integral of `|f|`, which is
    /// used as the convergence scale.
    pub fn integrate_panels<V, F>(&self, f: &F, lo: T, hi: T, panels: usize) -> Result<(V, T)>
    where
        V: Integrand<T>,
        F: Fn(T) -> V,
    {
        let width = (hi - lo) / T::from_usize_lossy(panels);
        let half = width * T::half();
        let mut total = V::zero();
        let mut magnitude = T::zero();
        for k in 0..panels {
            let mid = lo + width * (T::from_usize_lossy(k) + T::half());
            let mut panel = V::zero();
            let mut panel_mag = T::zero();
            for (&x, &w) in self.nodes.iter().zip(&self.weights) {
                let r = mid + half * x;
                let v = f(r);
                if !v.is_finite() {
                    return Err(CavityError::NonFiniteIntegrand { abscissa: r.as_f64() });
                }
                panel = panel + v * w;
                panel_mag += v.magnitude() * w;
            }
            total = total + panel * half;
            magnitude += panel_mag * half;
        }
        Ok((total, magnitude))
    }
}

fn legendre_with_derivative<T: Scalar>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = T::from_usize_lossy(k);
        let p2 = ((T::two() * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = T::from_usize_lossy(n);
    let dp = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, dp)
}

/// Value types that can be integrated: real scalars and complex numbers.
pub trait Integrand<T>: Copy + Add<Output = Self> + Mul<T, Output = Self> + Zero + Send + Sync {
    fn magnitude(&self) -> T;
    fn is_finite(&self) -> bool;
}

impl<T: Scalar> Integrand<T> for T {
    fn magnitude(&self) -> T {
        self.abs()
    }

    fn is_finite(&self) -> bool {
        num_traits::Float::is_finite(*self)
    }
}

impl<T: Scalar> Integrand<T> for Complex<T> {
    fn magnitude(&self) -> T {
        self.norm()
    }

    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Composite Gauss-Legendre integral of `f` over `[lo, hi]`.
///
/// Starts from `panels` panels and doubles until two successive estimates
/// differ by at most `rel_tol` times `max(|I|, ∫|f|)`, up to [`MAX_PANELS`].
pub fn integrate_radial<T, V, F>(f: F, lo: T, hi: T, rule: &QuadratureRule<T>, panels: usize, rel_tol: T) -> Result<V>
where
    T: Scalar,
    V: Integrand<T>,
    F: Fn(T) -> V,
{
    if !(lo < hi) {
        return domain(format!("integration bounds must satisfy lo < hi, got [{lo}, {hi}]"));
    }
    if panels == 0 {
        return domain("at least one quadrature panel is required");
    }
    let mut n = panels.min(MAX_PANELS);
    let (mut prev, _) = rule.integrate_panels(&f, lo, hi, n)?;
    let mut achieved = T::infinity();
    while n < MAX_PANELS {
        n *= 2;
        let (next, mag) = rule.integrate_panels(&f, lo, hi, n)?;
        let scale = next.magnitude().max(mag);
        let diff = (next + prev * -T::one()).magnitude();
        if diff <= rel_tol * scale || scale == T::zero() {
            return Ok(next);
        }
        achieved = diff / scale;
        prev = next;
    }
    Err(CavityError::NoConvergence {
        achieved: achieved.as_f64(),
        requested: rel_tol.as_f64(),
    })
}

/// Rule, tolerance and starting panel count bundled for repeated use.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSettings<T> {
    pub rule: QuadratureRule<T>,
    pub rel_tol: T,
    pub initial_panels: usize,
}

impl<T: Scalar> QuadratureSettings<T> {
    pub fn new(order: usize, rel_tol: T, initial_panels: usize) -> Result<Self> {
        if !(rel_tol > T::zero()) {
            return domain(format!("relative tolerance must be positive, got {rel_tol}"));
        }
        Ok(Self {
            rule: QuadratureRule::gauss_legendre(order)?,
            rel_tol,
            initial_panels: initial_panels.max(1),
        })
    }

    pub fn integrate<V, F>(&self, f: F, lo: T, hi: T) -> Result<V>
    where
        V: Integrand<T>,
        F: Fn(T) -> V,
    {
        integrate_radial(f, lo, hi, &self.rule, self.initial_panels, self.rel_tol)
    }
}

impl<T: Scalar> Default for QuadratureSettings<T> {
    fn default() -> Self {
        Self {
            rule: QuadratureRule::standard(),
            rel_tol: T::lit(DEFAULT_REL_TOL),
            initial_panels: 4,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_nodes_increase() {
        for order in [1usize, 2, 5, 16, 64, 101] {
            let rule = QuadratureRule::<f64>::gauss_legendre(order).unwrap();
            let s: f64 = rule.weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-12, "order {order}");
            assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
            assert!(rule.weights().iter().all(|&w| w > 0.0));
            assert_eq!(rule.order(), order);
        }
    }

    #[test]
    fn polynomial_exactness() {
        let n = 12;
        let rule = QuadratureRule::<f64>::gauss_legendre(n).unwrap();
        for deg in 0..(2 * n) as i32 {
            let (v, _): (f64, f64) = rule.integrate_panels(&|x: f64| x.powi(deg), 0.0, 1.0, 1).unwrap();
            let exact = 1.0 / (deg as f64 + 1.0);
            assert!(((v - exact) / exact).abs() < 1e-13, "degree {deg}");
        }
    }

    #[test]
    fn simple_integrals() {
        let rule = QuadratureRule::<f64>::standard();
        let v: f64 = integrate_radial(|x: f64| x * x, 0.0, 1.0, &rule, 1, 1e-14).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-14);

        let w = 1.7e-3;
        let g: f64 = integrate_radial(
            |r: f64| 4.0 * r / (w * w) * (-2.0 * r * r / (w * w)).exp(),
            0.0,
            8.0 * w,
            &rule,
            1,
            1e-12,
        )
        .unwrap();
        assert!((g - 1.0).abs() < 1e-10);
    }

    #[test]
    fn oscillatory_against_antiderivative() {
        let rule = QuadratureRule::<f64>::standard();
        let k = 40.0 * std::f64::consts::PI;
        let v: f64 = integrate_radial(|r: f64| (k * r).cos() * r, 0.0, 1.0, &rule, 1, 1e-13).unwrap();
        // ∫ r cos(kr) dr = r sin(kr)/k + cos(kr)/k²
        let anti = |r: f64| r * (k * r).sin() / k + (k * r).cos() / (k * k);
        let exact = anti(1.0) - anti(0.0);
        assert!(exact.abs() < 1e-12 || ((v - exact) / exact).abs() < 1e-10);
        assert!((v - exact).abs() < 1e-13);
    }

    #[test]
    fn non_finite_names_abscissa() {
        let rule = QuadratureRule::<f64>::gauss_legendre(4).unwrap();
        let err = integrate_radial(|r: f64| if r > 0.5 { f64::NAN } else { r }, 0.0, 1.0, &rule, 1, 1e-10).unwrap_err();
        match err {
            CavityError::NonFiniteIntegrand { abscissa } => assert!(abscissa > 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_convergence_reported() {
        let rule = QuadratureRule::<f64>::gauss_legendre(2).unwrap();
        let err = integrate_radial(|r: f64| (1e6 * r).sin().abs(), 0.0, 1.0, &rule, 1, 1e-15).unwrap_err();
        assert!(matches!(err, CavityError::NoConvergence { .. }));
    }

    #[test]
    fn complex_integrand() {
        let rule = QuadratureRule::<f64>::standard();
        let v: Complex<f64> = integrate_radial(|r: f64| Complex::new(0.0, r).exp(), 0.0, 1.0, &rule, 1, 1e-13).unwrap();
        let exact = (Complex::new(0.0, 1.0).exp() - 1.0) / Complex::new(0.0, 1.0);
        assert!((v - exact).norm() < 1e-14);
    }

    #[test]
    fn single_precision_rule() {
        let rule = QuadratureRule::<f32>::gauss_legendre(16).unwrap();
        let s: f32 = rule.weights().iter().sum();
        assert!((s - 2.0).abs() < 1e-5);
    }
}
