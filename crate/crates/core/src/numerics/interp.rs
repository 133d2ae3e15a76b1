use crate::error::{domain, Result};
use crate::scalar::Scalar;

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Butland slopes).
///
/// Evaluation outside the sample range clamps to the end values.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    slopes: Vec<T>,
}

impl<T: Scalar> MonotoneCubic<T> {
    pub fn new(xs: Vec<T>, ys: Vec<T>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return domain("interpolation needs at least two (x, y) samples of equal length");
        }
        if !xs.windows(2).all(|w| w[0] < w[1]) {
            return domain("interpolation abscissae must be strictly increasing");
        }
        let n = xs.len();
        let h: Vec<T> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<T> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
        let mut slopes = vec![T::zero(); n];
        if n == 2 {
            slopes[0] = delta[0];
            slopes[1] = delta[0];
            return Ok(Self { xs, ys, slopes });
        }
        for i in 1..n - 1 {
            let (d0, d1) = (delta[i - 1], delta[i]);
            if d0 * d1 > T::zero() {
                let w1 = T::two() * h[i] + h[i - 1];
                let w2 = h[i] + T::two() * h[i - 1];
                slopes[i] = (w1 + w2) / (w1 / d0 + w2 / d1);
            }
        }
        slopes[0] = end_slope(h[0], h[1], delta[0], delta[1]);
        slopes[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        Ok(Self { xs, ys, slopes })
    }

    pub fn x_min(&self) -> T {
        self.xs[0]
    }

    pub fn x_max(&self) -> T {
        self.xs[self.xs.len() - 1]
    }

    pub fn eval(&self, x: T) -> T {
        if x <= self.x_min() {
            return self.ys[0];
        }
        if x >= self.x_max() {
            return self.ys[self.ys.len() - 1];
        }
        let i = self.xs.partition_point(|&xi| xi <= x) - 1;
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let two = T::two();
        let three = T::lit(3.0);
        let h00 = two * t3 - three * t2 + T::one();
        let h10 = t3 - two * t2 + t;
        let h01 = three * t2 - two * t3;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1]
    }
}

/// Three-point end slope, limited to preserve monotonicity.
fn end_slope<T: Scalar>(h0: T, h1: T, d0: T, d1: T) -> T {
    let d = ((T::two() * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() {
        T::zero()
    } else if d0.signum() != d1.signum() && d.abs() > T::lit(3.0) * d0.abs() {
        T::lit(3.0) * d0
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_nodes_and_linear_data() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64 * 0.3).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x - 1.0).collect();
        let m = MonotoneCubic::new(xs.clone(), ys.clone()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((m.eval(*x) - y).abs() < 1e-14);
        }
        assert!((m.eval(0.45) - (-0.1)).abs() < 1e-14);
    }

    #[test]
    fn preserves_monotonicity_of_steps() {
        let xs = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let ys = vec![0.0, 0.0, 1.0, 1.0, 1.0];
        let m = MonotoneCubic::new(xs, ys).unwrap();
        let mut last = -1.0;
        for i in 0..=400 {
            let v = m.eval(i as f64 * 0.01);
            assert!(v >= last - 1e-15 && (-1e-15..=1.0 + 1e-15).contains(&v));
            last = v;
        }
    }

    #[test]
    fn smooth_function_accuracy() {
        let xs: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.powi(4)).collect();
        let m = MonotoneCubic::new(xs, ys).unwrap();
        assert!((m.eval(0.7231) - 0.7231f64.powi(4)).abs() < 1e-6);
    }

    #[test]
    fn rejects_unsorted() {
        assert!(MonotoneCubic::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(MonotoneCubic::new(vec![0.0], vec![1.0]).is_err());
    }
}
