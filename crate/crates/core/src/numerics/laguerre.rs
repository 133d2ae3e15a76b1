use crate::scalar::Scalar;

/// Generalized Laguerre polynomial `L_p^α(x)` by upward three-term recurrence.
pub fn laguerre<T: Scalar>(p: u32, alpha: T, x: T) -> T {
    let one = T::one();
    let mut prev = one;
    if p == 0 {
        return prev;
    }
    let mut cur = one + alpha - x;
    for k in 1..p {
        let kf = T::from_u32(k).unwrap();
        let next = ((T::two() * kf + one + alpha - x) * cur - (kf + alpha) * prev) / (kf + one);
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders() {
        for &alpha in &[0.0f64, 1.0, 2.5] {
            for &x in &[-1.0, 0.0, 0.3, 7.0] {
                assert_eq!(laguerre(0, alpha, x), 1.0);
                assert!((laguerre(1, alpha, x) - (1.0 + alpha - x)).abs() < 1e-15);
                let l2 = 0.5 * (x * x - 2.0 * (alpha + 2.0) * x + (alpha + 1.0) * (alpha + 2.0));
                assert!((laguerre(2, alpha, x) - l2).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn value_at_origin_is_binomial() {
        // L_p^α(0) = C(p + α, p)
        let mut binom = 1.0f64;
        for p in 0..20u32 {
            if p > 0 {
                binom *= (p as f64 + 1.0) / p as f64;
            }
            assert!((laguerre(p, 1.0, 0.0) - binom).abs() < 1e-12 * binom);
        }
    }

    #[test]
    fn single_precision() {
        let a = laguerre(5u32, 0.0f32, 1.3f32) as f64;
        let b = laguerre(5u32, 0.0f64, 1.3f64);
        assert!((a - b).abs() < 1e-5);
    }
}
