//! Ultraspherical Jacobi polynomials `P_n^(beta, beta)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobiSpec {
    pub beta: f64,
    pub n: usize,
}

impl JacobiSpec {
    pub fn new(beta: f64, n: usize) -> Result<Self> {
        if !(beta > -1.0) {
            return Err(Error::Parameter(format!(
                "Jacobi parameter {beta} must exceed -1"
            )));
        }
        Ok(Self { beta, n })
    }
}

/// `P_n^(a, b)(y)` by the three-term recurrence.
pub fn jacobi_value<T: Scalar>(n: usize, a: T, b: T, y: T) -> T {
    let one = T::one();
    let two = T::of(2.0);
    let mut p0 = one;
    if n == 0 {
        return p0;
    }
    let mut p1 = (a + one) + (a + b + two) * (y - one) / two;
    for k in 2..=n {
        let k_ = T::of_usize(k);
        let s = two * k_ + a + b;
        let c1 = two * k_ * (k_ + a + b) * (s - two);
        let c2 = (s - one) * (s * (s - two) * y + a * a - b * b);
        let c3 = two * (k_ + a - one) * (k_ + b - one) * s;
        let p2 = (c2 * p1 - c3 * p0) / c1;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// `(J_n(y), J_n'(y))` with `J_n' = (n/2 + beta + 1/2) P_{n-1}^(beta+1, beta+1)`.
pub fn jacobi_eval<T: Scalar>(spec: JacobiSpec, y: T) -> (T, T) {
    let beta = T::of(spec.beta);
    let v = jacobi_value(spec.n, beta, beta, y);
    if spec.n == 0 {
        return (v, T::zero());
    }
    let b1 = beta + T::one();
    let factor = T::of_usize(spec.n) / T::of(2.0) + beta + T::of(0.5);
    (v, factor * jacobi_value(spec.n - 1, b1, b1, y))
}

/// `J_n(1) = C(n + beta, n) = prod_{k=1..n} (beta + k) / k`.
pub fn jacobi_at_one(spec: JacobiSpec) -> f64 {
    (1..=spec.n)
        .map(|k| (spec.beta + k as f64) / k as f64)
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_cases() {
        let s = JacobiSpec::new(2.5, 0).unwrap();
        assert_eq!(jacobi_eval(s, 0.3f64), (1.0, 0.0));
        let s = JacobiSpec::new(2.5, 1).unwrap();
        let (v, d) = jacobi_eval(s, 0.3f64);
        assert!((v - 3.5 * 0.3).abs() < 1e-15);
        assert!((d - 3.5).abs() < 1e-15);
        assert!(JacobiSpec::new(-1.0, 3).is_err());
    }

    #[test]
    fn endpoint_identity() {
        for beta in [-0.5, 0.0, 1.0, 7.0] {
            for n in 0..=30 {
                let s = JacobiSpec::new(beta, n).unwrap();
                let (v, _) = jacobi_eval(s, 1.0f64);
                let want = jacobi_at_one(s);
                assert!(
                    (v - want).abs() <= 1e-12 * want.abs(),
                    "beta {beta} n {n}: {v} {want}"
                );
            }
        }
    }

    #[test]
    fn legendre_special_case() {
        // beta = 0 gives Legendre: P_2 = (3y^2 - 1)/2
        let (v, d) = jacobi_eval(JacobiSpec::new(0.0, 2).unwrap(), 0.4f64);
        assert!((v - (3.0 * 0.16 - 1.0) / 2.0).abs() < 1e-15);
        assert!((d - 3.0 * 0.4).abs() < 1e-15);
    }
}
