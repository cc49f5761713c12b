//! The extremal polynomial `Q(x, y) = x_1 J_n(y) g_n(x, y)` concentrated at the apex `e_d`.

use serde::{Deserialize, Serialize};

use super::jacobi::{jacobi_eval, JacobiSpec};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpnessSpec {
    pub d: usize,
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    /// blow-down exponent of `g_n`
    pub b: usize,
    /// diameter bound `T` of the target domain
    pub t: f64,
    /// strip parameter of `D_a = {1 - a/n^2 <= y <= 1}`
    pub a: f64,
}

impl SharpnessSpec {
    /// `beta = 2d + 3`, `b = 1`, `a = 0.5`.
    pub fn with_defaults(d: usize, n: usize, alpha: f64, t: f64) -> Self {
        Self {
            d,
            n,
            alpha,
            beta: (2 * d + 3) as f64,
            b: 1,
            t,
            a: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::Parameter("dimension must be at least 2".into()));
        }
        if !(self.beta > (2 * self.d + 2) as f64) {
            return Err(Error::Parameter(format!(
                "beta = {} must exceed 2d + 2",
                self.beta
            )));
        }
        if self.b < 1 {
            return Err(Error::Parameter("b must be a positive integer".into()));
        }
        if !(self.t > 0.0) {
            return Err(Error::Parameter("T must be positive".into()));
        }
        if !(self.a > 0.0 && self.a <= 1.0) {
            return Err(Error::Parameter("a must lie in (0, 1]".into()));
        }
        if !(self.alpha > 1.0 && self.alpha <= 2.0) {
            return Err(Error::Parameter("alpha must lie in (1, 2]".into()));
        }
        Ok(())
    }

    /// `(2b + 1) n + 1`.
    pub fn total_degree(&self) -> usize {
        (2 * self.b + 1) * self.n + 1
    }
}

/// `Q` held as the factor triple `x_1`, `J_n(y)`, `g_n(x, y) = (1 - (|x|^2 + (1-y)^2)/T^2)^(bn)`.
#[derive(Clone, Debug)]
pub struct SharpnessPoly {
    spec: SharpnessSpec,
    jacobi: JacobiSpec,
}

impl SharpnessPoly {
    pub fn new(spec: SharpnessSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self {
            jacobi: JacobiSpec::new(spec.beta, spec.n)?,
            spec,
        })
    }

    pub fn spec(&self) -> &SharpnessSpec {
        &self.spec
    }

    /// `1 - |(x, y) - e_d|^2 / T^2`, the base of `g_n`.
    fn base<T: Scalar>(&self, p: &[T]) -> T {
        let k = self.spec.d - 1;
        let mut r2 = (T::one() - p[k]).powi(2);
        for v in &p[..k] {
            r2 = r2 + *v * *v;
        }
        T::one() - r2 / T::of(self.spec.t * self.spec.t)
    }

    pub fn g_n<T: Scalar>(&self, p: &[T]) -> T {
        self.base(p).powi((self.spec.b * self.spec.n) as i32)
    }

    pub fn jacobi(&self) -> JacobiSpec {
        self.jacobi
    }
}

impl<T: Scalar> ScalarField<T> for SharpnessPoly {
    fn dim(&self) -> usize {
        self.spec.d
    }

    fn value(&self, p: &[T]) -> T {
        let k = self.spec.d - 1;
        let (j, _) = jacobi_eval(self.jacobi, p[k]);
        p[0] * j * self.g_n(p)
    }

    fn value_grad(&self, p: &[T], grad: &mut [T]) -> T {
        let k = self.spec.d - 1;
        let (j, dj) = jacobi_eval(self.jacobi, p[k]);
        let big_n = (self.spec.b * self.spec.n) as i32;
        let base = self.base(p);
        let g = base.powi(big_n);
        // d g / d base
        let dg = if big_n == 0 {
            T::zero()
        } else {
            T::of(big_n as f64) * base.powi(big_n - 1)
        };
        let inv_t2 = T::one() / T::of(self.spec.t * self.spec.t);
        let two = T::of(2.0);
        let x1 = p[0];
        for a in 0..k {
            let dbase = -two * p[a] * inv_t2;
            grad[a] = x1 * j * dg * dbase;
        }
        grad[0] = grad[0] + j * g;
        let dbase_y = two * (T::one() - p[k]) * inv_t2;
        grad[k] = x1 * (dj * g + j * dg * dbase_y);
        x1 * j * g
    }

    fn degree_hint(&self) -> Option<usize> {
        Some(self.spec.total_degree())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> SharpnessSpec {
        SharpnessSpec::with_defaults(2, 8, 1.5, 3.0)
    }

    #[test]
    fn vanishes_on_x1_zero_and_at_apex() {
        let q = SharpnessPoly::new(spec()).unwrap();
        assert_eq!(ScalarField::<f64>::value(&q, &[0.0, 0.3]), 0.0);
        assert_eq!(ScalarField::<f64>::value(&q, &[0.0, 1.0]), 0.0);
        assert_eq!(q.g_n(&[0.0, 1.0]), 1.0);
    }

    #[test]
    fn degree_and_validation() {
        assert_eq!(spec().total_degree(), 25);
        let mut s = spec();
        s.beta = 6.0;
        assert!(SharpnessPoly::new(s).is_err());
        assert_eq!(spec().beta, 7.0);
    }

    #[test]
    fn product_rule_gradient_matches_differences() {
        let q = SharpnessPoly::new(SharpnessSpec::with_defaults(3, 6, 1.5, 3.0)).unwrap();
        let p = [0.2, -0.1, 0.7];
        let mut g = [0.0; 3];
        ScalarField::<f64>::value_grad(&q, &p, &mut g);
        let h = 1e-6;
        for a in 0..3 {
            let mut pp = p;
            let mut pm = p;
            pp[a] += h;
            pm[a] -= h;
            let fd = (ScalarField::<f64>::value(&q, &pp) - ScalarField::<f64>::value(&q, &pm))
                / (2.0 * h);
            assert!(
                (fd - g[a]).abs() <= 1e-6 * g[a].abs().max(1e-3),
                "{a}: {fd} {}",
                g[a]
            );
        }
    }
}
