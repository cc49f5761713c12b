//! Scalar fields on `R^d`: anything with a value and a gradient.

use crate::scalar::Scalar;

pub trait ScalarField<T: Scalar>: Sync {
    fn dim(&self) -> usize;

    fn value(&self, p: &[T]) -> T;

    /// Value at `p`; the gradient is written into `grad` (length `dim`).
    fn value_grad(&self, p: &[T], grad: &mut [T]) -> T;

    /// Total degree when the field is a polynomial; sizes quadrature rules.
    fn degree_hint(&self) -> Option<usize> {
        None
    }

    /// Values along the vertical line `{(x, y) : y in ys}`.
    fn values_on_line(&self, x: &[T], ys: &[T], out: &mut [T]) {
        let mut p = x.to_vec();
        p.push(T::zero());
        let last = p.len() - 1;
        for (y, o) in ys.iter().zip(out.iter_mut()) {
            p[last] = *y;
            *o = self.value(&p);
        }
    }

    /// Values and gradients (row-major, stride `dim`) along a vertical line.
    fn value_grad_on_line(&self, x: &[T], ys: &[T], vals: &mut [T], grads: &mut [T]) {
        let d = self.dim();
        let mut p = x.to_vec();
        p.push(T::zero());
        for (k, y) in ys.iter().enumerate() {
            p[d - 1] = *y;
            vals[k] = self.value_grad(&p, &mut grads[k * d..(k + 1) * d]);
        }
    }
}

/// Closure-backed field, mostly for tests and one-off experiments.
pub struct FnField<F, G> {
    dim: usize,
    value: F,
    grad: G,
}

impl<F, G> FnField<F, G> {
    pub fn new(dim: usize, value: F, grad: G) -> Self {
        Self { dim, value, grad }
    }
}

impl<T, F, G> ScalarField<T> for FnField<F, G>
where
    T: Scalar,
    F: Fn(&[T]) -> T + Sync,
    G: Fn(&[T], &mut [T]) + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, p: &[T]) -> T {
        (self.value)(p)
    }

    fn value_grad(&self, p: &[T], grad: &mut [T]) -> T {
        (self.grad)(p, grad);
        (self.value)(p)
    }
}

/// `lambda * f`.
pub struct Scaled<'a, T, F: ?Sized> {
    pub inner: &'a F,
    pub factor: T,
}

impl<T: Scalar, F: ScalarField<T> + ?Sized> ScalarField<T> for Scaled<'_, T, F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, p: &[T]) -> T {
        self.factor * self.inner.value(p)
    }

    fn value_grad(&self, p: &[T], grad: &mut [T]) -> T {
        let v = self.inner.value_grad(p, grad);
        for g in grad.iter_mut() {
            *g = *g * self.factor;
        }
        v * self.factor
    }

    fn degree_hint(&self) -> Option<usize> {
        self.inner.degree_hint()
    }

    fn values_on_line(&self, x: &[T], ys: &[T], out: &mut [T]) {
        self.inner.values_on_line(x, ys, out);
        for o in out.iter_mut() {
            *o = *o * self.factor;
        }
    }

    fn value_grad_on_line(&self, x: &[T], ys: &[T], vals: &mut [T], grads: &mut [T]) {
        self.inner.value_grad_on_line(x, ys, vals, grads);
        for v in vals.iter_mut() {
            *v = *v * self.factor;
        }
        for g in grads.iter_mut() {
            *g = *g * self.factor;
        }
    }
}
