use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Axis-aligned box `[lo_1, hi_1] x ... x [lo_k, hi_k]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct AxisBox<T> {
    pub lo: Vec<T>,
    pub hi: Vec<T>,
}

impl<T: Scalar> AxisBox<T> {
    pub fn new(lo: Vec<T>, hi: Vec<T>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::Parameter("box corners differ in dimension".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(Error::Parameter(format!(
                "degenerate box lo={:?} hi={:?}",
                crate::error::to_f64_vec(&lo),
                crate::error::to_f64_vec(&hi)
            )));
        }
        Ok(Self { lo, hi })
    }

    /// The cube `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        Self {
            lo: vec![T::of(lo); dim],
            hi: vec![T::of(hi); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn width(&self, axis: usize) -> T {
        self.hi[axis] - self.lo[axis]
    }

    pub fn volume(&self) -> T {
        (0..self.dim())
            .map(|k| self.width(k))
            .fold(T::one(), |a, b| a * b)
    }

    pub fn contains(&self, x: &[T]) -> bool {
        self.contains_tol(x, T::zero())
    }

    pub fn contains_tol(&self, x: &[T], tol: T) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (a, b))| *v >= *a - tol && *v <= *b + tol)
    }

    /// True when `self` lies in the interior of `other`.
    pub fn strictly_inside(&self, other: &AxisBox<T>) -> bool {
        self.dim() == other.dim()
            && (0..self.dim()).all(|k| other.lo[k] < self.lo[k] && self.hi[k] < other.hi[k])
    }

    pub fn inside(&self, other: &AxisBox<T>) -> bool {
        self.dim() == other.dim()
            && (0..self.dim()).all(|k| other.lo[k] <= self.lo[k] && self.hi[k] <= other.hi[k])
    }

    /// Shrink every side by `by`; fails if the box would collapse.
    pub fn shrink(&self, by: T) -> Result<Self> {
        let lo: Vec<T> = self.lo.iter().map(|v| *v + by).collect();
        let hi: Vec<T> = self.hi.iter().map(|v| *v - by).collect();
        AxisBox::new(lo, hi).map_err(|_| Error::Geometry("box collapses when shrunk".into()))
    }

    pub fn center(&self) -> Vec<T> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| (*a + *b) * T::of(0.5))
            .collect()
    }

    /// Length of the main diagonal.
    pub fn diameter(&self) -> T {
        (0..self.dim())
            .map(|k| self.width(k) * self.width(k))
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    /// Append one more axis `[lo, hi]`.
    pub fn extend(&self, lo: T, hi: T) -> Self {
        let mut out = self.clone();
        out.lo.push(lo);
        out.hi.push(hi);
        out
    }
}

pub(crate) fn norm<T: Scalar>(v: &[T]) -> T {
    v.iter()
        .map(|a| *a * *a)
        .fold(T::zero(), |a, b| a + b)
        .sqrt()
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(x, y)| *x * *y)
        .fold(T::zero(), |s, v| s + v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_volume_and_containment() {
        let b = AxisBox::<f64>::cube(2, 0.0, 1.0);
        assert_eq!(b.volume(), 1.0);
        assert!(b.contains(&[0.5, 1.0]));
        assert!(!b.contains(&[0.5, 1.0 + 1e-9]));
        let outer = AxisBox::<f64>::cube(2, -1.0, 2.0);
        assert!(b.strictly_inside(&outer));
        assert!(!outer.strictly_inside(&b));
    }

    #[test]
    fn degenerate_box_rejected() {
        assert!(AxisBox::<f64>::new(vec![0.0], vec![0.0]).is_err());
        assert!(AxisBox::<f64>::cube(1, 0.0, 1.0).shrink(0.6).is_err());
    }
}
