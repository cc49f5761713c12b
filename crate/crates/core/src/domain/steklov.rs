//! Steklov smoothing `g_delta(x) = (2 delta)^-2k ∫∫_{[-delta,delta]^2k} g(x + u + v) du dv`.
//!
//! The double average is a convolution with the tensor triangular kernel
//! `k(s) = (2 delta - |s|) / (4 delta^2)` on `[-2 delta, 2 delta]`. Derivatives are taken under the
//! integral: the gradient averages `grad g`, and the Hessian integrates `d_i g` against `k'`.

use std::sync::Arc;

use super::function::{AlphaGraphFunction, GraphProfile};
use crate::error::{Error, Result};
use crate::quadrature::{graded_breaks, panel_rule};
use crate::scalar::Scalar;

/// Quadrature controls for the smoothing integrals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteklovSpec {
    pub panel_order: usize,
    pub kink_panels: usize,
    pub grading_ratio: f64,
}

impl Default for SteklovSpec {
    fn default() -> Self {
        Self {
            panel_order: 12,
            kink_panels: 24,
            grading_ratio: 0.25,
        }
    }
}

#[derive(Clone, Debug)]
struct SteklovProfile<T: Scalar> {
    source: AlphaGraphFunction<T>,
    delta: T,
    spec: SteklovSpec,
}

struct AxisRule<T> {
    s: Vec<T>,
    /// quadrature weight times kernel
    wk: Vec<T>,
    /// quadrature weight times `sign(s) / (4 delta^2)` (minus the kernel derivative)
    wdk: Vec<T>,
}

impl<T: Scalar> SteklovProfile<T> {
    fn axis_rule(&self, x: &[T], axis: usize) -> AxisRule<T> {
        let two_d = self.delta + self.delta;
        let cuts: Vec<T> = self
            .source
            .kinks(axis)
            .into_iter()
            .map(|c| c - x[axis])
            .filter(|c| c.abs() < two_d)
            .collect();
        let mut breaks = graded_breaks(
            -two_d,
            two_d,
            &cuts,
            self.spec.kink_panels,
            T::of(self.spec.grading_ratio),
            2,
        );
        // the kernel itself is only piecewise linear, so 0 needs a break but no grading
        if !breaks.iter().any(|b| *b == T::zero()) {
            breaks.push(T::zero());
            breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        }
        let rule = panel_rule(&breaks, self.spec.panel_order);
        let inv4 = T::one() / (two_d * two_d);
        let mut out = AxisRule {
            s: rule.nodes.clone(),
            wk: Vec::with_capacity(rule.len()),
            wdk: Vec::with_capacity(rule.len()),
        };
        for (s, w) in rule.nodes.iter().zip(&rule.weights) {
            out.wk.push(*w * (two_d - s.abs()) * inv4);
            out.wdk.push(*w * s.signum() * inv4);
        }
        out
    }

    fn rules(&self, x: &[T]) -> Vec<AxisRule<T>> {
        (0..x.len()).map(|a| self.axis_rule(x, a)).collect()
    }

    /// Visits every tensor node `x + s` with its index tuple.
    fn visit<V: FnMut(&[usize], &[T])>(&self, x: &[T], rules: &[AxisRule<T>], mut visit: V) {
        let k = x.len();
        let mut idx = vec![0usize; k];
        let mut p: Vec<T> = (0..k).map(|a| x[a] + rules[a].s[0]).collect();
        loop {
            visit(&idx, &p);
            let mut a = 0;
            loop {
                if a == k {
                    return;
                }
                idx[a] += 1;
                if idx[a] < rules[a].s.len() {
                    p[a] = x[a] + rules[a].s[idx[a]];
                    break;
                }
                idx[a] = 0;
                p[a] = x[a] + rules[a].s[0];
                a += 1;
            }
        }
    }
}

impl<T: Scalar> GraphProfile<T> for SteklovProfile<T> {
    fn base_dim(&self) -> usize {
        self.source.base_dim()
    }

    fn value(&self, x: &[T]) -> T {
        let rules = self.rules(x);
        let mut acc = T::zero();
        self.visit(x, &rules, |idx, p| {
            let w: T = idx
                .iter()
                .enumerate()
                .map(|(a, i)| rules[a].wk[*i])
                .fold(T::one(), |u, v| u * v);
            acc = acc + w * self.source.value(p);
        });
        acc
    }

    fn gradient(&self, x: &[T], grad: &mut [T]) {
        let rules = self.rules(x);
        let k = x.len();
        let mut g = vec![T::zero(); k];
        grad.iter_mut().for_each(|v| *v = T::zero());
        self.visit(x, &rules, |idx, p| {
            let w: T = idx
                .iter()
                .enumerate()
                .map(|(a, i)| rules[a].wk[*i])
                .fold(T::one(), |u, v| u * v);
            self.source.gradient_into(p, &mut g);
            for a in 0..k {
                grad[a] = grad[a] + w * g[a];
            }
        });
    }

    fn hessian(&self, x: &[T], hess: &mut [T]) -> bool {
        let rules = self.rules(x);
        let k = x.len();
        let mut g = vec![T::zero(); k];
        hess.iter_mut().for_each(|v| *v = T::zero());
        self.visit(x, &rules, |idx, p| {
            self.source.gradient_into(p, &mut g);
            for j in 0..k {
                let mut w = T::one();
                for (a, i) in idx.iter().enumerate() {
                    w = w * if a == j {
                        rules[a].wdk[*i]
                    } else {
                        rules[a].wk[*i]
                    };
                }
                for i in 0..k {
                    hess[i * k + j] = hess[i * k + j] + w * g[i];
                }
            }
        });
        // symmetrize the two quadrature evaluations of each mixed partial
        for i in 0..k {
            for j in (i + 1)..k {
                let m = (hess[i * k + j] + hess[j * k + i]) * T::of(0.5);
                hess[i * k + j] = m;
                hess[j * k + i] = m;
            }
        }
        true
    }
}

/// `sup |g_delta''|` bound from the Hoelder condition: each entry is at most
/// `L 2^(2 alpha - 3) delta^(alpha - 2) / alpha`, and the operator norm at most `k` times that.
pub fn steklov_curvature_bound(alpha: f64, l: f64, delta: f64, base_dim: usize) -> f64 {
    base_dim as f64 * l * 2f64.powf(2.0 * alpha - 3.0) * delta.powf(alpha - 2.0) / alpha
}

/// The C²-certified Steklov transform of `g`; its base box is `g`'s box shrunk by `2 delta`.
pub fn steklov_transform<T: Scalar>(
    g: &AlphaGraphFunction<T>,
    delta: T,
    spec: SteklovSpec,
) -> Result<AlphaGraphFunction<T>> {
    if !(delta > T::zero()) {
        return Err(Error::Parameter(format!(
            "delta = {delta} must be positive"
        )));
    }
    if spec.panel_order < 2 || !(spec.grading_ratio > 0.0 && spec.grading_ratio < 1.0) {
        return Err(Error::Parameter("invalid Steklov quadrature spec".into()));
    }
    let bx = g
        .base_box()
        .shrink(delta + delta)
        .map_err(|_| Error::Geometry(format!("delta = {delta} too large for the base box of g")))?;
    let curv = steklov_curvature_bound(
        g.alpha().to_f64_lossy(),
        g.hoelder_l().to_f64_lossy(),
        delta.to_f64_lossy(),
        g.base_dim(),
    );
    let profile = SteklovProfile {
        source: g.clone(),
        delta,
        spec,
    };
    AlphaGraphFunction::new(
        Arc::new(profile),
        T::of(2.0),
        T::of(curv.max(1.0)),
        bx,
        Some(T::of(curv)),
    )
}

/// `delta` with `C L delta^alpha = b / 8`.
pub fn delta_from_b(b: f64, l: f64, alpha: f64, c_tilde: f64) -> Result<f64> {
    if !(b > 0.0 && l > 0.0 && c_tilde > 0.0) {
        return Err(Error::Parameter("b, L and C must be positive".into()));
    }
    Ok((b / (8.0 * c_tilde * l)).powf(1.0 / alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::function::{model_function, FnProfile};
    use crate::geometry::AxisBox;

    fn abs_fn() -> AlphaGraphFunction<f64> {
        let p = FnProfile {
            dim: 1,
            value: Arc::new(|x: &[f64]| x[0].abs()),
            gradient: Arc::new(|x: &[f64], g: &mut [f64]| {
                g[0] = x[0].signum() * (x[0] != 0.0) as u8 as f64
            }),
            hessian: None,
            kinks: vec![0.0],
        };
        AlphaGraphFunction::new(Arc::new(p), 1.0, 2.0, AxisBox::cube(1, -4.0, 4.0), None).unwrap()
    }

    #[test]
    fn affine_is_preserved() {
        let g = AlphaGraphFunction::<f64>::affine(0.5, &[2.0, -1.0], AxisBox::cube(2, -4.0, 4.0))
            .unwrap();
        let s = steklov_transform(&g, 0.1, SteklovSpec::default()).unwrap();
        let x = [0.3, -0.2];
        assert!((s.value(&x) - g.value(&x)).abs() < 1e-13);
        let gr = s.gradient(&x);
        assert!((gr[0] - 2.0).abs() < 1e-13 && (gr[1] + 1.0).abs() < 1e-13);
        assert!(s.hessian(&x).unwrap().iter().all(|h| h.abs() < 1e-12));
    }

    #[test]
    fn square_gains_two_thirds_delta_squared() {
        let g = AlphaGraphFunction::<f64>::paraboloid(1, 0.0, 1.0, AxisBox::cube(1, -4.0, 4.0))
            .unwrap();
        for delta in [0.05, 0.2, 0.5] {
            let s = steklov_transform(&g, delta, SteklovSpec::default()).unwrap();
            for x in [-1.0, 0.0, 0.7] {
                let want = x * x + 2.0 * delta * delta / 3.0;
                assert!((s.value(&[x]) - want).abs() < 1e-13);
                assert!((s.gradient(&[x])[0] - 2.0 * x).abs() < 1e-13);
                assert!((s.hessian(&[x]).unwrap()[0] - 2.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn abs_at_zero_is_two_thirds_delta() {
        let g = abs_fn();
        for delta in [0.01, 0.1, 0.3] {
            let s = steklov_transform(&g, delta, SteklovSpec::default()).unwrap();
            assert!((s.value(&[0.0]) - 2.0 * delta / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn hessian_is_the_second_difference() {
        let g = model_function::<f64>("alpha:1.5", 1).unwrap();
        let delta = 0.05;
        let s = steklov_transform(&g, delta, SteklovSpec::default()).unwrap();
        for x in [0.0, 0.03, 0.5] {
            let h = s.hessian(&[x]).unwrap()[0];
            let dd = (g.value(&[x + 2.0 * delta]) - 2.0 * g.value(&[x])
                + g.value(&[x - 2.0 * delta]))
                / (4.0 * delta * delta);
            assert!((h - dd).abs() < 1e-9 * dd.abs().max(1.0), "{h} {dd}");
            assert!(h.abs() <= s.curvature_bound().unwrap() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn two_dimensional_transform_is_symmetric() {
        let g = model_function::<f64>("alpha:1.5", 2).unwrap();
        let s = steklov_transform(
            &g,
            0.1,
            SteklovSpec {
                panel_order: 8,
                kink_panels: 8,
                grading_ratio: 0.25,
            },
        )
        .unwrap();
        let h = s.hessian(&[0.05, -0.02]).unwrap();
        assert!((h[1] - h[2]).abs() < 1e-14);
        assert!(h[1].abs() < 1e-10);
    }

    #[test]
    fn delta_too_large_is_a_geometry_error() {
        let g = model_function::<f64>("quad", 1).unwrap();
        assert!(matches!(
            steklov_transform(&g, 5.0, SteklovSpec::default()),
            Err(Error::Geometry(_))
        ));
        assert!(steklov_transform(&g, -1.0, SteklovSpec::default()).is_err());
    }

    #[test]
    fn delta_from_b_inverts() {
        let d = delta_from_b(0.5, 2.0, 1.5, 1.0).unwrap();
        assert!((2.0 * d.powf(1.5) - 0.5 / 8.0).abs() < 1e-15);
    }
}
