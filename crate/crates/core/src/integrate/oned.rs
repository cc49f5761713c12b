//! One-dimensional weighted integrals: `(∫_0^1 |f|^p x^beta)^(1/p)` and doubling constants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::MultiPoly;
use crate::quadrature::{geometric_breaks, panel_rule};
use crate::scalar::{CompensatedSum, Scalar};

/// `∫_lo^hi w` by Gauss panels graded toward `lo`.
pub fn integrate_graded_at_lo<T: Scalar, W: Fn(T) -> T>(
    w: &W,
    lo: T,
    hi: T,
    panels: usize,
    order: usize,
) -> T {
    if !(hi > lo) {
        return T::zero();
    }
    let breaks = geometric_breaks(lo, hi, panels, T::of(0.25), true);
    panel_rule(&breaks, order).integrate(w)
}

/// `(∫_0^1 |f(x)|^p x^beta dx)^(1/p)` for a univariate polynomial.
pub fn weighted_1d_norm<T: Scalar>(f: &MultiPoly<T>, p: f64, beta: f64) -> Result<T> {
    if f.dim() != 1 {
        return Err(Error::Parameter(
            "weighted_1d_norm needs a univariate polynomial".into(),
        ));
    }
    if !(beta >= -0.5) {
        return Err(Error::Parameter(format!(
            "beta = {beta} must be at least -1/2"
        )));
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Parameter(format!(
            "p = {p} must be positive and finite"
        )));
    }
    let (pt, bt) = (T::of(p), T::of(beta));
    let integrand = |x: T| f.eval(&[x]).abs().powf(pt) * x.powf(bt);
    let base = ((p * f.degree() as f64 + beta.max(0.0) + 1.0) / 2.0).ceil() as usize + 2;
    let mut prev = integrate_graded_at_lo(&integrand, T::zero(), T::one(), 40, base.max(8));
    for level in 1..4 {
        let cur = integrate_graded_at_lo(&integrand, T::zero(), T::one(), 40, base.max(8) << level);
        let done = (cur - prev).abs() <= T::of(1e-12) * cur.abs();
        prev = cur;
        if done {
            break;
        }
    }
    Ok(prev.max(T::zero()).powf(T::one() / pt))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoublingEstimate {
    pub constant: f64,
    /// the maximizing `J`
    pub worst: (f64, f64),
    pub intervals_checked: usize,
    /// intervals with zero mass, skipped
    pub skipped: usize,
}

/// Max of `∫_{2J ∩ I} w / ∫_J w` over dyadic intervals `J = [lo + k l, lo + (k+1) l]`,
/// `l = |I| / 2^s`, `s = 1..=num_scales`; `2J` has the midpoint of `J` and twice its length.
/// At most `num_intervals` intervals per scale are taken, always including both ends of `I`.
/// Integrals are graded toward `lo`, where the weights of interest are singular.
pub fn doubling_constant_estimate<T: Scalar, W: Fn(T) -> T>(
    w: &W,
    lo: T,
    hi: T,
    num_intervals: usize,
    num_scales: usize,
) -> Result<DoublingEstimate> {
    if !(hi > lo) || num_intervals < 2 || num_scales == 0 {
        return Err(Error::Parameter(
            "need lo < hi, num_intervals >= 2, num_scales >= 1".into(),
        ));
    }
    let mass = |a: T, b: T| integrate_graded_at_lo(w, a, b, 40, 16);
    let mut best = DoublingEstimate {
        constant: 0.0,
        worst: (0.0, 0.0),
        intervals_checked: 0,
        skipped: 0,
    };
    let half = T::of(0.5);
    for s in 1..=num_scales {
        let count = 1usize << s.min(60);
        let len = (hi - lo) / T::of_usize(count);
        let picks: Vec<usize> = if count <= num_intervals {
            (0..count).collect()
        } else {
            let mut v: Vec<usize> = (0..num_intervals)
                .map(|i| i * (count - 1) / (num_intervals - 1))
                .collect();
            v.dedup();
            v
        };
        for k in picks {
            let a = lo + len * T::of_usize(k);
            let b = a + len;
            let inner = mass(a, b);
            best.intervals_checked += 1;
            if !(inner > T::zero()) {
                best.skipped += 1;
                continue;
            }
            let mid = (a + b) * half;
            let a2 = (mid - len).max(lo);
            let b2 = (mid + len).min(hi);
            let mut outer = CompensatedSum::new();
            outer.add(mass(a2, a));
            outer.add(inner);
            outer.add(mass(b, b2));
            let r = (outer.value() / inner).to_f64_lossy();
            if r > best.constant {
                best.constant = r;
                best.worst = (a.to_f64_lossy(), b.to_f64_lossy());
            }
        }
    }
    Ok(best)
}
