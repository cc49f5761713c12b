//! A global C^alpha model domain covered by graph patches: the planar `l_alpha` unit ball.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::function::{AlphaGraphFunction, FnProfile};
use super::graph::GraphDomain;
use crate::error::{Error, Result};
use crate::geometry::AxisBox;
use crate::scalar::Scalar;

/// How patch coordinates `(s, t)` map to the plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// `(s, t)`
    Top,
    /// `(s, -t)`
    Bottom,
    /// `(t, s)`
    Right,
    /// `(-t, s)`
    Left,
}

impl Orientation {
    pub fn to_global<T: Scalar>(self, s: T, t: T) -> [T; 2] {
        match self {
            Orientation::Top => [s, t],
            Orientation::Bottom => [s, -t],
            Orientation::Right => [t, s],
            Orientation::Left => [-t, s],
        }
    }
}

#[derive(Clone, Debug)]
pub struct Patch<T: Scalar> {
    pub orientation: Orientation,
    pub domain: GraphDomain<T>,
}

#[derive(Clone, Debug)]
pub struct GeneralCAlphaDomain<T: Scalar> {
    pub atlas: Vec<Patch<T>>,
    pub kappa0: T,
    pub norm_alpha: T,
}

/// Outcome of the two-sided rolling-ball probe.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RollingBallCheck {
    pub boundary_points: usize,
    pub inner_violations: usize,
    pub outer_violations: usize,
    /// Largest `|p|_alpha - 1` over inner-ball probes and `1 - |p|_alpha` over outer-ball probes.
    pub max_overshoot: f64,
}

impl<T: Scalar> GeneralCAlphaDomain<T> {
    /// `{|x|^a + |y|^a <= 1}` with four patches `t = (1 - |s|^a)^(1/a)`.
    pub fn lalpha_ball(alpha: f64, kappa0: f64) -> Result<Self> {
        if !(1.0 < alpha && alpha <= 2.0) {
            return Err(Error::Parameter(format!("alpha = {alpha} not in (1, 2]")));
        }
        if !(kappa0 > 0.0 && kappa0 < 1.0) {
            return Err(Error::Parameter("kappa0 must lie in (0, 1)".into()));
        }
        let inner = 0.5f64.powf(1.0 / alpha);
        let outer = 0.75f64.powf(1.0 / alpha);
        let a = T::of(alpha);
        let value = move |x: &[T]| (T::one() - x[0].abs().powf(a)).powf(T::one() / a);
        let gradient = move |x: &[T], g: &mut [T]| {
            let s = x[0];
            g[0] = if s == T::zero() {
                T::zero()
            } else {
                -s.signum()
                    * s.abs().powf(a - T::one())
                    * (T::one() - s.abs().powf(a)).powf(T::one() / a - T::one())
            };
        };
        let profile = FnProfile {
            dim: 1,
            value: Arc::new(value),
            gradient: Arc::new(gradient),
            hessian: None,
            kinks: vec![T::zero()],
        };
        let bx = AxisBox::cube(1, -outer, outer);
        let provisional =
            AlphaGraphFunction::new(Arc::new(profile.clone()), a, T::one(), bx.clone(), None)?;
        // sampled Hoelder ratio with a safety factor stands in for a closed-form constant
        let l = (provisional.hoelder_ratio(20_000, 3).to_f64_lossy() * 1.25).max(1.0);
        let g = AlphaGraphFunction::new(Arc::new(profile), a, T::of(l), bx, None)?;
        let mut atlas = Vec::new();
        for o in [
            Orientation::Top,
            Orientation::Bottom,
            Orientation::Right,
            Orientation::Left,
        ] {
            let domain = GraphDomain::new(
                g.clone(),
                AxisBox::cube(1, -inner, inner),
                AxisBox::cube(1, -outer, outer),
                T::of(0.25),
                T::of(0.5),
            )?;
            atlas.push(Patch {
                orientation: o,
                domain,
            });
        }
        Ok(Self {
            atlas,
            kappa0: T::of(kappa0),
            norm_alpha: a,
        })
    }

    pub fn norm(&self, p: &[T]) -> T {
        p.iter()
            .map(|v| v.abs().powf(self.norm_alpha))
            .sum::<T>()
            .powf(T::one() / self.norm_alpha)
    }

    pub fn contains(&self, p: &[T]) -> bool {
        self.norm(p) <= T::one()
    }

    /// Euclidean unit outer normal at a boundary point.
    pub fn outer_normal(&self, p: &[T]) -> [T; 2] {
        let a = self.norm_alpha;
        let gx = p[0].signum() * p[0].abs().powf(a - T::one());
        let gy = p[1].signum() * p[1].abs().powf(a - T::one());
        let len = (gx * gx + gy * gy).sqrt();
        [gx / len, gy / len]
    }

    /// Boundary point of the patch at parameter `s`.
    pub fn patch_boundary_point(&self, patch: &Patch<T>, s: T) -> [T; 2] {
        patch.orientation.to_global(s, patch.domain.g().value(&[s]))
    }

    /// Samples boundary points of every patch over its inner box and probes
    /// `B(xi - kappa0 n, kappa0)` inside and `B(xi + kappa0 n, kappa0)` outside the domain.
    pub fn rolling_ball_check(
        &self,
        per_patch: usize,
        probes: usize,
        seed: u64,
    ) -> RollingBallCheck {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = self.kappa0;
        let a = self.norm_alpha;
        let slack = T::of(1e-9);
        let mut out = RollingBallCheck {
            boundary_points: 0,
            inner_violations: 0,
            outer_violations: 0,
            max_overshoot: f64::NEG_INFINITY,
        };
        for patch in &self.atlas {
            let bx = patch.domain.inner_box();
            for _ in 0..per_patch {
                let s = bx.lo[0] + bx.width(0) * T::of(rng.random::<f64>());
                let xi = self.patch_boundary_point(patch, s);
                let n = self.outer_normal(&xi);
                out.boundary_points += 1;
                let ci = [xi[0] - k * n[0], xi[1] - k * n[1]];
                let co = [xi[0] + k * n[0], xi[1] + k * n[1]];
                let mut bad_in = false;
                let mut bad_out = false;
                for j in 0..probes {
                    // points on the l_alpha sphere of radius kappa0, plus a shrunken copy
                    let th = T::of(2.0 * std::f64::consts::PI * j as f64 / probes as f64);
                    let (c, s_) = (th.cos(), th.sin());
                    let scale = (c.abs().powf(a) + s_.abs().powf(a)).powf(-T::one() / a);
                    let u = [c * scale * k, s_ * scale * k];
                    let pin = [ci[0] + u[0], ci[1] + u[1]];
                    let over = self.norm(&pin) - T::one();
                    out.max_overshoot = out.max_overshoot.max(over.to_f64_lossy());
                    bad_in |= over > slack;
                    for frac in [T::one(), T::of(0.5)] {
                        let pout = [co[0] + frac * u[0], co[1] + frac * u[1]];
                        let over = T::one() - self.norm(&pout);
                        out.max_overshoot = out.max_overshoot.max(over.to_f64_lossy());
                        bad_out |= over > slack;
                    }
                }
                out.inner_violations += bad_in as usize;
                out.outer_violations += bad_out as usize;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn patches_cover_the_boundary() {
        let dom = GeneralCAlphaDomain::<f64>::lalpha_ball(1.5, 0.1).unwrap();
        for j in 0..720 {
            let th = 2.0 * std::f64::consts::PI * j as f64 / 720.0;
            let (c, s) = (th.cos(), th.sin());
            let sc = (c.abs().powf(1.5) + s.abs().powf(1.5)).powf(-1.0 / 1.5);
            let p = [c * sc, s * sc];
            let covered = dom.atlas.iter().any(|patch| {
                let (s, t) = match patch.orientation {
                    Orientation::Top => (p[0], p[1]),
                    Orientation::Bottom => (p[0], -p[1]),
                    Orientation::Right => (p[1], p[0]),
                    Orientation::Left => (p[1], -p[0]),
                };
                t > 0.0
                    && patch.domain.inner_box().contains(&[s])
                    && (patch.domain.g().value(&[s]) - t).abs() < 1e-12
            });
            assert!(covered, "{p:?}");
        }
    }

    #[test]
    fn rolling_balls_fit() {
        for (alpha, kappa0) in [(1.5, 1e-3), (1.75, 1e-2), (2.0, 0.1)] {
            let dom = GeneralCAlphaDomain::<f64>::lalpha_ball(alpha, kappa0).unwrap();
            let r = dom.rolling_ball_check(200, 256, 5);
            assert_eq!(
                r.inner_violations + r.outer_violations,
                0,
                "alpha {alpha}: {r:?}"
            );
        }
    }

    #[test]
    fn tilted_inner_ball_overshoots_near_the_apex_for_small_alpha() {
        // the normal turns like |s|^(alpha-1) near the apex, faster than the ball can follow
        let dom = GeneralCAlphaDomain::<f64>::lalpha_ball(1.25, 0.1).unwrap();
        let r = dom.rolling_ball_check(400, 256, 5);
        assert!(r.inner_violations > 0);
        assert!(r.max_overshoot < 0.02);
    }

    #[test]
    fn patch_functions_satisfy_their_certificate() {
        let dom = GeneralCAlphaDomain::<f64>::lalpha_ball(1.5, 0.1).unwrap();
        let g = dom.atlas[0].domain.g();
        assert!(g.hoelder_ratio(10_000, 99) <= 1.0);
    }
}
