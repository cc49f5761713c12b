//! The change of variables `Phi(z, t) = (z + t, Q_z(t))` with `Q_z(t) = g(z) + g'(z) t - (A/2) t^2`
//! for a C² boundary function in the plane.

use super::function::AlphaGraphFunction;
use super::graph::{GraphDomain, Region};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct PhiGadget<T: Scalar> {
    g: AlphaGraphFunction<T>,
    domain: GraphDomain<T>,
    m: T,
    a: T,
    r0: T,
    r1: T,
    z_lo: T,
    z_hi: T,
}

/// Image point and `|det J_Phi|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiImage<T> {
    pub x: T,
    pub y: T,
    pub jacobian: T,
}

impl<T: Scalar> PhiGadget<T> {
    /// Gadget with `A = 11M/4`, the midpoint of `(5M/2, 3M)`.
    pub fn new(g: AlphaGraphFunction<T>) -> Result<Self> {
        let m = g
            .m_cert()
            .ok_or_else(|| Error::Parameter("the gadget needs a C²-certified g".into()))?;
        Self::with_a(g, T::of(11.0) * m / T::of(4.0))
    }

    pub fn with_a(g: AlphaGraphFunction<T>, a: T) -> Result<Self> {
        if g.base_dim() != 1 {
            return Err(Error::Parameter(
                "the gadget is planar: g must be univariate".into(),
            ));
        }
        let m = g
            .m_cert()
            .ok_or_else(|| Error::Parameter("the gadget needs a C²-certified g".into()))?;
        if !(a > T::of(2.5) * m && a < T::of(3.0) * m) {
            return Err(Error::Parameter(format!(
                "A = {a} outside (5M/2, 3M) with M = {m}"
            )));
        }
        let r0 = (T::of(2.0) / m).sqrt();
        let r1 = T::of(2.0) / (T::of(3.0) * m).sqrt();
        debug_assert!(r1 < r0 && r0 <= T::one() / T::of(3.0));
        let domain = GraphDomain::c2_setting(g.clone())?;
        Ok(Self {
            g,
            domain,
            m,
            a,
            r0,
            r1,
            z_lo: -T::one(),
            z_hi: T::of(2.0),
        })
    }

    pub fn m(&self) -> T {
        self.m
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn r0(&self) -> T {
        self.r0
    }

    pub fn r1(&self) -> T {
        self.r1
    }

    /// `G` (x in [0,1], depth 1) and `G_*` (x in [-1,2], depth 4).
    pub fn domain(&self) -> &GraphDomain<T> {
        &self.domain
    }

    /// `(z, t)` in `E`: `z, z + t in [-1, 2]`, `|t| <= r0`.
    pub fn in_e(&self, z: T, t: T) -> bool {
        z >= self.z_lo
            && z <= self.z_hi
            && z + t >= self.z_lo
            && z + t <= self.z_hi
            && t.abs() <= self.r0
    }

    pub fn in_e_plus(&self, z: T, t: T) -> bool {
        t >= T::zero() && self.in_e(z, t)
    }

    pub fn in_e_minus(&self, z: T, t: T) -> bool {
        t <= T::zero() && self.in_e(z, t)
    }

    /// `Q_z(t)`.
    pub fn q(&self, z: T, t: T) -> T {
        let gp = self.g.gradient(&[z])[0];
        self.g.value(&[z]) + gp * t - self.a * T::of(0.5) * t * t
    }

    fn g2(&self, z: T) -> T {
        self.g.hessian(&[z]).map(|h| h[0]).unwrap_or(T::zero())
    }

    pub fn forward(&self, z: T, t: T) -> Result<PhiImage<T>> {
        if !self.in_e(z, t) {
            return Err(Error::ParameterDomain {
                z: z.to_f64_lossy(),
                t: t.to_f64_lossy(),
            });
        }
        Ok(PhiImage {
            x: z + t,
            y: self.q(z, t),
            jacobian: (self.a + self.g2(z)) * t.abs(),
        })
    }

    /// The unique `(z, t)` with `0 <= t <= r1` and `Phi(z, t) = (x, y)` for `(x, y)` in `G`.
    pub fn inverse_plus(&self, x: T, y: T) -> Result<(T, T)> {
        self.domain.check(Region::G, &[x, y])?;
        let gx = self.g.value(&[x]);
        let target = (gx - y).max(T::zero());
        let h = |t: T| gx - self.q(x - t, t);
        let (mut lo, mut hi) = (T::zero(), self.r1);
        if target == T::zero() {
            return Ok((x, T::zero()));
        }
        if h(hi) < target {
            return Err(Error::Convergence(format!(
                "no crossing on [0, r1]: h(r1) = {} < {}",
                h(hi),
                target
            )));
        }
        for _ in 0..200 {
            let mid = (lo + hi) * T::of(0.5);
            if mid <= lo || mid >= hi {
                break;
            }
            if h(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = (lo + hi) * T::of(0.5);
        let z = x - t;
        let img = self.forward(z, t)?;
        let tol = T::of(1e-10).max(T::epsilon() * T::of(64.0));
        let res = (img.x - x).abs().max((img.y - y).abs());
        if res > tol {
            return Err(Error::Convergence(format!(
                "inverse residual {res} above tolerance"
            )));
        }
        Ok((z, t))
    }

    /// `|det|` of the central-difference Jacobian of `Phi` with step `h`.
    pub fn fd_jacobian(&self, z: T, t: T, h: T) -> T {
        let two_h = h + h;
        let dyz = (self.q(z + h, t) - self.q(z - h, t)) / two_h;
        let dyt = (self.q(z, t + h) - self.q(z, t - h)) / two_h;
        // x = z + t has partials (1, 1)
        (dyt - dyz).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::AxisBox;

    fn flat() -> PhiGadget<f64> {
        let g = AlphaGraphFunction::flat(1, AxisBox::cube(1, -4.0, 4.0)).unwrap();
        PhiGadget::new(g).unwrap()
    }

    #[test]
    fn constants_for_flat_boundary() {
        let p = flat();
        assert_eq!(p.m(), 18.0);
        assert_eq!(p.a(), 49.5);
        assert!((p.r0() - 1.0 / 3.0).abs() < 1e-15);
        assert!(p.r1() < p.r0());
    }

    #[test]
    fn forward_examples() {
        let p = flat();
        let img = p.forward(0.0, 0.1).unwrap();
        assert!((img.x - 0.1).abs() < 1e-15);
        assert!((img.y + 0.2475).abs() < 1e-15);
        assert!((img.jacobian - 4.95).abs() < 1e-14);
        let img = p.forward(0.5, 0.0).unwrap();
        assert_eq!((img.x, img.y, img.jacobian), (0.5, 0.0, 0.0));
        assert!(matches!(
            p.forward(0.0, 0.5),
            Err(Error::ParameterDomain { .. })
        ));
    }

    #[test]
    fn inverse_closed_form_for_flat_boundary() {
        let p = flat();
        let (x, y) = (0.4, -0.3);
        let (z, t) = p.inverse_plus(x, y).unwrap();
        let want = (-2.0 * y / p.a()).sqrt();
        assert!((t - want).abs() < 1e-12);
        assert!((z - (x - want)).abs() < 1e-12);
        assert_eq!(p.inverse_plus(0.3, 0.0).unwrap(), (0.3, 0.0));
    }

    #[test]
    fn non_c2_functions_are_rejected() {
        let g = crate::domain::function::model_function::<f64>("alpha:1.5", 1).unwrap();
        assert!(PhiGadget::new(g).is_err());
        let q = AlphaGraphFunction::paraboloid(1, 0.0, 0.25, AxisBox::cube(1, -4.0, 4.0)).unwrap();
        assert!(PhiGadget::with_a(q, 10.0).is_err());
    }
}
