//! Graph domains `G`, `G_*` below the graph of `g`, their tangent geometry and boundary distance.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::function::AlphaGraphFunction;
use crate::error::{to_f64_vec, Error, Result};
use crate::field::ScalarField;
use crate::geometry::{dot, AxisBox};
use crate::scalar::Scalar;

/// Which of the two nested sets of a [`GraphDomain`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    /// `{x in D1, g(x) - depth_G <= y <= g(x)}`.
    G,
    /// `{x in D2, g(x) - depth_Gstar <= y <= g(x)}`.
    GStar,
}

impl Region {
    pub fn name(self) -> &'static str {
        match self {
            Region::G => "G",
            Region::GStar => "G*",
        }
    }
}

#[derive(Clone, Debug)]
pub struct GraphDomain<T: Scalar> {
    g: AlphaGraphFunction<T>,
    inner_box: AxisBox<T>,
    outer_box: AxisBox<T>,
    depth_g: T,
    depth_gstar: T,
}

impl<T: Scalar> GraphDomain<T> {
    pub fn new(
        g: AlphaGraphFunction<T>,
        inner_box: AxisBox<T>,
        outer_box: AxisBox<T>,
        depth_g: T,
        depth_gstar: T,
    ) -> Result<Self> {
        let k = g.base_dim();
        if inner_box.dim() != k || outer_box.dim() != k {
            return Err(Error::Parameter("box dimension does not match g".into()));
        }
        if !inner_box.strictly_inside(&outer_box) {
            return Err(Error::Parameter("D1 must lie strictly inside D2".into()));
        }
        if !outer_box.inside(g.base_box()) {
            return Err(Error::Parameter(
                "D2 must lie inside the base box of g".into(),
            ));
        }
        if !(depth_g > T::zero() && depth_g < depth_gstar) {
            return Err(Error::Parameter(format!(
                "depths must satisfy 0 < depth_G < depth_Gstar, got {depth_g}, {depth_gstar}"
            )));
        }
        Ok(Self {
            g,
            inner_box,
            outer_box,
            depth_g,
            depth_gstar,
        })
    }

    /// `D1 = [0,1]^(d-1)`, `D2 = [-1,2]^(d-1)`, depths 1 and 8 (the tangential Bernstein setting).
    pub fn standard(g: AlphaGraphFunction<T>) -> Result<Self> {
        let k = g.base_dim();
        Self::new(
            g,
            AxisBox::cube(k, 0.0, 1.0),
            AxisBox::cube(k, -1.0, 2.0),
            T::one(),
            T::of(8.0),
        )
    }

    /// The C² setting of the change-of-variables gadget: `x in [0,1]` depth 1, `G_*` over `[-1,2]` depth 4.
    pub fn c2_setting(g: AlphaGraphFunction<T>) -> Result<Self> {
        let k = g.base_dim();
        Self::new(
            g,
            AxisBox::cube(k, 0.0, 1.0),
            AxisBox::cube(k, -1.0, 2.0),
            T::one(),
            T::of(4.0),
        )
    }

    /// Mesh setting: `G` over `[0,1]^(d-1)` with depth 1/4, `G_*` depth 2 over `[-2,2]` (d = 2)
    /// or `[-2d, 2d]^(d-1)` (d >= 3).
    pub fn mesh_setting(g: AlphaGraphFunction<T>) -> Result<Self> {
        let k = g.base_dim();
        let d = k + 1;
        let r = if d == 2 { 2.0 } else { 2.0 * d as f64 };
        Self::new(
            g,
            AxisBox::cube(k, 0.0, 1.0),
            AxisBox::cube(k, -r, r),
            T::of(0.25),
            T::of(2.0),
        )
    }

    pub fn dim(&self) -> usize {
        self.g.base_dim() + 1
    }

    pub fn base_dim(&self) -> usize {
        self.g.base_dim()
    }

    pub fn g(&self) -> &AlphaGraphFunction<T> {
        &self.g
    }

    pub fn inner_box(&self) -> &AxisBox<T> {
        &self.inner_box
    }

    pub fn outer_box(&self) -> &AxisBox<T> {
        &self.outer_box
    }

    pub fn depth_g(&self) -> T {
        self.depth_g
    }

    pub fn depth_gstar(&self) -> T {
        self.depth_gstar
    }

    pub fn base(&self, region: Region) -> &AxisBox<T> {
        match region {
            Region::G => &self.inner_box,
            Region::GStar => &self.outer_box,
        }
    }

    pub fn depth(&self, region: Region) -> T {
        match region {
            Region::G => self.depth_g,
            Region::GStar => self.depth_gstar,
        }
    }

    /// Lebesgue measure of a region: `|base| * depth` (the shear `y = g(x) - z` preserves area).
    pub fn measure(&self, region: Region) -> T {
        self.base(region).volume() * self.depth(region)
    }

    fn tol(&self, v: T) -> T {
        T::epsilon().sqrt() * T::of(1e-2) * (T::one() + v.abs())
    }

    /// `g(x) - y`.
    pub fn delta(&self, point: &[T]) -> T {
        let k = self.base_dim();
        self.g.value(&point[..k]) - point[k]
    }

    pub fn contains(&self, region: Region, point: &[T]) -> bool {
        let k = self.base_dim();
        if point.len() != k + 1 {
            return false;
        }
        let x = &point[..k];
        let bx = self.base(region);
        if !bx.contains_tol(x, self.tol(T::one())) {
            return false;
        }
        let z = self.delta(point);
        let depth = self.depth(region);
        z >= -self.tol(point[k]) && z <= depth + self.tol(depth)
    }

    pub fn check(&self, region: Region, point: &[T]) -> Result<()> {
        if self.contains(region, point) {
            Ok(())
        } else {
            Err(Error::Membership {
                point: to_f64_vec(point),
                region: region.name().into(),
            })
        }
    }

    /// Point `(x, g(x) - z)`.
    pub fn lift(&self, x: &[T], z: T) -> Vec<T> {
        let mut p = x.to_vec();
        p.push(self.g.value(x) - z);
        p
    }

    /// `delta_n = g(x) - y + 1/n^2` for points of `G_*`.
    pub fn delta_n(&self, point: &[T], n: usize) -> Result<T> {
        if n == 0 {
            return Err(Error::Parameter("n must be positive".into()));
        }
        self.check(Region::GStar, point)?;
        let nn = T::of_usize(n);
        Ok(self.delta(point).max(T::zero()) + T::one() / (nn * nn))
    }

    /// `xi_j(x) = e_j + d_j g(x) e_d`, `j = 1..d-1`.
    pub fn tangent_frame(&self, x: &[T]) -> Result<Vec<Vec<T>>> {
        self.check_outer(x)?;
        let k = self.base_dim();
        let grad = self.g.gradient(x);
        Ok((0..k)
            .map(|j| {
                let mut v = vec![T::zero(); k + 1];
                v[j] = T::one();
                v[k] = grad[j];
                v
            })
            .collect())
    }

    fn check_outer(&self, x: &[T]) -> Result<()> {
        if x.len() == self.base_dim() && self.outer_box.contains_tol(x, self.tol(T::one())) {
            Ok(())
        } else {
            Err(Error::OutsideBox {
                point: to_f64_vec(x),
                what: "D2".into(),
            })
        }
    }

    /// Unit normal `(grad g(u), -1) / |.|` of the graph at `(u, g(u))`.
    pub fn unit_normal(&self, u: &[T]) -> Vec<T> {
        let mut n = self.g.gradient(u);
        n.push(-T::one());
        let len = dot(&n, &n).sqrt();
        n.iter_mut().for_each(|v| *v = *v / len);
        n
    }

    /// `|grad_tan,u f(xi)|` for `f` with gradient `grad` at `xi`.
    pub fn tangential_norm(&self, grad: &[T], u: &[T]) -> T {
        tangential_part(grad, &self.unit_normal(u))
    }

    /// Norm of the projection of `grad f(xi)` onto the tangent space of the graph at `(u, g(u))`.
    pub fn tangential_gradient<F: ScalarField<T> + ?Sized>(
        &self,
        f: &F,
        u: &[T],
        xi: &[T],
    ) -> Result<T> {
        self.check_outer(u)?;
        self.check(Region::GStar, xi)?;
        let mut grad = vec![T::zero(); self.dim()];
        f.value_grad(xi, &mut grad);
        Ok(self.tangential_norm(&grad, u))
    }

    /// `c_* = 1 / (3 sqrt(1 + |grad g|_inf^2))` with the sup over `D2`.
    pub fn c_star(&self) -> T {
        let per_axis = if self.base_dim() == 1 { 4097 } else { 129 };
        let s = self.g.grad_sup(&self.outer_box, per_axis);
        T::one() / (T::of(3.0) * (T::one() + s * s).sqrt())
    }

    /// Axis box in `R^d` containing the region, padded slightly.
    pub fn bounding_box(&self, region: Region) -> AxisBox<T> {
        let bx = self.base(region).clone();
        let k = self.base_dim();
        let per_axis: usize = match k {
            1 => 2049,
            2 => 129,
            _ => 17,
        };
        let axes: Vec<Vec<T>> = (0..k)
            .map(|a| {
                let mut v: Vec<T> = (0..per_axis)
                    .map(|i| bx.lo[a] + bx.width(a) * T::of_usize(i) / T::of_usize(per_axis - 1))
                    .collect();
                v.extend(
                    self.g
                        .kinks(a)
                        .into_iter()
                        .filter(|c| *c >= bx.lo[a] && *c <= bx.hi[a]),
                );
                v
            })
            .collect();
        let (mut gmin, mut gmax) = (T::infinity(), T::neg_infinity());
        for_each_grid_point(&axes, |x| {
            let v = self.g.value(x);
            gmin = gmin.min(v);
            gmax = gmax.max(v);
        });
        let lo_y = gmin - self.depth(region);
        let pad = (gmax - lo_y) * T::of(1e-3);
        let mut lo = bx.lo.clone();
        let mut hi = bx.hi.clone();
        lo.push(lo_y - pad);
        hi.push(gmax + pad);
        AxisBox { lo, hi }
    }

    /// Uniform point of a region (uniform in `(x, z)`, which is uniform in area).
    pub fn random_point<R: Rng + ?Sized>(&self, region: Region, rng: &mut R) -> Vec<T> {
        let bx = self.base(region);
        let x: Vec<T> = (0..self.base_dim())
            .map(|a| bx.lo[a] + bx.width(a) * T::of(rng.random::<f64>()))
            .collect();
        let z = self.depth(region) * T::of(rng.random::<f64>());
        self.lift(&x, z)
    }

    /// Distance from `xi` to `Gamma' = {(u, g(u)) : u in D2}` and the minimizing base point.
    ///
    /// Grid scan with 256 points per base axis over the only candidates that can beat the
    /// vertical distance, followed by coordinate-wise golden-section refinement.
    pub fn dist_to_essential_boundary(&self, xi: &[T]) -> Result<(T, Vec<T>)> {
        self.check(Region::GStar, xi)?;
        let k = self.base_dim();
        let x0 = &xi[..k];
        let y0 = xi[k];
        let vertical = (self.g.value(x0) - y0).max(T::zero());
        if vertical == T::zero() {
            return Ok((T::zero(), x0.to_vec()));
        }
        let obj = |u: &[T]| {
            let mut s = (self.g.value(u) - y0).powi(2);
            for a in 0..k {
                s = s + (u[a] - x0[a]).powi(2);
            }
            s
        };
        let (lo, hi): (Vec<T>, Vec<T>) = (0..k)
            .map(|a| {
                (
                    (x0[a] - vertical).max(self.outer_box.lo[a]),
                    (x0[a] + vertical).min(self.outer_box.hi[a]),
                )
            })
            .unzip();
        let per_axis = 256usize;
        let axes: Vec<Vec<T>> = (0..k)
            .map(|a| {
                let mut v: Vec<T> = (0..per_axis)
                    .map(|i| lo[a] + (hi[a] - lo[a]) * T::of_usize(i) / T::of_usize(per_axis - 1))
                    .collect();
                v.push(x0[a]);
                v
            })
            .collect();
        let mut best = x0.to_vec();
        let mut best_val = obj(&best);
        for_each_grid_point(&axes, |u| {
            let v = obj(u);
            if v < best_val {
                best_val = v;
                best.copy_from_slice(u);
            }
        });
        let mut step: Vec<T> = (0..k)
            .map(|a| (hi[a] - lo[a]) / T::of_usize(per_axis - 1))
            .collect();
        for _sweep in 0..6 {
            for a in 0..k {
                let a_lo = (best[a] - step[a]).max(lo[a]);
                let a_hi = (best[a] + step[a]).min(hi[a]);
                let mut u = best.clone();
                let t = golden_section(a_lo, a_hi, |s| {
                    u[a] = s;
                    obj(&u)
                });
                u[a] = t;
                let v = obj(&u);
                if v < best_val {
                    best_val = v;
                    best = u;
                }
            }
            step.iter_mut().for_each(|s| *s = *s * T::of(0.5));
        }
        Ok((best_val.sqrt(), best))
    }

    /// `phi_{n,Gamma'}(xi) = sqrt(dist(xi, Gamma')) + 1/n`.
    pub fn phi_n(&self, xi: &[T], n: usize) -> Result<T> {
        let (d, _) = self.dist_to_essential_boundary(xi)?;
        Ok(d.sqrt() + T::one() / T::of_usize(n))
    }

    /// `D_{n,mu} f(xi)`: the largest tangential gradient of `f` at `xi` over boundary points
    /// `eta` of `Gamma'` with `|eta - xi| <= mu phi^(2/alpha)`, refined until stable.
    pub fn boundary_cap_max<F: ScalarField<T> + ?Sized>(
        &self,
        f: &F,
        xi: &[T],
        n: usize,
        mu: T,
    ) -> Result<T> {
        self.check(Region::G, xi)?;
        let mut ladder = CapLadder::new(self, xi, n, mu)?;
        let mut grad = vec![T::zero(); self.dim()];
        f.value_grad(xi, &mut grad);
        Ok(ladder.max_tangential(&grad).0)
    }
}

/// Norm of the component of `v` orthogonal to the unit vector `unit`.
#[inline]
pub fn tangential_part<T: Scalar>(v: &[T], unit: &[T]) -> T {
    let vn = dot(v, unit);
    (dot(v, v) - vn * vn).max(T::zero()).sqrt()
}

/// Calls `visit` on every point of the tensor grid spanned by `axes`.
pub(crate) fn for_each_grid_point<T: Scalar, V: FnMut(&[T])>(axes: &[Vec<T>], mut visit: V) {
    let k = axes.len();
    if k == 0 || axes.iter().any(|a| a.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; k];
    let mut x: Vec<T> = axes.iter().map(|a| a[0]).collect();
    loop {
        visit(&x);
        let mut a = 0;
        loop {
            if a == k {
                return;
            }
            idx[a] += 1;
            if idx[a] < axes[a].len() {
                x[a] = axes[a][idx[a]];
                break;
            }
            idx[a] = 0;
            x[a] = axes[a][0];
            a += 1;
        }
    }
}

/// Minimizer of a unimodal function on `[a, b]`.
pub(crate) fn golden_section<T: Scalar, F: FnMut(T) -> T>(mut a: T, mut b: T, mut f: F) -> T {
    let r = T::of((5f64.sqrt() - 1.0) / 2.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..80 {
        if (b - a).abs() <= T::epsilon() * (T::one() + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    (a + b) * T::of(0.5)
}

/// The f-independent part of a boundary cap: the unit normals at the sampled cap points.
#[derive(Clone, Debug)]
pub struct CapScan<T> {
    pub radius: T,
    pub per_axis: usize,
    normals: Vec<T>,
    dim: usize,
    /// planar caps forming one arc: the range of normal angles over it
    arc: Option<(T, T)>,
}

impl<T: Scalar> CapScan<T> {
    /// Cap points on a grid with `per_axis` points per base axis, the cap edges located by
    /// bisection between neighbouring grid points, and the nearest boundary point `nearest`.
    pub fn build(
        domain: &GraphDomain<T>,
        xi: &[T],
        radius: T,
        nearest: &[T],
        per_axis: usize,
    ) -> Self {
        let k = domain.base_dim();
        let ob = domain.outer_box();
        let axes: Vec<Vec<T>> = (0..k)
            .map(|a| {
                let lo = (xi[a] - radius).max(ob.lo[a]);
                let hi = (xi[a] + radius).min(ob.hi[a]);
                if per_axis < 2 || !(hi > lo) {
                    return vec![xi[a].max(ob.lo[a]).min(ob.hi[a])];
                }
                (0..per_axis)
                    .map(|i| lo + (hi - lo) * T::of_usize(i) / T::of_usize(per_axis - 1))
                    .collect()
            })
            .collect();
        let r2 = radius * radius;
        let excess = |u: &[T]| {
            let mut s = (domain.g().value(u) - xi[k]).powi(2);
            for a in 0..k {
                s = s + (u[a] - xi[a]).powi(2);
            }
            s - r2
        };
        let mut normals = domain.unit_normal(nearest);
        let mut points: Vec<Vec<T>> = Vec::new();
        for_each_grid_point(&axes, |u| points.push(u.to_vec()));
        let inside: Vec<bool> = points.iter().map(|u| excess(u) <= T::zero()).collect();
        let mut stride = 1usize;
        let mut strides = Vec::with_capacity(k);
        for ax in &axes {
            strides.push(stride);
            stride *= ax.len();
        }
        for (idx, u) in points.iter().enumerate() {
            if inside[idx] {
                normals.extend(domain.unit_normal(u));
            }
            for a in 0..k {
                let pos = (idx / strides[a]) % axes[a].len();
                if pos + 1 == axes[a].len() {
                    continue;
                }
                let nb = idx + strides[a];
                if inside[idx] == inside[nb] {
                    continue;
                }
                let (mut lo, mut hi) = if inside[idx] {
                    (u[a], points[nb][a])
                } else {
                    (points[nb][a], u[a])
                };
                // lo inside, hi outside
                let mut w = u.clone();
                for _ in 0..48 {
                    let mid = (lo + hi) * T::of(0.5);
                    w[a] = mid;
                    if excess(&w) <= T::zero() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                w[a] = lo;
                normals.extend(domain.unit_normal(&w));
            }
        }
        // a planar cap whose grid points form one run is an arc, and its normals sweep the
        // whole angle range between the extremes
        let runs = inside.windows(2).filter(|w| !w[0] && w[1]).count()
            + inside.first().map_or(0, |f| *f as usize);
        let arc = (k == 1 && runs <= 1).then(|| {
            normals
                .chunks_exact(2)
                .map(|nrm| nrm[1].atan2(nrm[0]))
                .fold((T::infinity(), T::neg_infinity()), |(lo, hi), t| {
                    (lo.min(t), hi.max(t))
                })
        });
        Self {
            radius,
            per_axis,
            normals,
            dim: k + 1,
            arc,
        }
    }

    pub fn len(&self) -> usize {
        self.normals.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    /// Maximum over the cap of the tangential part of `grad`.
    pub fn max_tangential(&self, grad: &[T]) -> T {
        if let Some((lo, hi)) = self.arc {
            // |grad| |sin(phi - theta)| over theta in [lo, hi]: the full norm when a normal is
            // orthogonal to grad, otherwise attained at an end of the arc
            let norm = (grad[0] * grad[0] + grad[1] * grad[1]).sqrt();
            if norm == T::zero() {
                return T::zero();
            }
            let phi = grad[1].atan2(grad[0]);
            let pi = T::PI();
            let half = pi * T::of(0.5);
            let first = phi - half + ((lo - (phi - half)) / pi).ceil() * pi;
            if first <= hi {
                return norm;
            }
            return (norm * (phi - lo).sin().abs()).max(norm * (phi - hi).sin().abs());
        }
        self.normals
            .chunks_exact(self.dim)
            .map(|nrm| tangential_part(grad, nrm))
            .fold(T::zero(), |a, b| a.max(b))
    }
}

/// Cap scans at doubling densities, built on demand and shared across gradients.
#[derive(Clone, Debug)]
pub struct CapLadder<'a, T: Scalar> {
    domain: &'a GraphDomain<T>,
    xi: Vec<T>,
    nearest: Vec<T>,
    radius: T,
    levels: Vec<CapScan<T>>,
    pub base_density: usize,
    pub max_levels: usize,
    pub rel_tol: T,
}

impl<'a, T: Scalar> CapLadder<'a, T> {
    pub fn new(domain: &'a GraphDomain<T>, xi: &[T], n: usize, mu: T) -> Result<Self> {
        if !(mu > T::one()) {
            return Err(Error::Parameter(format!("mu = {mu} must exceed 1")));
        }
        if n == 0 {
            return Err(Error::Parameter("n must be positive".into()));
        }
        let (dist, nearest) = domain.dist_to_essential_boundary(xi)?;
        let phi = dist.sqrt() + T::one() / T::of_usize(n);
        let radius = mu * phi.powf(T::of(2.0) / domain.g().alpha());
        let max_levels = if domain.base_dim() == 1 { 6 } else { 4 };
        Ok(Self {
            domain,
            xi: xi.to_vec(),
            nearest,
            radius,
            levels: Vec::new(),
            base_density: 32,
            max_levels,
            rel_tol: T::of(1e-3),
        })
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    fn level(&mut self, l: usize) -> &CapScan<T> {
        while self.levels.len() <= l {
            let per_axis = self.base_density << self.levels.len();
            let scan = CapScan::build(self.domain, &self.xi, self.radius, &self.nearest, per_axis);
            assert!(!scan.is_empty(), "boundary cap is never empty");
            self.levels.push(scan);
        }
        &self.levels[l]
    }

    /// Cap maximum of the tangential part of `grad`; the flag is false when the density
    /// ladder ran out before two consecutive levels agreed.
    pub fn max_tangential(&mut self, grad: &[T]) -> (T, bool) {
        let mut prev = self.level(0).max_tangential(grad);
        for l in 1..self.max_levels {
            let cur = self.level(l).max_tangential(grad);
            if (cur - prev).abs() <= self.rel_tol * cur.abs() {
                return (cur, true);
            }
            prev = cur;
        }
        (prev, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::function::model_function;
    use crate::field::FnField;

    fn flat(k: usize) -> GraphDomain<f64> {
        let g = AlphaGraphFunction::flat(k, AxisBox::cube(k, -4.0, 4.0)).unwrap();
        GraphDomain::standard(g).unwrap()
    }

    fn parabola() -> GraphDomain<f64> {
        let g = AlphaGraphFunction::paraboloid(1, 0.0, 1.0, AxisBox::cube(1, -4.0, 4.0)).unwrap();
        GraphDomain::standard(g).unwrap()
    }

    #[test]
    fn delta_n_examples() {
        let d = flat(1);
        assert!((d.delta_n(&[0.5, -0.25], 2).unwrap() - 0.5).abs() < 1e-15);
        assert!((d.delta_n(&[0.5, -0.25], 4).unwrap() - 0.3125).abs() < 1e-15);
        let p = parabola();
        assert!((p.delta_n(&[0.3, 0.09], 10).unwrap() - 0.01).abs() < 1e-15);
        assert!((p.delta_n(&[1.0, 0.0], 1).unwrap() - 2.0).abs() < 1e-15);
        assert!(matches!(
            d.delta_n(&[0.5, 0.5], 2),
            Err(Error::Membership { .. })
        ));
    }

    #[test]
    fn tangent_frame_examples() {
        let p = parabola();
        assert_eq!(p.tangent_frame(&[0.5]).unwrap(), vec![vec![1.0, 1.0]]);
        let g = AlphaGraphFunction::affine(0.0, &[1.0, 2.0], AxisBox::cube(2, -4.0, 4.0)).unwrap();
        let d = GraphDomain::standard(g).unwrap();
        assert_eq!(
            d.tangent_frame(&[0.1, 0.2]).unwrap(),
            vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 2.0]]
        );
        assert_eq!(
            flat(2).tangent_frame(&[0.0, 0.0]).unwrap()[1],
            vec![0.0, 1.0, 0.0]
        );
        assert!(p.tangent_frame(&[3.0]).is_err());
    }

    #[test]
    fn tangential_gradient_examples() {
        let d = flat(1);
        let fy = FnField::new(
            2,
            |p: &[f64]| p[1],
            |_: &[f64], g: &mut [f64]| g.copy_from_slice(&[0.0, 1.0]),
        );
        let fx = FnField::new(
            2,
            |p: &[f64]| p[0],
            |_: &[f64], g: &mut [f64]| g.copy_from_slice(&[1.0, 0.0]),
        );
        assert_eq!(
            d.tangential_gradient(&fy, &[0.5], &[0.5, -0.5]).unwrap(),
            0.0
        );
        assert_eq!(
            d.tangential_gradient(&fx, &[0.5], &[0.5, -0.5]).unwrap(),
            1.0
        );
        let p = parabola();
        let fxy = FnField::new(
            2,
            |p: &[f64]| p[0] + p[1],
            |_: &[f64], g: &mut [f64]| g.copy_from_slice(&[1.0, 1.0]),
        );
        let v = p.tangential_gradient(&fxy, &[0.5], &[0.5, 0.0]).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn distance_examples() {
        let d = flat(1);
        let (v, _) = d.dist_to_essential_boundary(&[0.5, -0.1]).unwrap();
        assert!((v - 0.1).abs() < 1e-14);
        let p = parabola();
        let (v, u) = p.dist_to_essential_boundary(&[0.0, -0.5]).unwrap();
        assert!((v - 0.5).abs() < 1e-12 && u[0].abs() < 1e-6);
        let (v, _) = p.dist_to_essential_boundary(&[0.7, 0.49]).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn distance_beats_brute_force_for_deep_point() {
        let p = parabola();
        let xi = [0.2, -0.9];
        let (v, _) = p.dist_to_essential_boundary(&xi).unwrap();
        let brute = (0..=400_000)
            .map(|i| -1.0 + 3.0 * i as f64 / 400_000.0)
            .map(|u: f64| ((u - xi[0]).powi(2) + (u * u - xi[1]).powi(2)).sqrt())
            .fold(f64::INFINITY, f64::min);
        assert!(v <= brute + 1e-12 && v >= brute - 1e-9, "{v} {brute}");
    }

    #[test]
    fn cap_max_examples() {
        let d = flat(1);
        let c = FnField::new(2, |_: &[f64]| 3.0, |_: &[f64], g: &mut [f64]| g.fill(0.0));
        assert_eq!(d.boundary_cap_max(&c, &[0.5, -0.5], 4, 2.0).unwrap(), 0.0);
        let fx = FnField::new(
            2,
            |p: &[f64]| p[0],
            |_: &[f64], g: &mut [f64]| g.copy_from_slice(&[1.0, 0.0]),
        );
        assert!((d.boundary_cap_max(&fx, &[0.5, -0.5], 4, 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(d.boundary_cap_max(&fx, &[0.5, -0.5], 4, 1.0).is_err());
    }

    #[test]
    fn cap_max_matches_dense_scan_on_parabola() {
        let p = parabola();
        let fy = FnField::new(
            2,
            |p: &[f64]| p[1],
            |_: &[f64], g: &mut [f64]| g.copy_from_slice(&[0.0, 1.0]),
        );
        let xi = [0.0, -0.01];
        let v = p.boundary_cap_max(&fy, &xi, 10, 2.0).unwrap();
        // referee: 10x denser scan of |g'(u)| / sqrt(1 + g'(u)^2) over the cap
        let phi = 0.01f64.sqrt() + 0.1;
        let r = 2.0 * phi;
        let mut best: f64 = 0.0;
        let m = 20_000;
        for i in 0..=m {
            let u = -r + 2.0 * r * i as f64 / m as f64;
            if (u * u + (u * u + 0.01).powi(2)).sqrt() <= r {
                let s = 2.0 * u;
                best = best.max(s.abs() / (1.0 + s * s).sqrt());
            }
        }
        assert!((v - best).abs() <= 1e-3 * best, "{v} {best}");
    }

    #[test]
    fn membership_and_presets() {
        let g = model_function::<f64>("alpha:1.5", 1).unwrap();
        let d = GraphDomain::mesh_setting(g).unwrap();
        assert_eq!(d.outer_box().lo[0], -2.0);
        assert!(d.contains(Region::G, &d.lift(&[0.5], 0.2)));
        assert!(!d.contains(Region::G, &d.lift(&[0.5], 0.3)));
        assert!(d.contains(Region::GStar, &d.lift(&[-1.5], 1.9)));
        let g3 = model_function::<f64>("alpha:1.75", 2).unwrap();
        let d3 = GraphDomain::mesh_setting(g3).unwrap();
        assert_eq!(d3.outer_box().hi[1], 6.0);
        assert!((d3.measure(Region::G) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn invalid_domains_rejected() {
        let g = model_function::<f64>("quad", 1).unwrap();
        let bx = AxisBox::cube(1, 0.0, 1.0);
        assert!(GraphDomain::new(g.clone(), bx.clone(), bx.clone(), 0.25, 2.0).is_err());
        assert!(GraphDomain::new(g, bx, AxisBox::cube(1, -1.0, 2.0), 2.0, 1.0).is_err());
    }

    #[test]
    fn tangential_gradient_ignores_normal_additions() {
        let p = parabola();
        let u = [0.4];
        let nrm = p.unit_normal(&u);
        let base = [0.3, -0.7];
        let a = p.tangential_norm(&base, &u);
        let shifted: Vec<f64> = base.iter().zip(&nrm).map(|(b, n)| b + 5.0 * n).collect();
        assert!((p.tangential_norm(&shifted, &u) - a).abs() < 1e-12);
    }

    #[test]
    fn planar_arc_max_matches_dense_sampling() {
        let g = model_function::<f64>("alpha:1.5", 1).unwrap();
        let d = GraphDomain::standard(g).unwrap();
        let xi = [0.05, 0.9];
        let (_, nearest) = d.dist_to_essential_boundary(&xi).unwrap();
        let r = 0.3;
        let scan = CapScan::build(&d, &xi, r, &nearest, 32);
        for grad in [[1.0, 0.2], [0.3, -1.0], [-0.7, 0.7], [0.0, 1.0]] {
            let mut best = 0.0f64;
            for i in 0..=200_000 {
                let u = xi[0] - r + 2.0 * r * i as f64 / 200_000.0;
                let p = [u, d.g().value(&[u])];
                if (p[0] - xi[0]).hypot(p[1] - xi[1]) <= r {
                    best = best.max(tangential_part(&grad, &d.unit_normal(&[u])));
                }
            }
            let got = scan.max_tangential(&grad);
            assert!((got - best).abs() < 1e-6, "{grad:?}: {got} vs {best}");
        }
    }
}
