//! `L^p` norms over graph regions through the flattening `F(x, z) = f(x, g(x) - z)`.

use serde::{Deserialize, Serialize};

use crate::domain::{GraphDomain, Region};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::quadrature::{geometric_breaks, graded_breaks, panel_rule, Rule1d};
use crate::scalar::{CompensatedSum, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSpec {
    /// Gauss points per panel along each base axis
    pub outer_order: usize,
    /// cap on the number of geometrically graded panels toward `z = 0`
    pub inner_panels: usize,
    /// Gauss points per `z` panel
    pub panel_order: usize,
    pub rel_tol: f64,
    pub grading_ratio: f64,
    /// number of order doublings attempted
    pub max_levels: usize,
    /// graded panels on each side of a kink of `g`
    pub kink_panels: usize,
    /// equal panels on smooth stretches
    pub smooth_panels: usize,
    /// additional grading floor toward `z = 0` for integrands concentrated at the boundary
    pub z_floor: Option<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            outer_order: 8,
            inner_panels: 40,
            panel_order: 8,
            rel_tol: 1e-8,
            grading_ratio: 0.25,
            max_levels: 4,
            kink_panels: 12,
            smooth_panels: 1,
            z_floor: None,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.outer_order < 2 || self.panel_order < 2 {
            return Err(Error::Parameter(
                "quadrature orders must be at least 2".into(),
            ));
        }
        if !(self.grading_ratio > 0.0 && self.grading_ratio < 1.0) {
            return Err(Error::Parameter("grading ratio must lie in (0, 1)".into()));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::Parameter("rel_tol must be positive".into()));
        }
        if self.max_levels < 2 {
            return Err(Error::Parameter(
                "at least two refinement levels are needed".into(),
            ));
        }
        if self.inner_panels == 0 || self.smooth_panels == 0 {
            return Err(Error::Parameter("panel counts must be positive".into()));
        }
        Ok(())
    }
}

/// Weights in the depth variable `z = g(x) - y`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    None,
    /// identically 1, integrated through the weighted path
    Unit,
    /// `delta_n^(gamma p) = (z + 1/n^2)^(gamma p)`
    DeltaNGamma {
        n: usize,
        gamma: f64,
    },
    /// `(eps + z)^(-1/2)`
    InvSqrt {
        eps: f64,
    },
}

impl Weight {
    fn value<T: Scalar>(&self, z: T, p: T) -> T {
        match *self {
            Weight::None | Weight::Unit => T::one(),
            Weight::DeltaNGamma { n, gamma } => {
                let nn = T::of_usize(n);
                (z + T::one() / (nn * nn)).powf(T::of(gamma) * p)
            }
            Weight::InvSqrt { eps } => (T::of(eps) + z).powf(T::of(-0.5)),
        }
    }

    /// Depth below which the weight varies on its own scale.
    fn grading_floor(&self) -> Option<f64> {
        match *self {
            Weight::None | Weight::Unit => None,
            Weight::DeltaNGamma { n, .. } => Some(1.0 / (64.0 * (n * n) as f64)),
            Weight::InvSqrt { eps } => Some(eps / 64.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: f64,
    pub err_est: f64,
    pub levels_used: usize,
    pub warning: bool,
}

/// Integrands evaluated along vertical lines `{(x, g(x) - z)}`.
pub trait LineIntegrand<T: Scalar>: Sync {
    fn dim(&self) -> usize;

    /// Values at the points `(x, ys[k])`; `grad_g` is `grad g(x)`.
    fn eval_line(&self, x: &[T], grad_g: &[T], ys: &[T], out: &mut [T]);

    fn degree_hint(&self) -> Option<usize> {
        None
    }
}

/// `f` itself.
pub struct ValueOf<'a, F: ?Sized>(pub &'a F);

impl<T: Scalar, F: ScalarField<T> + ?Sized> LineIntegrand<T> for ValueOf<'_, F> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval_line(&self, x: &[T], _grad_g: &[T], ys: &[T], out: &mut [T]) {
        self.0.values_on_line(x, ys, out)
    }

    fn degree_hint(&self) -> Option<usize> {
        self.0.degree_hint()
    }
}

/// `d_{xi_j(x)} f = d_j f + d_j g(x) d_y f`, the derivative along the tangent frame vector at `x`.
pub struct TangentialOf<'a, F: ?Sized> {
    pub f: &'a F,
    pub axis: usize,
}

impl<T: Scalar, F: ScalarField<T> + ?Sized> LineIntegrand<T> for TangentialOf<'_, F> {
    fn dim(&self) -> usize {
        self.f.dim()
    }

    fn eval_line(&self, x: &[T], grad_g: &[T], ys: &[T], out: &mut [T]) {
        let d = self.f.dim();
        let mut vals = vec![T::zero(); ys.len()];
        let mut grads = vec![T::zero(); ys.len() * d];
        self.f.value_grad_on_line(x, ys, &mut vals, &mut grads);
        for (k, o) in out.iter_mut().enumerate() {
            let g = &grads[k * d..(k + 1) * d];
            *o = g[self.axis] + grad_g[self.axis] * g[d - 1];
        }
    }

    fn degree_hint(&self) -> Option<usize> {
        self.f.degree_hint().map(|n| n.saturating_sub(1))
    }
}

/// `|grad_x F(x, z)|`: the norm of all tangent-frame derivatives at `x`.
pub struct FrameGradientOf<'a, F: ?Sized>(pub &'a F);

impl<T: Scalar, F: ScalarField<T> + ?Sized> LineIntegrand<T> for FrameGradientOf<'_, F> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval_line(&self, x: &[T], grad_g: &[T], ys: &[T], out: &mut [T]) {
        let d = self.0.dim();
        let mut vals = vec![T::zero(); ys.len()];
        let mut grads = vec![T::zero(); ys.len() * d];
        self.0.value_grad_on_line(x, ys, &mut vals, &mut grads);
        for (k, o) in out.iter_mut().enumerate() {
            let g = &grads[k * d..(k + 1) * d];
            let mut s = T::zero();
            for j in 0..d - 1 {
                let t = g[j] + grad_g[j] * g[d - 1];
                s = s + t * t;
            }
            *o = s.sqrt();
        }
    }

    fn degree_hint(&self) -> Option<usize> {
        self.0.degree_hint().map(|n| n.saturating_sub(1))
    }
}

/// Tensor nodes of the base box and the depth rule of a region at one refinement level.
struct RegionGrid<T> {
    base_axes: Vec<Rule1d<T>>,
    z_rule: Rule1d<T>,
}

fn region_grid<T: Scalar>(
    domain: &GraphDomain<T>,
    region: Region,
    weight: &Weight,
    spec: &QuadratureSpec,
    outer_q: usize,
    inner_q: usize,
) -> RegionGrid<T> {
    let bx = domain.base(region);
    let ratio = T::of(spec.grading_ratio);
    let base_axes = (0..domain.base_dim())
        .map(|a| {
            let kinks = domain.g().kinks(a);
            let breaks = graded_breaks(
                bx.lo[a],
                bx.hi[a],
                &kinks,
                spec.kink_panels,
                ratio,
                spec.smooth_panels,
            );
            panel_rule(&breaks, outer_q)
        })
        .collect();
    let depth = domain.depth(region);
    let floor = match (weight.grading_floor(), spec.z_floor) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    let z_breaks = match (floor, weight) {
        (_, Weight::InvSqrt { eps }) if *eps == 0.0 => {
            geometric_breaks(T::zero(), depth, spec.inner_panels, ratio, true)
        }
        (Some(h), _) => {
            let levels = ((depth.to_f64_lossy() / h).ln() / (1.0 / spec.grading_ratio).ln()).ceil();
            let panels = (levels.max(1.0) as usize).min(spec.inner_panels);
            geometric_breaks(T::zero(), depth, panels, ratio, true)
        }
        (None, _) => (0..=spec.smooth_panels)
            .map(|i| depth * T::of_usize(i) / T::of_usize(spec.smooth_panels))
            .collect(),
    };
    RegionGrid {
        base_axes,
        z_rule: panel_rule(&z_breaks, inner_q),
    }
}

/// `∬ |F|^p w` on one grid.
fn integrate_power<T: Scalar, I: LineIntegrand<T> + ?Sized>(
    domain: &GraphDomain<T>,
    integrand: &I,
    p: T,
    weight: &Weight,
    grid: &RegionGrid<T>,
) -> T {
    let k = domain.base_dim();
    let nz = grid.z_rule.len();
    let wz: Vec<T> = grid
        .z_rule
        .nodes
        .iter()
        .zip(&grid.z_rule.weights)
        .map(|(z, w)| *w * weight.value(*z, p))
        .collect();
    let mut ys = vec![T::zero(); nz];
    let mut vals = vec![T::zero(); nz];
    let mut grad_g = vec![T::zero(); k];
    let mut x = vec![T::zero(); k];
    let mut idx = vec![0usize; k];
    let mut total = CompensatedSum::new();
    let lens: Vec<usize> = grid.base_axes.iter().map(|r| r.len()).collect();
    if lens.contains(&0) {
        return T::zero();
    }
    loop {
        let mut wx = T::one();
        for a in 0..k {
            x[a] = grid.base_axes[a].nodes[idx[a]];
            wx = wx * grid.base_axes[a].weights[idx[a]];
        }
        let gx = domain.g().value(&x);
        domain.g().gradient_into(&x, &mut grad_g);
        for (y, z) in ys.iter_mut().zip(&grid.z_rule.nodes) {
            *y = gx - *z;
        }
        integrand.eval_line(&x, &grad_g, &ys, &mut vals);
        let mut line = CompensatedSum::new();
        for (v, w) in vals.iter().zip(&wz) {
            line.add(*w * v.abs().powf(p));
        }
        total.add(wx * line.value());
        let mut a = 0;
        loop {
            if a == k {
                return total.value();
            }
            idx[a] += 1;
            if idx[a] < lens[a] {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
    }
}

/// `(∬_region |F|^p w)^(1/p)` with order doubling until two levels agree to `rel_tol`.
pub fn lp_norm_region<T: Scalar, I: LineIntegrand<T> + ?Sized>(
    integrand: &I,
    domain: &GraphDomain<T>,
    p: f64,
    region: Region,
    weight: Weight,
    spec: &QuadratureSpec,
) -> Result<NormResult> {
    spec.validate()?;
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Parameter(format!(
            "p = {p} must be positive and finite"
        )));
    }
    if integrand.dim() != domain.dim() {
        return Err(Error::Parameter(
            "integrand and domain dimensions differ".into(),
        ));
    }
    if let Weight::InvSqrt { eps } = weight {
        if !(eps >= 0.0) {
            return Err(Error::Parameter("eps must be nonnegative".into()));
        }
    }
    if let Weight::DeltaNGamma { n, .. } = weight {
        if n == 0 {
            return Err(Error::Parameter("n must be positive".into()));
        }
    }
    let start = match integrand.degree_hint() {
        Some(deg) => ((p * deg as f64 + 1.0) / 2.0).ceil() as usize + 1,
        None => 0,
    };
    let q0_outer = spec.outer_order.max(start);
    let q0_inner = spec.panel_order.max(start);
    let pt = T::of(p);
    let mut prev: Option<f64> = None;
    let mut last = NormResult {
        value: 0.0,
        err_est: f64::INFINITY,
        levels_used: 0,
        warning: true,
    };
    for level in 0..spec.max_levels {
        let grid = region_grid(
            domain,
            region,
            &weight,
            spec,
            q0_outer << level,
            q0_inner << level,
        );
        let power = integrate_power(domain, integrand, pt, &weight, &grid).to_f64_lossy();
        let value = power.max(0.0).powf(1.0 / p);
        if let Some(pv) = prev {
            let err = (value - pv).abs();
            last = NormResult {
                value,
                err_est: err,
                levels_used: level + 1,
                warning: err > spec.rel_tol * value,
            };
            if !last.warning {
                return Ok(last);
            }
        }
        prev = Some(value);
    }
    Ok(last)
}

/// Quadrature nodes of a region at refinement `level`, sized for degree `degree` and power `p`.
#[derive(Clone, Debug)]
pub struct RegionRule<T> {
    pub dim: usize,
    /// row-major, stride `dim`
    pub points: Vec<T>,
    /// weights including the depth weight
    pub weights: Vec<T>,
}

impl<T: Scalar> RegionRule<T> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    /// `(sum w |v|^p)^(1/p)` for values given per node.
    pub fn norm_of_values(&self, vals: &[T], p: f64) -> T {
        let pt = T::of(p);
        let mut s = CompensatedSum::new();
        for (w, v) in self.weights.iter().zip(vals) {
            s.add(*w * v.abs().powf(pt));
        }
        s.value().max(T::zero()).powf(T::one() / pt)
    }
}

pub fn region_rule<T: Scalar>(
    domain: &GraphDomain<T>,
    region: Region,
    weight: Weight,
    spec: &QuadratureSpec,
    degree: usize,
    p: f64,
    level: usize,
) -> Result<RegionRule<T>> {
    spec.validate()?;
    let start = ((p * degree as f64 + 1.0) / 2.0).ceil() as usize + 1;
    let grid = region_grid(
        domain,
        region,
        &weight,
        spec,
        spec.outer_order.max(start) << level,
        spec.panel_order.max(start) << level,
    );
    let k = domain.base_dim();
    let pt = T::of(p);
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let axes: Vec<Vec<T>> = grid.base_axes.iter().map(|r| r.nodes.clone()).collect();
    let axis_w: Vec<Vec<T>> = grid.base_axes.iter().map(|r| r.weights.clone()).collect();
    let mut idx = vec![0usize; k];
    crate::domain::graph::for_each_grid_point(&axes, |x| {
        let wx = (0..k)
            .map(|a| axis_w[a][idx[a]])
            .fold(T::one(), |a, b| a * b);
        let gx = domain.g().value(x);
        for (z, wz) in grid.z_rule.nodes.iter().zip(&grid.z_rule.weights) {
            points.extend_from_slice(x);
            points.push(gx - *z);
            weights.push(wx * *wz * weight.value(*z, pt));
        }
        for a in 0..k {
            idx[a] += 1;
            if idx[a] < axes[a].len() {
                break;
            }
            idx[a] = 0;
        }
    });
    Ok(RegionRule {
        dim: k + 1,
        points,
        weights,
    })
}

/// `lp_norm_region` of `f` itself.
pub fn lp_norm<T: Scalar, F: ScalarField<T> + ?Sized>(
    f: &F,
    domain: &GraphDomain<T>,
    p: f64,
    region: Region,
    weight: Weight,
    spec: &QuadratureSpec,
) -> Result<NormResult> {
    lp_norm_region(&ValueOf(f), domain, p, region, weight, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::model_function;
    use crate::poly::random_poly;

    #[test]
    fn region_rule_matches_lp_norm() {
        let g = model_function::<f64>("alpha:1.5", 1).unwrap();
        let dom = GraphDomain::standard(g).unwrap();
        let f = random_poly(2, 5, 3, dom.bounding_box(Region::G)).unwrap();
        let spec = QuadratureSpec::default();
        let rule = region_rule(&dom, Region::G, Weight::None, &spec, 5, 2.0, 1).unwrap();
        let vals: Vec<f64> = (0..rule.len()).map(|i| f.value(rule.point(i))).collect();
        let direct = lp_norm(&f, &dom, 2.0, Region::G, Weight::None, &spec).unwrap();
        assert!((rule.norm_of_values(&vals, 2.0) - direct.value).abs() < 1e-10 * direct.value);
        let area: f64 = rule.weights.iter().sum();
        assert!((area - 1.0).abs() < 1e-12);
    }
}
