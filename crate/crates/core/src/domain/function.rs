//! Boundary profiles `g` of graph domains together with their smoothness certificate.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{to_f64_vec, Error, Result};
use crate::geometry::{norm, AxisBox};
use crate::scalar::Scalar;

/// The map `x -> g(x)` on `R^{d-1}` with access to its derivatives.
pub trait GraphProfile<T: Scalar>: Send + Sync + fmt::Debug {
    fn base_dim(&self) -> usize;

    fn value(&self, x: &[T]) -> T;

    fn gradient(&self, x: &[T], grad: &mut [T]);

    /// Row-major Hessian into `hess`; returns false when `g` is not known to be C².
    fn hessian(&self, _x: &[T], _hess: &mut [T]) -> bool {
        false
    }

    /// Coordinates along `axis` where the gradient loses smoothness.
    fn kinks(&self, _axis: usize) -> Vec<T> {
        Vec::new()
    }
}

/// Closed-form profiles used by the model library and the tests.
#[derive(Clone, Debug, PartialEq)]
pub enum Model<T> {
    /// `g = 0`.
    Flat { dim: usize },
    /// `g = offset + slope . x`.
    Affine { offset: T, slope: Vec<T> },
    /// `g = offset + curvature |x|^2`.
    Paraboloid { dim: usize, offset: T, curvature: T },
    /// `g = 1 - sum |x_i|^alpha`, exactly C^alpha along every coordinate hyperplane.
    AlphaPower { dim: usize, alpha: T },
    /// `g = 1 - sum (1 - cos 2 x_i) / 4`.
    Trig { dim: usize },
}

impl<T: Scalar> GraphProfile<T> for Model<T> {
    fn base_dim(&self) -> usize {
        match self {
            Model::Flat { dim }
            | Model::Paraboloid { dim, .. }
            | Model::AlphaPower { dim, .. }
            | Model::Trig { dim } => *dim,
            Model::Affine { slope, .. } => slope.len(),
        }
    }

    fn value(&self, x: &[T]) -> T {
        match self {
            Model::Flat { .. } => T::zero(),
            Model::Affine { offset, slope } => {
                *offset + x.iter().zip(slope).map(|(a, b)| *a * *b).sum::<T>()
            }
            Model::Paraboloid {
                offset, curvature, ..
            } => *offset + *curvature * x.iter().map(|v| *v * *v).sum::<T>(),
            Model::AlphaPower { alpha, .. } => {
                T::one() - x.iter().map(|v| v.abs().powf(*alpha)).sum::<T>()
            }
            Model::Trig { .. } => {
                let two = T::of(2.0);
                T::one()
                    - x.iter()
                        .map(|v| (T::one() - (two * *v).cos()) * T::of(0.25))
                        .sum::<T>()
            }
        }
    }

    fn gradient(&self, x: &[T], grad: &mut [T]) {
        match self {
            Model::Flat { .. } => grad.iter_mut().for_each(|g| *g = T::zero()),
            Model::Affine { slope, .. } => grad.copy_from_slice(slope),
            Model::Paraboloid { curvature, .. } => {
                for (g, v) in grad.iter_mut().zip(x) {
                    *g = T::of(2.0) * *curvature * *v;
                }
            }
            Model::AlphaPower { alpha, .. } => {
                for (g, v) in grad.iter_mut().zip(x) {
                    *g = if *v == T::zero() {
                        T::zero()
                    } else {
                        -*alpha * v.signum() * v.abs().powf(*alpha - T::one())
                    };
                }
            }
            Model::Trig { .. } => {
                for (g, v) in grad.iter_mut().zip(x) {
                    *g = -(T::of(2.0) * *v).sin() * T::of(0.5);
                }
            }
        }
    }

    fn hessian(&self, x: &[T], hess: &mut [T]) -> bool {
        let k = self.base_dim();
        hess.iter_mut().for_each(|h| *h = T::zero());
        match self {
            Model::Flat { .. } | Model::Affine { .. } => true,
            Model::Paraboloid { curvature, .. } => {
                for i in 0..k {
                    hess[i * k + i] = T::of(2.0) * *curvature;
                }
                true
            }
            Model::AlphaPower { alpha, .. } => {
                if *alpha == T::of(2.0) {
                    for i in 0..k {
                        hess[i * k + i] = -T::of(2.0);
                    }
                    true
                } else {
                    false
                }
            }
            Model::Trig { .. } => {
                for i in 0..k {
                    hess[i * k + i] = -(T::of(2.0) * x[i]).cos();
                }
                true
            }
        }
    }

    fn kinks(&self, _axis: usize) -> Vec<T> {
        match self {
            Model::AlphaPower { alpha, .. } if *alpha < T::of(2.0) => vec![T::zero()],
            _ => Vec::new(),
        }
    }
}

type ValueFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;
type VecFn<T> = Arc<dyn Fn(&[T], &mut [T]) + Send + Sync>;

/// Closure-backed profile.
#[derive(Clone)]
pub struct FnProfile<T> {
    pub dim: usize,
    pub value: ValueFn<T>,
    pub gradient: VecFn<T>,
    pub hessian: Option<VecFn<T>>,
    pub kinks: Vec<T>,
}

impl<T> fmt::Debug for FnProfile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnProfile")
            .field("dim", &self.dim)
            .field("has_hessian", &self.hessian.is_some())
            .finish()
    }
}

impl<T: Scalar> GraphProfile<T> for FnProfile<T> {
    fn base_dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[T]) -> T {
        (self.value)(x)
    }

    fn gradient(&self, x: &[T], grad: &mut [T]) {
        (self.gradient)(x, grad)
    }

    fn hessian(&self, x: &[T], hess: &mut [T]) -> bool {
        match &self.hessian {
            Some(h) => {
                h(x, hess);
                true
            }
            None => false,
        }
    }

    fn kinks(&self, _axis: usize) -> Vec<T> {
        self.kinks.clone()
    }
}

/// A boundary function `g` with its C^alpha certificate: `|grad g(x+t) - grad g(x)| <= L |t|^(alpha-1)`
/// on `base_box`.
#[derive(Clone)]
pub struct AlphaGraphFunction<T: Scalar> {
    profile: Arc<dyn GraphProfile<T>>,
    alpha: T,
    hoelder_l: T,
    base_box: AxisBox<T>,
    curvature_bound: Option<T>,
}

impl<T: Scalar> fmt::Debug for AlphaGraphFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlphaGraphFunction")
            .field("profile", &self.profile)
            .field("alpha", &self.alpha)
            .field("hoelder_l", &self.hoelder_l)
            .field("base_box", &self.base_box)
            .field("curvature_bound", &self.curvature_bound)
            .finish()
    }
}

impl<T: Scalar> AlphaGraphFunction<T> {
    /// `curvature_bound` is `sup |g''|` and marks the function as certified C².
    pub fn new(
        profile: Arc<dyn GraphProfile<T>>,
        alpha: T,
        hoelder_l: T,
        base_box: AxisBox<T>,
        curvature_bound: Option<T>,
    ) -> Result<Self> {
        if !(alpha >= T::one() && alpha <= T::of(2.0)) {
            return Err(Error::Parameter(format!("alpha = {alpha} not in [1, 2]")));
        }
        if !(hoelder_l >= T::one()) {
            return Err(Error::Parameter(format!(
                "Hoelder constant {hoelder_l} < 1"
            )));
        }
        if base_box.dim() != profile.base_dim() {
            return Err(Error::Parameter("base box dimension mismatch".into()));
        }
        if let Some(c) = curvature_bound {
            if !(c >= T::zero()) {
                return Err(Error::Parameter("negative curvature bound".into()));
            }
        }
        Ok(Self {
            profile,
            alpha,
            hoelder_l,
            base_box,
            curvature_bound,
        })
    }

    pub fn from_model(
        model: Model<T>,
        alpha: T,
        hoelder_l: T,
        base_box: AxisBox<T>,
    ) -> Result<Self> {
        let k = model.base_dim();
        let mut hess = vec![T::zero(); k * k];
        let c2 = model.hessian(&base_box.center(), &mut hess);
        let curvature = if c2 {
            Some(match &model {
                Model::Paraboloid { curvature, .. } => T::of(2.0) * curvature.abs(),
                Model::AlphaPower { .. } => T::of(2.0),
                Model::Trig { .. } => T::one(),
                _ => T::zero(),
            })
        } else {
            None
        };
        Self::new(Arc::new(model), alpha, hoelder_l, base_box, curvature)
    }

    /// `g = offset + curvature |x|^2` on `base_box`; C² with `L = 2|curvature|` (at least 1).
    pub fn paraboloid(
        dim: usize,
        offset: f64,
        curvature: f64,
        base_box: AxisBox<T>,
    ) -> Result<Self> {
        let l = (2.0 * curvature.abs()).max(1.0);
        Self::from_model(
            Model::Paraboloid {
                dim,
                offset: T::of(offset),
                curvature: T::of(curvature),
            },
            T::of(2.0),
            T::of(l),
            base_box,
        )
    }

    pub fn affine(offset: f64, slope: &[f64], base_box: AxisBox<T>) -> Result<Self> {
        Self::from_model(
            Model::Affine {
                offset: T::of(offset),
                slope: slope.iter().map(|v| T::of(*v)).collect(),
            },
            T::of(2.0),
            T::one(),
            base_box,
        )
    }

    pub fn flat(dim: usize, base_box: AxisBox<T>) -> Result<Self> {
        Self::from_model(Model::Flat { dim }, T::of(2.0), T::one(), base_box)
    }

    pub fn base_dim(&self) -> usize {
        self.profile.base_dim()
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn hoelder_l(&self) -> T {
        self.hoelder_l
    }

    pub fn base_box(&self) -> &AxisBox<T> {
        &self.base_box
    }

    pub fn profile(&self) -> &Arc<dyn GraphProfile<T>> {
        &self.profile
    }

    #[inline]
    pub fn value(&self, x: &[T]) -> T {
        self.profile.value(x)
    }

    #[inline]
    pub fn gradient_into(&self, x: &[T], grad: &mut [T]) {
        self.profile.gradient(x, grad)
    }

    pub fn gradient(&self, x: &[T]) -> Vec<T> {
        let mut g = vec![T::zero(); self.base_dim()];
        self.profile.gradient(x, &mut g);
        g
    }

    /// Hessian (row-major) when the function is certified C².
    pub fn hessian(&self, x: &[T]) -> Option<Vec<T>> {
        self.curvature_bound?;
        let k = self.base_dim();
        let mut h = vec![T::zero(); k * k];
        self.profile.hessian(x, &mut h).then_some(h)
    }

    pub fn is_c2(&self) -> bool {
        self.curvature_bound.is_some()
    }

    /// `sup |g''|` for C²-certified functions.
    pub fn curvature_bound(&self) -> Option<T> {
        self.curvature_bound
    }

    /// `M = |g''|_inf + 18`.
    pub fn m_cert(&self) -> Option<T> {
        self.curvature_bound.map(|c| c + T::of(18.0))
    }

    pub fn kinks(&self, axis: usize) -> Vec<T> {
        self.profile.kinks(axis)
    }

    /// `sup |grad g|` over `region`, by a grid of `per_axis` points per axis plus the kinks.
    pub fn grad_sup(&self, region: &AxisBox<T>, per_axis: usize) -> T {
        let k = self.base_dim();
        let axes: Vec<Vec<T>> = (0..k)
            .map(|a| {
                let mut v: Vec<T> = (0..per_axis)
                    .map(|i| {
                        region.lo[a] + region.width(a) * T::of_usize(i) / T::of_usize(per_axis - 1)
                    })
                    .collect();
                v.extend(
                    self.kinks(a)
                        .into_iter()
                        .filter(|c| *c >= region.lo[a] && *c <= region.hi[a]),
                );
                v
            })
            .collect();
        let mut best = T::zero();
        let mut idx = vec![0usize; k];
        let mut x = vec![T::zero(); k];
        let mut grad = vec![T::zero(); k];
        loop {
            for a in 0..k {
                x[a] = axes[a][idx[a]];
            }
            self.gradient_into(&x, &mut grad);
            best = best.max(norm(&grad));
            let mut a = 0;
            loop {
                if a == k {
                    return best;
                }
                idx[a] += 1;
                if idx[a] < axes[a].len() {
                    break;
                }
                idx[a] = 0;
                a += 1;
            }
        }
    }

    /// Largest observed `|grad g(x+t) - grad g(x)| / (L |t|^(alpha-1))` over random pairs in the base box.
    pub fn hoelder_ratio(&self, pairs: usize, seed: u64) -> T {
        let k = self.base_dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = T::zero();
        let mut ga = vec![T::zero(); k];
        let mut gb = vec![T::zero(); k];
        let expo = self.alpha - T::one();
        for _ in 0..pairs {
            let a: Vec<T> = (0..k)
                .map(|i| self.base_box.lo[i] + self.base_box.width(i) * T::of(rng.random::<f64>()))
                .collect();
            let b: Vec<T> = (0..k)
                .map(|i| self.base_box.lo[i] + self.base_box.width(i) * T::of(rng.random::<f64>()))
                .collect();
            let t: Vec<T> = a.iter().zip(&b).map(|(u, v)| *v - *u).collect();
            let tn = norm(&t);
            if tn == T::zero() {
                continue;
            }
            self.gradient_into(&a, &mut ga);
            self.gradient_into(&b, &mut gb);
            let diff: Vec<T> = ga.iter().zip(&gb).map(|(u, v)| *v - *u).collect();
            let r = norm(&diff) / (self.hoelder_l * tn.powf(expo));
            worst = worst.max(r);
        }
        worst
    }

    /// Symmetry of the Hessian and agreement of `gradient` with central differences of `value`.
    pub fn check_derivatives(&self, x: &[T], h: T) -> Result<T> {
        if !self.base_box.contains(x) {
            return Err(Error::OutsideBox {
                point: to_f64_vec(x),
                what: "base box".into(),
            });
        }
        let k = self.base_dim();
        let grad = self.gradient(x);
        let mut worst = T::zero();
        for i in 0..k {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] = xp[i] + h;
            xm[i] = xm[i] - h;
            let fd = (self.value(&xp) - self.value(&xm)) / (h + h);
            worst = worst.max((fd - grad[i]).abs() / (T::one() + grad[i].abs()));
        }
        if let Some(hs) = self.hessian(x) {
            for i in 0..k {
                for j in 0..k {
                    worst = worst.max((hs[i * k + j] - hs[j * k + i]).abs());
                }
            }
        }
        Ok(worst)
    }
}

/// Half-width of the default base box for a base dimension.
fn default_half_width(base_dim: usize) -> f64 {
    (2.0 * (base_dim + 1) as f64).max(4.0)
}

/// Model boundary functions by string id: `flat`, `quad`, `trig`, `alpha:<a>`.
pub fn model_function<T: Scalar>(id: &str, base_dim: usize) -> Result<AlphaGraphFunction<T>> {
    if base_dim == 0 {
        return Err(Error::Parameter("base dimension must be at least 1".into()));
    }
    let r = default_half_width(base_dim);
    let bx = AxisBox::cube(base_dim, -r, r);
    match id {
        "flat" => AlphaGraphFunction::flat(base_dim, bx),
        "quad" => AlphaGraphFunction::paraboloid(base_dim, 1.0, -0.5, bx),
        "trig" => {
            AlphaGraphFunction::from_model(Model::Trig { dim: base_dim }, T::of(2.0), T::one(), bx)
        }
        _ => {
            let a = id
                .strip_prefix("alpha:")
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| Error::UnknownModel(id.to_string()))?;
            if !(1.0..=2.0).contains(&a) {
                return Err(Error::Parameter(format!("alpha = {a} not in [1, 2]")));
            }
            AlphaGraphFunction::from_model(
                Model::AlphaPower {
                    dim: base_dim,
                    alpha: T::of(a),
                },
                T::of(a),
                T::of(alpha_power_constant(a, base_dim)),
                bx,
            )
        }
    }
}

/// Sharp Hoelder constant of `grad(sum |x_i|^a)`: per coordinate `a 2^(2-a)`, and the
/// power-mean factor `(k)^((2-a)/2)` over `k` coordinates.
pub fn alpha_power_constant(a: f64, base_dim: usize) -> f64 {
    a * 2f64.powf(2.0 - a) * (base_dim as f64).powf((2.0 - a) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_ids_parse() {
        assert!(model_function::<f64>("quad", 1).is_ok());
        assert!(model_function::<f64>("trig", 2).is_ok());
        let g = model_function::<f64>("alpha:1.5", 1).unwrap();
        assert_eq!(g.alpha(), 1.5);
        assert!(!g.is_c2());
        assert!(matches!(
            model_function::<f64>("bogus", 1),
            Err(Error::UnknownModel(_))
        ));
        assert!(model_function::<f64>("alpha:2.5", 1).is_err());
        assert!(model_function::<f64>("alpha:x", 1).is_err());
    }

    #[test]
    fn hoelder_certificates_hold_for_models() {
        for id in [
            "flat",
            "quad",
            "trig",
            "alpha:1",
            "alpha:1.25",
            "alpha:1.5",
            "alpha:1.75",
            "alpha:2",
        ] {
            for k in [1, 2] {
                let g = model_function::<f64>(id, k).unwrap();
                let r = g.hoelder_ratio(10_000, 11);
                assert!(r <= 1.001, "{id} k={k}: ratio {r}");
            }
        }
    }

    #[test]
    fn alpha_constant_is_attained_near_the_kink() {
        let g = model_function::<f64>("alpha:1.5", 1).unwrap();
        let t = 1e-3;
        let gp = g.gradient(&[t / 2.0])[0] - g.gradient(&[-t / 2.0])[0];
        let r = gp.abs() / (g.hoelder_l() * t.powf(0.5));
        assert!((r - 1.0).abs() < 1e-12, "{r}");
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for id in ["quad", "trig", "alpha:2"] {
            let g = model_function::<f64>(id, 2).unwrap();
            assert!(g.is_c2());
            let w = g.check_derivatives(&[0.3, -0.7], 1e-6).unwrap();
            assert!(w < 1e-8, "{id}: {w}");
        }
        let g = model_function::<f64>("alpha:1.5", 2).unwrap();
        assert!(g.check_derivatives(&[0.3, -0.7], 1e-6).unwrap() < 1e-8);
        assert!(g.hessian(&[0.3, 0.2]).is_none());
    }

    #[test]
    fn m_cert_adds_eighteen() {
        let g = model_function::<f64>("quad", 1).unwrap();
        assert_eq!(g.m_cert(), Some(19.0));
    }

    #[test]
    fn grad_sup_of_alpha_power_is_at_the_corner() {
        let g = model_function::<f64>("alpha:1.5", 1).unwrap();
        let b = AxisBox::cube(1, -1.0, 2.0);
        let s = g.grad_sup(&b, 65);
        assert!((s - 1.5 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn f32_model_evaluates() {
        let g = model_function::<f32>("alpha:1.5", 1).unwrap();
        assert!((g.value(&[1.0]) - 0.0).abs() < 1e-6);
    }
}
