//! Polynomials of total degree `<= n` in a tensor Chebyshev basis scaled to a bounding box.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geometry::AxisBox;
use crate::scalar::{binomial, Scalar};

/// `sum_k c_k prod_a T_{k_a}(s_a)` with `s_a = (2 x_a - lo_a - hi_a) / (hi_a - lo_a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly<T: Scalar> {
    dim: usize,
    degree: usize,
    bbox: AxisBox<T>,
    /// multi-indices, `dim` entries each, graded by total degree
    indices: Vec<u16>,
    coeffs: Vec<T>,
}

/// All multi-indices of `dim` entries with total degree `<= degree`, graded then lexicographic.
pub fn multi_indices(dim: usize, degree: usize) -> Vec<u16> {
    fn rec(dim: usize, left: usize, cur: &mut Vec<u16>, out: &mut Vec<u16>) {
        if cur.len() + 1 == dim {
            cur.push(left as u16);
            out.extend_from_slice(cur);
            cur.pop();
            return;
        }
        for k in (0..=left).rev() {
            cur.push(k as u16);
            rec(dim, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::with_capacity(binomial(degree + dim, dim) * dim);
    let mut cur = Vec::with_capacity(dim);
    for t in 0..=degree {
        rec(dim, t, &mut cur, &mut out);
    }
    out
}

/// `T_k(s)` and `T_k'(s)` for `k = 0..=n`.
pub fn chebyshev_values<T: Scalar>(n: usize, s: T, vals: &mut Vec<T>, ders: &mut Vec<T>) {
    vals.clear();
    ders.clear();
    vals.push(T::one());
    ders.push(T::zero());
    if n == 0 {
        return;
    }
    vals.push(s);
    ders.push(T::one());
    let two = T::of(2.0);
    for k in 1..n {
        vals.push(two * s * vals[k] - vals[k - 1]);
        ders.push(two * vals[k] + two * s * ders[k] - ders[k - 1]);
    }
}

/// Restriction of a [`MultiPoly`] to a vertical line `x = const`: Chebyshev series in the last variable.
#[derive(Clone, Debug)]
pub struct LineRestriction<T> {
    /// value series
    pub coeffs: Vec<T>,
    /// series of `d f / d x_a` for every base axis `a`
    pub dcoeffs: Vec<Vec<T>>,
    lo: T,
    hi: T,
}

impl<T: Scalar> LineRestriction<T> {
    fn s(&self, y: T) -> T {
        (y + y - self.lo - self.hi) / (self.hi - self.lo)
    }

    pub fn value(&self, y: T) -> T {
        clenshaw(&self.coeffs, self.s(y))
    }

    /// Value; the full gradient `(d/dx_1, .., d/dx_{d-1}, d/dy)` goes into `grad`.
    pub fn value_grad(&self, y: T, grad: &mut [T]) -> T {
        let s = self.s(y);
        let (v, dv) = clenshaw_with_derivative(&self.coeffs, s);
        for (a, dc) in self.dcoeffs.iter().enumerate() {
            grad[a] = clenshaw(dc, s);
        }
        grad[self.dcoeffs.len()] = dv * T::of(2.0) / (self.hi - self.lo);
        v
    }
}

/// `sum_k c_k T_k(s)`.
pub fn clenshaw<T: Scalar>(c: &[T], s: T) -> T {
    let mut b1 = T::zero();
    let mut b2 = T::zero();
    let two_s = s + s;
    for ck in c.iter().skip(1).rev() {
        let b0 = *ck + two_s * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    match c.first() {
        Some(c0) => *c0 + s * b1 - b2,
        None => T::zero(),
    }
}

/// `sum_k c_k T_k(s)` and its derivative in `s`.
pub fn clenshaw_with_derivative<T: Scalar>(c: &[T], s: T) -> (T, T) {
    let mut t_prev = T::one();
    let mut t_cur = s;
    let mut d_prev = T::zero();
    let mut d_cur = T::one();
    let mut v = c.first().copied().unwrap_or(T::zero());
    let mut dv = T::zero();
    if c.len() > 1 {
        v = v + c[1] * s;
        dv = c[1];
    }
    let two = T::of(2.0);
    for ck in c.iter().skip(2) {
        let t_next = two * s * t_cur - t_prev;
        let d_next = two * t_cur + two * s * d_cur - d_prev;
        v = v + *ck * t_next;
        dv = dv + *ck * d_next;
        t_prev = t_cur;
        t_cur = t_next;
        d_prev = d_cur;
        d_cur = d_next;
    }
    (v, dv)
}

impl<T: Scalar> MultiPoly<T> {
    /// Coefficients in the order of [`multi_indices`].
    pub fn new(dim: usize, degree: usize, bbox: AxisBox<T>, coeffs: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parameter("dimension must be positive".into()));
        }
        if bbox.dim() != dim {
            return Err(Error::Parameter("bounding box dimension mismatch".into()));
        }
        if (0..dim).any(|a| !(bbox.width(a) > T::zero())) {
            return Err(Error::Parameter(
                "bounding box must have positive widths".into(),
            ));
        }
        let count = binomial(degree + dim, dim);
        if coeffs.len() != count {
            return Err(Error::Parameter(format!(
                "expected {count} coefficients for dim {dim}, degree {degree}, got {}",
                coeffs.len()
            )));
        }
        Ok(Self {
            dim,
            degree,
            bbox,
            indices: multi_indices(dim, degree),
            coeffs,
        })
    }

    pub fn zero(dim: usize, degree: usize, bbox: AxisBox<T>) -> Result<Self> {
        let count = binomial(degree + dim, dim);
        Self::new(dim, degree, bbox, vec![T::zero(); count])
    }

    pub fn constant(dim: usize, c: T, bbox: AxisBox<T>) -> Result<Self> {
        Self::new(dim, 0, bbox, vec![c])
    }

    /// `c0 + sum_a c[a] x_a`.
    pub fn linear(c0: T, c: &[T], bbox: AxisBox<T>) -> Result<Self> {
        let dim = c.len();
        let mut p = Self::zero(dim, 1, bbox)?;
        let half = T::of(0.5);
        let mut k0 = c0;
        for (a, ca) in c.iter().enumerate() {
            let mid = (p.bbox.lo[a] + p.bbox.hi[a]) * half;
            k0 = k0 + *ca * mid;
            let pos = p.position(&unit_index(dim, a)).expect("degree-1 index");
            p.coeffs[pos] = *ca * p.bbox.width(a) * half;
        }
        p.coeffs[0] = k0;
        Ok(p)
    }

    /// Univariate `sum_k c_k T_k` on `[lo, hi]`.
    pub fn univariate(coeffs: Vec<T>, lo: T, hi: T) -> Result<Self> {
        let degree = coeffs.len().saturating_sub(1);
        Self::new(1, degree, AxisBox::new(vec![lo], vec![hi])?, coeffs)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn bbox(&self) -> &AxisBox<T> {
        &self.bbox
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff_count(&self) -> usize {
        self.coeffs.len()
    }

    pub fn multi_index(&self, i: usize) -> &[u16] {
        &self.indices[i * self.dim..(i + 1) * self.dim]
    }

    /// Position of a multi-index in the coefficient vector.
    pub fn position(&self, kappa: &[u16]) -> Option<usize> {
        (0..self.coeffs.len()).find(|i| self.multi_index(*i) == kappa)
    }

    pub fn coeff(&self, kappa: &[u16]) -> Option<T> {
        self.position(kappa).map(|i| self.coeffs[i])
    }

    pub fn scaled(&self, lambda: T) -> Self {
        let mut p = self.clone();
        p.coeffs.iter_mut().for_each(|c| *c = *c * lambda);
        p
    }

    /// True when `p` lies in the bounding box (evaluation elsewhere is allowed but less stable).
    pub fn in_box(&self, p: &[T]) -> bool {
        self.bbox.contains_tol(p, T::of(1e-12))
    }

    fn local(&self, a: usize, x: T) -> T {
        (x + x - self.bbox.lo[a] - self.bbox.hi[a]) / self.bbox.width(a)
    }

    fn tables(&self, p: &[T]) -> (Vec<Vec<T>>, Vec<Vec<T>>) {
        let mut vals = Vec::with_capacity(self.dim);
        let mut ders = Vec::with_capacity(self.dim);
        for a in 0..self.dim {
            let (mut v, mut d) = (Vec::new(), Vec::new());
            chebyshev_values(self.degree, self.local(a, p[a]), &mut v, &mut d);
            vals.push(v);
            ders.push(d);
        }
        (vals, ders)
    }

    pub fn eval(&self, p: &[T]) -> T {
        let (vals, _) = self.tables(p);
        let mut acc = T::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            let mut term = *c;
            for (a, k) in self.multi_index(i).iter().enumerate() {
                term = term * vals[a][*k as usize];
            }
            acc = acc + term;
        }
        acc
    }

    /// Value and gradient.
    pub fn eval_grad(&self, p: &[T], grad: &mut [T]) -> T {
        let (vals, ders) = self.tables(p);
        let d = self.dim;
        grad.iter_mut().for_each(|g| *g = T::zero());
        let mut acc = T::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            let kappa = self.multi_index(i);
            let mut term = *c;
            for a in 0..d {
                term = term * vals[a][kappa[a] as usize];
            }
            acc = acc + term;
            for a in 0..d {
                if kappa[a] == 0 {
                    continue;
                }
                let mut t = *c * ders[a][kappa[a] as usize];
                for b in 0..d {
                    if b != a {
                        t = t * vals[b][kappa[b] as usize];
                    }
                }
                grad[a] = grad[a] + t;
            }
        }
        for (a, g) in grad.iter_mut().enumerate() {
            *g = *g * T::of(2.0) / self.bbox.width(a);
        }
        acc
    }

    /// Collapses the base variables at `x`, leaving a series in the last variable.
    pub fn restrict_line(&self, x: &[T]) -> LineRestriction<T> {
        let k = self.dim - 1;
        let mut padded = x.to_vec();
        padded.push(self.bbox.lo[k]);
        let (vals, ders) = self.tables(&padded);
        let n = self.degree;
        let mut coeffs = vec![T::zero(); n + 1];
        let mut dcoeffs = vec![vec![T::zero(); n + 1]; k];
        for (i, c) in self.coeffs.iter().enumerate() {
            let kappa = self.multi_index(i);
            let j = kappa[k] as usize;
            let mut w = *c;
            for a in 0..k {
                w = w * vals[a][kappa[a] as usize];
            }
            coeffs[j] = coeffs[j] + w;
            for a in 0..k {
                if kappa[a] == 0 {
                    continue;
                }
                let mut t = *c * ders[a][kappa[a] as usize];
                for b in 0..k {
                    if b != a {
                        t = t * vals[b][kappa[b] as usize];
                    }
                }
                dcoeffs[a][j] = dcoeffs[a][j] + t;
            }
        }
        for (a, dc) in dcoeffs.iter_mut().enumerate() {
            let f = T::of(2.0) / self.bbox.width(a);
            dc.iter_mut().for_each(|v| *v = *v * f);
        }
        LineRestriction {
            coeffs,
            dcoeffs,
            lo: self.bbox.lo[k],
            hi: self.bbox.hi[k],
        }
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            dim: self.dim,
            degree: self.degree,
            basis: "cheb".into(),
            bbox: BoxJson {
                lo: self.bbox.lo.iter().map(|v| v.to_f64_lossy()).collect(),
                hi: self.bbox.hi.iter().map(|v| v.to_f64_lossy()).collect(),
            },
            coeffs: (0..self.coeffs.len())
                .map(|i| (self.multi_index(i).to_vec(), self.coeffs[i].to_f64_lossy()))
                .collect(),
        }
    }

    pub fn from_json(j: &PolyJson) -> Result<Self> {
        if j.basis != "cheb" {
            return Err(Error::Config(format!("unsupported basis {:?}", j.basis)));
        }
        let bbox = AxisBox::new(
            j.bbox.lo.iter().map(|v| T::of(*v)).collect(),
            j.bbox.hi.iter().map(|v| T::of(*v)).collect(),
        )?;
        let mut p = Self::zero(j.dim, j.degree, bbox)?;
        for (kappa, v) in &j.coeffs {
            let pos = p
                .position(kappa)
                .ok_or_else(|| Error::Config(format!("multi-index {kappa:?} out of range")))?;
            p.coeffs[pos] = T::of(*v);
        }
        Ok(p)
    }
}

fn unit_index(dim: usize, a: usize) -> Vec<u16> {
    let mut v = vec![0u16; dim];
    v[a] = 1;
    v
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxJson {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

/// Serialized form `{dim, degree, basis: "cheb", box, coeffs: [[multi-index, value], ..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyJson {
    pub dim: usize,
    pub degree: usize,
    pub basis: String,
    #[serde(rename = "box")]
    pub bbox: BoxJson,
    pub coeffs: Vec<(Vec<u16>, f64)>,
}

impl<T: Scalar> ScalarField<T> for MultiPoly<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, p: &[T]) -> T {
        self.eval(p)
    }

    fn value_grad(&self, p: &[T], grad: &mut [T]) -> T {
        self.eval_grad(p, grad)
    }

    fn degree_hint(&self) -> Option<usize> {
        Some(self.degree)
    }

    fn values_on_line(&self, x: &[T], ys: &[T], out: &mut [T]) {
        let r = self.restrict_line(x);
        for (y, o) in ys.iter().zip(out.iter_mut()) {
            *o = r.value(*y);
        }
    }

    fn value_grad_on_line(&self, x: &[T], ys: &[T], vals: &mut [T], grads: &mut [T]) {
        let d = self.dim;
        let r = self.restrict_line(x);
        for (k, y) in ys.iter().enumerate() {
            vals[k] = r.value_grad(*y, &mut grads[k * d..(k + 1) * d]);
        }
    }
}

/// Random ensembles of polynomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ensemble {
    /// iid standard normal Chebyshev coefficients
    #[serde(rename = "gauss-cheb")]
    GaussCheb,
}

/// Deterministic random polynomial: iid `N(0,1)` coefficients drawn from a ChaCha8 stream.
pub fn random_poly<T: Scalar>(
    dim: usize,
    degree: usize,
    seed: u64,
    bbox: AxisBox<T>,
) -> Result<MultiPoly<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = binomial(degree + dim, dim);
    let coeffs: Vec<T> = (0..count)
        .map(|_| {
            let v: f64 = StandardNormal.sample(&mut rng);
            T::of(v)
        })
        .collect();
    MultiPoly::new(dim, degree, bbox, coeffs)
}

/// Seed of the `item`-th member of an ensemble drawn with `seed`.
pub fn ensemble_seed(seed: u64, item: u64) -> u64 {
    // splitmix64 step keeps neighbouring items decorrelated
    let mut z = seed ^ item.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit2() -> AxisBox<f64> {
        AxisBox::cube(2, -1.0, 1.0)
    }

    #[test]
    fn index_counts() {
        assert_eq!(multi_indices(2, 3).len() / 2, 10);
        assert_eq!(multi_indices(3, 8).len() / 3, 165);
        assert_eq!(&multi_indices(2, 1)[..], &[0, 0, 1, 0, 0, 1]);
    }

    #[test]
    fn constant_and_linear() {
        let c = MultiPoly::constant(2, 3.5, unit2()).unwrap();
        let mut g = [1.0; 2];
        assert_eq!(c.eval_grad(&[0.2, 0.9], &mut g), 3.5);
        assert_eq!(g, [0.0, 0.0]);
        let l = MultiPoly::linear(0.0, &[1.0, 1.0], AxisBox::cube(2, -2.0, 3.0)).unwrap();
        let v = l.eval_grad(&[0.3, 0.4], &mut g);
        assert!((v - 0.7).abs() < 1e-15);
        assert!((g[0] - 1.0).abs() < 1e-15 && (g[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn chebyshev_markov_equality() {
        let mut v = Vec::new();
        let mut d = Vec::new();
        chebyshev_values(4, 1.0, &mut v, &mut d);
        assert_eq!(v[4], 1.0);
        assert_eq!(d[4], 16.0);
    }

    #[test]
    fn clenshaw_agrees_with_direct_sum() {
        let c = [0.3, -1.2, 0.7, 2.0, -0.4];
        let mut v = Vec::new();
        let mut d = Vec::new();
        for s in [-0.9, -0.1, 0.5, 1.0, 1.3] {
            chebyshev_values(4, s, &mut v, &mut d);
            let direct: f64 = c.iter().zip(&v).map(|(a, b)| a * b).sum();
            let ddirect: f64 = c.iter().zip(&d).map(|(a, b)| a * b).sum();
            assert!((clenshaw(&c, s) - direct).abs() < 1e-13);
            let (cv, cd) = clenshaw_with_derivative(&c, s);
            assert!((cv - direct).abs() < 1e-13 && (cd - ddirect).abs() < 1e-12);
        }
    }

    #[test]
    fn line_restriction_matches_full_evaluation() {
        let bx = AxisBox::<f64>::new(vec![-1.0, -2.0, -3.0], vec![2.0, 1.0, 0.5]).unwrap();
        let p = random_poly(3, 7, 42, bx).unwrap();
        let r = p.restrict_line(&[0.3, -0.8]);
        let mut g1 = [0.0; 3];
        let mut g2 = [0.0; 3];
        for y in [-2.5, -1.0, 0.2] {
            let a = p.eval_grad(&[0.3, -0.8, y], &mut g1);
            let b = r.value_grad(y, &mut g2);
            assert!((a - b).abs() < 1e-11 * (1.0 + a.abs()));
            for i in 0..3 {
                assert!((g1[i] - g2[i]).abs() < 1e-10 * (1.0 + g1[i].abs()));
            }
        }
    }

    #[test]
    fn random_poly_is_reproducible() {
        let a = random_poly(2, 3, 7, unit2()).unwrap();
        let b = random_poly(2, 3, 7, unit2()).unwrap();
        assert_eq!(a.coeffs(), b.coeffs());
        assert_eq!(a.coeff_count(), 10);
        let c = random_poly(2, 0, 1, unit2()).unwrap();
        assert_eq!(c.coeff_count(), 1);
        assert_ne!(ensemble_seed(1, 0), ensemble_seed(1, 1));
    }

    #[test]
    fn json_round_trip() {
        let p = random_poly(2, 4, 3, AxisBox::cube(2, -1.0, 2.0)).unwrap();
        let s = serde_json::to_string(&p.to_json()).unwrap();
        assert!(s.contains("\"basis\":\"cheb\"") && s.contains("\"box\""));
        let j: PolyJson = serde_json::from_str(&s).unwrap();
        let q = MultiPoly::<f64>::from_json(&j).unwrap();
        assert_eq!(p, q);
        assert!(serde_json::from_str::<PolyJson>(&s.replace("\"dim\"", "\"dimm\"")).is_err());
    }

    #[test]
    fn wrong_coefficient_count_is_rejected() {
        assert!(MultiPoly::new(2, 2, unit2(), vec![1.0; 5]).is_err());
    }
}
