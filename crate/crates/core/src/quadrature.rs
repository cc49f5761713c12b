//! Gauss-Legendre rules and composite panel rules with geometric grading.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::scalar::Scalar;

/// A one-dimensional quadrature rule.
#[derive(Clone, Debug, Default)]
pub struct Rule1d<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Scalar> Rule1d<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F) -> T {
        let mut acc = crate::scalar::CompensatedSum::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(*w * f(*x));
        }
        acc.value()
    }
}

type RawRule = Arc<(Vec<f64>, Vec<f64>)>;

fn cache() -> &'static Mutex<HashMap<usize, RawRule>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, RawRule>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn legendre_rule_f64(q: usize) -> RawRule {
    if let Some(r) = cache().lock().unwrap().get(&q) {
        return r.clone();
    }
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    let qf = q as f64;
    for i in 0..q.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (qf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=q {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pq = if q == 0 { 1.0 } else { p1 };
            let pqm1 = if q == 1 { 1.0 } else { p0 };
            dp = qf * (x * pq - pqm1) / (x * x - 1.0);
            let dx = pq / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[q - 1 - i] = x;
        weights[i] = w;
        weights[q - 1 - i] = w;
    }
    if q % 2 == 1 {
        nodes[q / 2] = 0.0;
    }
    let rule = Arc::new((nodes, weights));
    cache().lock().unwrap().insert(q, rule.clone());
    rule
}

/// Gauss-Legendre rule with `q` points on `[-1, 1]` (exact to degree `2q - 1`).
pub fn gauss_legendre<T: Scalar>(q: usize) -> Rule1d<T> {
    assert!(q >= 1, "rule needs at least one point");
    let raw = legendre_rule_f64(q);
    Rule1d {
        nodes: raw.0.iter().map(|v| T::of(*v)).collect(),
        weights: raw.1.iter().map(|v| T::of(*v)).collect(),
    }
}

/// Composite rule: a `q`-point Gauss-Legendre rule on every panel `[breaks[k], breaks[k+1]]`.
pub fn panel_rule<T: Scalar>(breaks: &[T], q: usize) -> Rule1d<T> {
    let base = legendre_rule_f64(q);
    let mut out = Rule1d {
        nodes: Vec::with_capacity(q * breaks.len().saturating_sub(1)),
        weights: Vec::with_capacity(q * breaks.len().saturating_sub(1)),
    };
    let half = T::of(0.5);
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(b > a) {
            continue;
        }
        let mid = (a + b) * half;
        let rad = (b - a) * half;
        for (x, wt) in base.0.iter().zip(&base.1) {
            out.nodes.push(mid + rad * T::of(*x));
            out.weights.push(rad * T::of(*wt));
        }
    }
    out
}

/// Break points on `[lo, hi]` accumulating geometrically (ratio `ratio`) at `lo`
/// (or at `hi` when `toward_lo` is false); `panels` graded panels plus one outer panel.
pub fn geometric_breaks<T: Scalar>(
    lo: T,
    hi: T,
    panels: usize,
    ratio: T,
    toward_lo: bool,
) -> Vec<T> {
    let len = hi - lo;
    let mut offs = Vec::with_capacity(panels + 2);
    offs.push(T::zero());
    for k in (1..=panels).rev() {
        offs.push(len * ratio.powi(k as i32));
    }
    offs.push(len);
    if toward_lo {
        offs.into_iter().map(|o| lo + o).collect()
    } else {
        let mut v: Vec<T> = offs.into_iter().map(|o| hi - o).collect();
        v.reverse();
        v
    }
}

/// Break points on `[lo, hi]` split at every kink inside the interval and graded
/// geometrically toward each kink; kink-free pieces get `smooth_panels` equal panels.
pub fn graded_breaks<T: Scalar>(
    lo: T,
    hi: T,
    kinks: &[T],
    kink_panels: usize,
    ratio: T,
    smooth_panels: usize,
) -> Vec<T> {
    let tol = (hi - lo) * T::of(1e-14);
    let mut cuts: Vec<T> = kinks
        .iter()
        .copied()
        .filter(|k| *k >= lo - tol && *k <= hi + tol)
        .collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let is_kink = |v: T| cuts.iter().any(|k| (*k - v).abs() <= tol);
    let mut pts = vec![lo];
    pts.extend(
        cuts.iter()
            .copied()
            .filter(|k| *k > lo + tol && *k < hi - tol),
    );
    pts.push(hi);
    let mut out = vec![lo];
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (ka, kb) = (is_kink(a), is_kink(b));
        let seg: Vec<T> = match (ka, kb) {
            (true, true) => {
                let mid = (a + b) * T::of(0.5);
                let mut s = geometric_breaks(a, mid, kink_panels, ratio, true);
                s.extend(
                    geometric_breaks(mid, b, kink_panels, ratio, false)
                        .into_iter()
                        .skip(1),
                );
                s
            }
            (true, false) => geometric_breaks(a, b, kink_panels, ratio, true),
            (false, true) => geometric_breaks(a, b, kink_panels, ratio, false),
            (false, false) => {
                let k = smooth_panels.max(1);
                (0..=k)
                    .map(|i| a + (b - a) * T::of_usize(i) / T::of_usize(k))
                    .collect()
            }
        };
        out.extend(seg.into_iter().skip(1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rules_integrate_monomials_exactly() {
        for q in 1..=40 {
            let rule = gauss_legendre::<f64>(q);
            assert!(rule.weights.iter().all(|w| *w > 0.0));
            for k in 0..(2 * q) as i32 {
                let exact = (1.0 - (-1.0f64).powi(k + 1)) / (k as f64 + 1.0);
                let got = rule.integrate(|x| x.powi(k));
                assert!(
                    (got - exact).abs() < 1e-13,
                    "q={q} k={k} got={got} exact={exact}"
                );
            }
        }
    }

    #[test]
    fn high_order_rule_is_accurate() {
        let rule = gauss_legendre::<f64>(200);
        let got = rule.integrate(|x| (3.0 * x).cos());
        assert!((got - 2.0 * 3.0f64.sin() / 3.0).abs() < 1e-14);
    }

    #[test]
    fn graded_rule_handles_inverse_sqrt() {
        let br = geometric_breaks(0.0f64, 1.0, 40, 0.25, true);
        let rule = panel_rule(&br, 12);
        let got = rule.integrate(|x| x.powf(-0.5));
        assert!((got - 2.0).abs() < 1e-10, "{got}");
    }

    #[test]
    fn graded_breaks_split_at_interior_kink() {
        let br = graded_breaks(-1.0f64, 2.0, &[0.0], 4, 0.25, 2);
        assert_eq!(br.first(), Some(&-1.0));
        assert_eq!(br.last(), Some(&2.0));
        assert!(br.windows(2).all(|w| w[1] > w[0]));
        assert!(br.contains(&0.0));
        let rule = panel_rule(&br, 10);
        let got = rule.integrate(|x: f64| x.abs().powf(1.5));
        let exact = (1.0 + 2.0f64.powf(2.5)) / 2.5;
        assert!((got - exact).abs() < 1e-9, "{got} vs {exact}");
    }

    #[test]
    fn f32_rule_is_usable() {
        let rule = gauss_legendre::<f32>(8);
        let got = rule.integrate(|x| x * x);
        assert!((got - 2.0 / 3.0).abs() < 1e-6);
    }
}
