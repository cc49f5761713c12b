use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use mzmesh_core::domain::{model_function, GraphDomain, Region};
use mzmesh_core::integrate::{lp_norm, lp_norm_region, QuadratureSpec, TangentialOf, Weight};
use mzmesh_core::poly::{SharpnessPoly, SharpnessSpec};
use mzmesh_core::quadrature::{graded_breaks, panel_rule};
use mzmesh_core::scalar::CompensatedSum;
use mzmesh_core::{AxisBox, Error, Result, ScalarField};

use crate::common::{check_n_list, model_domain_alpha};
use crate::fit::{local_slopes, loglog_fit};
use crate::report::{ConfigEcho, ExperimentReport, Record, Summary, Verdict};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpnessConfig {
    pub alpha: f64,
    pub d: usize,
    pub n_list: Vec<usize>,
    pub p: f64,
    /// `None`: `2d + 3`
    pub beta: Option<f64>,
    /// `None`: scan `b = 1..=8`
    pub b: Option<usize>,
    /// `None`: scan `a = 0.1, 0.2, .., 1.0`
    pub a: Option<f64>,
    /// radius of the ball around `e_d` outside which `Q` must be small
    pub tail_radius: f64,
    pub quad: QuadratureSpec,
    pub slope_tol: f64,
}

impl SharpnessConfig {
    pub fn new(alpha: f64, d: usize, n_list: &[usize], p: f64) -> Self {
        Self {
            alpha,
            d,
            n_list: n_list.to_vec(),
            p,
            beta: None,
            b: None,
            a: None,
            tail_radius: 0.5,
            quad: QuadratureSpec::default(),
            slope_tol: 0.15,
        }
    }
}

/// `D = {|x_i| <= 1, g(x) - 1 <= y <= g(x)}` for `g = 1 - sum |x_i|^alpha`, exactly C^alpha at
/// its apex `e_d`.
pub fn sharpness_domain(alpha: f64, d: usize) -> Result<GraphDomain<f64>> {
    let k = d - 1;
    let g = model_function::<f64>(&format!("alpha:{alpha}"), k)?;
    GraphDomain::new(
        g,
        AxisBox::cube(k, -1.0, 1.0),
        AxisBox::cube(k, -2.0, 2.0),
        1.0,
        2.0,
    )
}

/// Diameter of the bounding box of [`sharpness_domain`].
fn diameter_bound(d: usize) -> f64 {
    let k = (d - 1) as f64;
    (4.0 * k + (k + 1.0) * (k + 1.0)).sqrt()
}

/// Sample points of `D` on a tensor grid in `(x, z)`.
fn domain_samples(dom: &GraphDomain<f64>, per_axis: usize) -> Vec<Vec<f64>> {
    let k = dom.base_dim();
    let xs: Vec<f64> = (0..per_axis)
        .map(|i| -1.0 + 2.0 * i as f64 / (per_axis - 1) as f64)
        .chain(std::iter::once(0.0))
        .collect();
    let zs: Vec<f64> = (0..per_axis)
        .map(|i| i as f64 / (per_axis - 1) as f64)
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    loop {
        let x: Vec<f64> = idx.iter().map(|i| xs[*i]).collect();
        let gx = dom.g().value(&x);
        for z in &zs {
            let mut p = x.clone();
            p.push(gx - z);
            out.push(p);
        }
        let mut a = 0;
        loop {
            if a == k {
                return out;
            }
            idx[a] += 1;
            if idx[a] < xs.len() {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
    }
}

/// Half-width of the strip `D_a` in each base coordinate.
fn strip_radius(a: f64, n: usize, alpha: f64) -> f64 {
    (a / (n * n) as f64).powf(1.0 / alpha)
}

/// Tensor rule on `D_a = {y >= 1 - a/n^2} ∩ D` in `(x, z)`: `x` graded at the apex,
/// `z in [0, a/n^2 - sum |x_i|^alpha]`. Returns points and weights.
fn strip_rule(dom: &GraphDomain<f64>, a: f64, n: usize, order: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let k = dom.base_dim();
    let alpha = dom.g().alpha();
    let h = a / (n * n) as f64;
    let r = strip_radius(a, n, alpha);
    let xr = panel_rule(&graded_breaks(-r, r, &[0.0], 12, 0.25, 1), order);
    let zr = panel_rule(&[0.0, 1.0], order);
    let mut pts = Vec::new();
    let mut wts = Vec::new();
    let mut idx = vec![0usize; k];
    loop {
        let x: Vec<f64> = idx.iter().map(|i| xr.nodes[*i]).collect();
        let wx: f64 = idx.iter().map(|i| xr.weights[*i]).product();
        let top = h - x.iter().map(|v| v.abs().powf(alpha)).sum::<f64>();
        if top > 0.0 {
            let gx = dom.g().value(&x);
            for (z, wz) in zr.nodes.iter().zip(&zr.weights) {
                let mut p = x.clone();
                p.push(gx - z * top);
                pts.push(p);
                wts.push(wx * wz * top);
            }
        }
        let mut ax = 0;
        loop {
            if ax == k {
                return (pts, wts);
            }
            idx[ax] += 1;
            if idx[ax] < xr.len() {
                break;
            }
            idx[ax] = 0;
            ax += 1;
        }
    }
}

/// `d^1 Q = d_1 Q + d_1 g d_y Q` at a point.
fn tangential(q: &SharpnessPoly, dom: &GraphDomain<f64>, pt: &[f64]) -> f64 {
    let d = pt.len();
    let mut grad = vec![0.0; d];
    q.value_grad(pt, &mut grad);
    let gg = dom.g().gradient(&pt[..d - 1]);
    grad[0] + gg[0] * grad[d - 1]
}

/// Smallest `b` with `sup_{D \ B(e_d, r)} |Q| <= sup_{D_a} |Q| / 2` at degree `n`.
fn scan_b(
    dom: &GraphDomain<f64>,
    cfg: &SharpnessConfig,
    beta: f64,
    a: f64,
    n: usize,
) -> Result<(usize, Vec<(usize, f64)>)> {
    let samples = domain_samples(dom, if dom.base_dim() == 1 { 401 } else { 61 });
    let (strip, _) = strip_rule(dom, a, n, 8);
    let t = diameter_bound(cfg.d);
    let mut trail = Vec::new();
    for b in 1..=8 {
        let q = SharpnessPoly::new(SharpnessSpec {
            d: cfg.d,
            n,
            alpha: cfg.alpha,
            beta,
            b,
            t,
            a,
        })?;
        let (tail, peak) = tail_and_peak(&q, &samples, &strip, cfg.tail_radius);
        trail.push((b, tail / peak));
        if tail <= 0.5 * peak {
            return Ok((b, trail));
        }
    }
    Err(Error::Config(format!(
        "no b in 1..=8 makes Q small away from the apex at n = {n}: tail/peak by b = {trail:?}"
    )))
}

fn tail_and_peak(
    q: &SharpnessPoly,
    samples: &[Vec<f64>],
    strip: &[Vec<f64>],
    radius: f64,
) -> (f64, f64) {
    let d = q.spec().d;
    let tail = samples
        .iter()
        .filter(|p| {
            let mut r2 = (1.0 - p[d - 1]).powi(2);
            for v in &p[..d - 1] {
                r2 += v * v;
            }
            r2 > radius * radius
        })
        .map(|p| ScalarField::<f64>::value(q, p).abs())
        .fold(0.0, f64::max);
    let peak = strip
        .iter()
        .map(|p| ScalarField::<f64>::value(q, p).abs())
        .fold(0.0, f64::max);
    (tail, peak)
}

/// `a` maximizing `min_{D_a} |d^1 Q| / n^beta` at degree `n`.
fn scan_a(
    dom: &GraphDomain<f64>,
    cfg: &SharpnessConfig,
    beta: f64,
    b: usize,
    n: usize,
) -> Result<(f64, Vec<(f64, f64)>)> {
    let t = diameter_bound(cfg.d);
    let mut trail = Vec::new();
    for i in 1..=10 {
        let a = i as f64 / 10.0;
        let q = SharpnessPoly::new(SharpnessSpec {
            d: cfg.d,
            n,
            alpha: cfg.alpha,
            beta,
            b,
            t,
            a,
        })?;
        let (pts, _) = strip_rule(dom, a, n, 8);
        let m = pts
            .iter()
            .map(|p| tangential(&q, dom, p).abs())
            .fold(f64::INFINITY, f64::min)
            / (n as f64).powf(beta);
        trail.push((a, m));
    }
    let best =
        trail.iter().copied().fold(
            (0.1, f64::NEG_INFINITY),
            |acc, v| if v.1 > acc.1 { v } else { acc },
        );
    Ok((best.0, trail))
}

/// `|d^1 Q|_{L^p(D)} / |Q|_{L^p(D)}` for the extremal `Q`; the fitted slope against `n` must
/// reach `2/alpha - slope_tol`.
pub fn sharpness_experiment(cfg: &SharpnessConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    check_n_list(&cfg.n_list, 2)?;
    if !(cfg.p >= 1.0 && cfg.p.is_finite()) {
        return Err(Error::Parameter(format!(
            "p = {} must be at least 1",
            cfg.p
        )));
    }
    if cfg.d < 2 {
        return Err(Error::Parameter("d must be at least 2".into()));
    }
    if !(cfg.tail_radius > 0.0 && cfg.tail_radius < 1.0) {
        return Err(Error::Parameter("tail radius must lie in (0, 1)".into()));
    }
    let dom = model_domain_alpha(cfg.alpha, cfg.d, sharpness_domain)?;
    let beta = cfg.beta.unwrap_or((2 * cfg.d + 3) as f64);
    let n_max = *cfg.n_list.iter().max().expect("nonempty");
    let a0 = cfg.a.unwrap_or(0.5);
    let (b, b_trail) = match cfg.b {
        Some(b) => (b, Vec::new()),
        None => scan_b(&dom, cfg, beta, a0, n_max)?,
    };
    let (a, a_trail) = match cfg.a {
        Some(a) => (a, Vec::new()),
        None => scan_a(&dom, cfg, beta, b, n_max)?,
    };
    let t = diameter_bound(cfg.d);
    let samples = domain_samples(&dom, if dom.base_dim() == 1 { 401 } else { 61 });
    let k = cfg.d as f64;
    let strip_exp = beta * cfg.p - 2.0 + (2.0 - 2.0 * k) / cfg.alpha;
    let records: Vec<Record> = cfg
        .n_list
        .par_iter()
        .map(|&n| -> Result<Record> {
            let spec = SharpnessSpec {
                d: cfg.d,
                n,
                alpha: cfg.alpha,
                beta,
                b,
                t,
                a,
            };
            let q = SharpnessPoly::new(spec)?;
            let mut quad = cfg.quad;
            quad.z_floor = Some(1.0 / (16.0 * (n * n) as f64));
            let num = lp_norm_region(
                &TangentialOf { f: &q, axis: 0 },
                &dom,
                cfg.p,
                Region::G,
                Weight::None,
                &quad,
            )?;
            let den = lp_norm(&q, &dom, cfg.p, Region::G, Weight::None, &quad)?;
            let (pts, wts) = strip_rule(&dom, a, n, 24);
            let mut strip = CompensatedSum::new();
            for (pt, w) in pts.iter().zip(&wts) {
                strip.add(w * tangential(&q, &dom, pt).abs().powf(cfg.p));
            }
            let strip = strip.value();
            let (pts8, _) = strip_rule(&dom, a, n, 8);
            let (tail, peak) = tail_and_peak(&q, &samples, &pts8, cfg.tail_radius);
            Ok(Record::new(format!("n {n}"), num.value / den.value)
                .n(n)
                .flagged(num.warning || den.warning)
                .with("tangential_norm", num.value)
                .with("norm", den.value)
                .with("err_est", num.err_est.max(den.err_est))
                .with("strip_integral", strip)
                .with("strip_normalized", strip / (n as f64).powf(strip_exp))
                .with("tail_sup", tail)
                .with("strip_sup", peak)
                .with("tail_root", tail.powf(1.0 / n as f64)))
        })
        .collect::<Result<_>>()?;
    let used: Vec<&Record> = records.iter().filter(|r| !r.flagged).collect();
    let ns: Vec<f64> = used.iter().map(|r| r.n.unwrap_or(0) as f64).collect();
    let rs: Vec<f64> = used.iter().map(|r| r.ratio).collect();
    let fit = loglog_fit(&ns, &rs);
    let bound = 2.0 / cfg.alpha - cfg.slope_tol;
    let mut summary = Summary::of(&records);
    summary.slope = fit;
    summary.constant = fit.map(|f| f.intercept.exp());
    for (i, s) in local_slopes(&ns, &rs).into_iter().enumerate() {
        summary.extra.insert(format!("local_slope_{}", i + 1), s);
    }
    summary.extra.insert("b".into(), b as f64);
    summary.extra.insert("a".into(), a);
    summary.extra.insert("beta".into(), beta);
    let pass = fit.is_some_and(|f| f.slope >= bound);
    let mut extra = std::collections::BTreeMap::new();
    extra.insert("beta".into(), serde_json::json!(beta));
    extra.insert("b".into(), serde_json::json!(b));
    extra.insert("a".into(), serde_json::json!(a));
    extra.insert("T".into(), serde_json::json!(t));
    extra.insert("tail_radius".into(), serde_json::json!(cfg.tail_radius));
    if !b_trail.is_empty() {
        extra.insert("b_scan_tail_over_peak".into(), serde_json::json!(b_trail));
    }
    if !a_trail.is_empty() {
        extra.insert("a_scan_min_over_strip".into(), serde_json::json!(a_trail));
    }
    Ok(ExperimentReport {
        experiment: "sharpness".into(),
        config: ConfigEcho {
            domain: Some(format!("alpha:{}", cfg.alpha)),
            d: Some(cfg.d),
            n_list: cfg.n_list.clone(),
            p: Some(cfg.p),
            alpha: Some(cfg.alpha),
            extra,
            ..ConfigEcho::default()
        },
        verdict: Verdict {
            pass,
            criterion: format!("fitted slope >= 2/alpha - {} = {:.4}", cfg.slope_tol, bound),
            detail: match fit {
                Some(f) => format!(
                    "slope {:.4} [{:.4}, {:.4}], b = {b}, a = {a}",
                    f.slope, f.lo95, f.hi95
                ),
                None => "no slope (too few usable points)".into(),
            },
        },
        records,
        summary,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}
