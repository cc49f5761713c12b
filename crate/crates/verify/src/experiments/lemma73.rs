use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use mzmesh_core::integrate::weighted_1d_norm;
use mzmesh_core::poly::{clenshaw_with_derivative, ensemble_seed, random_poly, MultiPoly};
use mzmesh_core::{AxisBox, Error, Result};

use crate::common::{check_n_list, check_p, sup_per_n};
use crate::fit::loglog_fit;
use crate::report::{ConfigEcho, ExperimentReport, Record, Summary, Verdict};

/// Both sides of the weighted discretization inequality for one polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma73Result {
    pub lhs: f64,
    /// the same sum with the plain sampled maxima
    pub lhs_sampled: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Samples per interval for the maxima.
const SAMPLES: usize = 64;

/// `(1/m sum_j (x_j^(beta+1/2) + 1/m) max_{[x_{j-1}, x_j]} |f|^p)^(1/p)` with `x_j = j^2 / (4m^2)`
/// against `(∫_0^1 |f|^p x^beta)^(1/p)`.
///
/// Each maximum is the largest of 64 Chebyshev samples plus the endpoints, raised by the
/// largest sampled `|f'|` times half the widest sample gap.
pub fn lemma73_discretization_check(
    f: &MultiPoly<f64>,
    m: usize,
    beta: f64,
    p: f64,
) -> Result<Lemma73Result> {
    if f.dim() != 1 {
        return Err(Error::Parameter(
            "the check needs a univariate polynomial".into(),
        ));
    }
    if m < f.degree() || m == 0 {
        return Err(Error::Parameter(format!(
            "m = {m} must be at least the degree {}",
            f.degree()
        )));
    }
    if !(beta >= -0.5) {
        return Err(Error::Parameter(format!(
            "beta = {beta} must be at least -1/2"
        )));
    }
    check_p(p)?;
    let mf = m as f64;
    let node = |j: usize| (j * j) as f64 / (4.0 * mf * mf);
    let (lo, hi) = (f.bbox().lo[0], f.bbox().hi[0]);
    let eval = |x: f64| clenshaw_with_derivative(f.coeffs(), (2.0 * x - lo - hi) / (hi - lo));
    let dscale = 2.0 / (hi - lo);
    let (mut lhs, mut lhs_s) = (0.0, 0.0);
    for j in 1..=m {
        let (a, b) = (node(j - 1), node(j));
        let mut xs: Vec<f64> = (0..SAMPLES)
            .map(|i| {
                let c = (std::f64::consts::PI * (2 * i + 1) as f64 / (2 * SAMPLES) as f64).cos();
                0.5 * (a + b) + 0.5 * (b - a) * c
            })
            .collect();
        xs.push(a);
        xs.push(b);
        xs.sort_by(f64::total_cmp);
        let gap = xs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        let (mut vmax, mut dmax) = (0.0f64, 0.0f64);
        for x in &xs {
            let (v, dv) = eval(*x);
            vmax = vmax.max(v.abs());
            dmax = dmax.max((dv * dscale).abs());
        }
        let w = (b.powf(beta + 0.5) + 1.0 / mf) / mf;
        lhs += w * (vmax + 0.5 * gap * dmax).powf(p);
        lhs_s += w * vmax.powf(p);
    }
    let lhs = lhs.powf(1.0 / p);
    let lhs_sampled = lhs_s.powf(1.0 / p);
    let rhs = weighted_1d_norm(f, p, beta)?;
    let ratio = if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(Lemma73Result {
        lhs,
        lhs_sampled,
        rhs,
        ratio,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma73Config {
    pub n_list: Vec<usize>,
    /// `m = m_factor * n`
    pub m_factor: usize,
    pub beta: f64,
    pub p: f64,
    pub ensemble_size: usize,
    pub seed: u64,
    pub slope_tol: f64,
}

impl Lemma73Config {
    pub fn new(n_list: &[usize], beta: f64, p: f64) -> Self {
        Self {
            n_list: n_list.to_vec(),
            m_factor: 2,
            beta,
            p,
            ensemble_size: 20,
            seed: 7,
            slope_tol: 0.1,
        }
    }
}

/// The discretization ratio over Chebyshev polynomials and a random ensemble for each `n`;
/// the constant counts as uniform when `log sup ratio` grows with slope at most `slope_tol`.
pub fn lemma73_experiment(cfg: &Lemma73Config) -> Result<ExperimentReport> {
    let start = Instant::now();
    check_n_list(&cfg.n_list, 2)?;
    if cfg.m_factor == 0 {
        return Err(Error::Parameter("m factor must be positive".into()));
    }
    let unit = AxisBox::cube(1, 0.0, 1.0);
    let jobs: Vec<(usize, usize)> = cfg
        .n_list
        .iter()
        .flat_map(|n| (0..=cfg.ensemble_size).map(move |i| (*n, i)))
        .collect();
    let records: Vec<Record> = jobs
        .par_iter()
        .map(|&(n, i)| -> Result<Record> {
            // item 0 is T_n on [0, 1]
            let f = if i == 0 {
                let mut c = vec![0.0; n + 1];
                c[n] = 1.0;
                MultiPoly::univariate(c, 0.0, 1.0)?
            } else {
                random_poly(1, n, ensemble_seed(cfg.seed, i as u64), unit.clone())?
            };
            let r = lemma73_discretization_check(&f, cfg.m_factor * n, cfg.beta, cfg.p)?;
            let label = if i == 0 {
                format!("n {n} T_n")
            } else {
                format!("n {n} poly {i}")
            };
            Ok(Record::new(label, r.ratio)
                .n(n)
                .item(i)
                .with("lhs", r.lhs)
                .with("lhs_sampled", r.lhs_sampled)
                .with("rhs", r.rhs))
        })
        .collect::<Result<_>>()?;
    let sups = sup_per_n(&records, &cfg.n_list);
    let ns: Vec<f64> = cfg.n_list.iter().map(|n| *n as f64).collect();
    let fit = loglog_fit(&ns, &sups);
    let mut summary = Summary::of(&records);
    summary.slope = fit;
    summary.constant = Some(summary.max_ratio);
    let pass = summary.max_ratio.is_finite() && fit.is_some_and(|f| f.slope <= cfg.slope_tol);
    let mut extra = std::collections::BTreeMap::new();
    extra.insert("beta".into(), serde_json::json!(cfg.beta));
    extra.insert("m_factor".into(), serde_json::json!(cfg.m_factor));
    Ok(ExperimentReport::new(
        "lemma73",
        ConfigEcho {
            n_list: cfg.n_list.clone(),
            p: Some(cfg.p),
            seed: Some(cfg.seed),
            ensemble_size: Some(cfg.ensemble_size),
            extra,
            ..ConfigEcho::default()
        },
        records,
        summary.clone(),
        Verdict::new(
            pass,
            format!(
                "finite constant, slope of log sup ratio <= {}",
                cfg.slope_tol
            ),
            match fit {
                Some(f) => format!("constant {:.4}, slope {:.4}", summary.max_ratio, f.slope),
                None => "no slope".to_string(),
            },
        ),
    )
    .timed(start))
}
