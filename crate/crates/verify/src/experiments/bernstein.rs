use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use mzmesh_core::domain::{GraphDomain, Region};
use mzmesh_core::integrate::{lp_norm, lp_norm_region, QuadratureSpec, TangentialOf, Weight};
use mzmesh_core::Result;

use crate::common::{
    check_ensemble, check_n_list, check_p, ensemble_poly, model_domain, sup_per_n,
};
use crate::fit::loglog_fit;
use crate::report::{ConfigEcho, ExperimentReport, Record, Summary, Verdict};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernsteinConfig {
    pub domain: String,
    pub n_list: Vec<usize>,
    pub p: f64,
    pub ensemble_size: usize,
    pub seed: u64,
    pub quad: QuadratureSpec,
    /// largest slope of `log sup R` against `log n` still read as bounded
    pub slope_tol: f64,
}

impl BernsteinConfig {
    pub fn new(domain: &str, n_list: &[usize], p: f64) -> Self {
        Self {
            domain: domain.to_string(),
            n_list: n_list.to_vec(),
            p,
            ensemble_size: 50,
            seed: 7,
            quad: QuadratureSpec::default(),
            slope_tol: 0.1,
        }
    }
}

/// `R(f, n) = |delta_n^gamma d_tau f|_{L^p(G)} / (n |f|_{L^p(G_*)})` on the tangential
/// Bernstein setting in the plane.
pub fn bernstein_experiment(cfg: &BernsteinConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    check_p(cfg.p)?;
    check_n_list(&cfg.n_list, 2)?;
    check_ensemble(cfg.ensemble_size)?;
    let dom = model_domain(&cfg.domain, 2, GraphDomain::standard)?;
    let alpha = dom.g().alpha();
    let gamma = 1.0 / alpha - 0.5;
    let jobs: Vec<(usize, usize)> = cfg
        .n_list
        .iter()
        .flat_map(|n| (0..cfg.ensemble_size).map(move |i| (*n, i)))
        .collect();
    let records: Vec<Record> = jobs
        .par_iter()
        .map(|&(n, i)| bernstein_record(&dom, cfg, n, i, gamma))
        .collect::<Result<_>>()?;
    let sups = sup_per_n(&records, &cfg.n_list);
    let ns: Vec<f64> = cfg.n_list.iter().map(|n| *n as f64).collect();
    let fit = loglog_fit(&ns, &sups);
    let mut summary = Summary::of(&records);
    summary.slope = fit;
    summary.constant = Some(sups.iter().copied().fold(0.0, f64::max));
    for (n, s) in cfg.n_list.iter().zip(&sups) {
        summary.extra.insert(format!("sup_n{n}"), *s);
    }
    let pass = fit.is_some_and(|f| f.slope <= cfg.slope_tol);
    let mut extra = std::collections::BTreeMap::new();
    extra.insert("gamma".into(), serde_json::json!(gamma));
    Ok(ExperimentReport {
        experiment: "bernstein".into(),
        config: ConfigEcho {
            domain: Some(cfg.domain.clone()),
            d: Some(2),
            n_list: cfg.n_list.clone(),
            p: Some(cfg.p),
            alpha: Some(alpha),
            seed: Some(cfg.seed),
            ensemble_size: Some(cfg.ensemble_size),
            extra,
            ..ConfigEcho::default()
        },
        verdict: Verdict {
            pass,
            criterion: format!("slope of log sup R vs log n <= {}", cfg.slope_tol),
            detail: match fit {
                Some(f) => format!(
                    "slope {:.4} [{:.4}, {:.4}], sup R {:.4}",
                    f.slope,
                    f.lo95,
                    f.hi95,
                    summary.constant.unwrap_or(0.0)
                ),
                None => "no slope (too few usable points)".into(),
            },
        },
        records,
        summary,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

fn bernstein_record(
    dom: &GraphDomain<f64>,
    cfg: &BernsteinConfig,
    n: usize,
    i: usize,
    gamma: f64,
) -> Result<Record> {
    let f = ensemble_poly(dom, Region::GStar, n, cfg.seed, i)?;
    let num = lp_norm_region(
        &TangentialOf { f: &f, axis: 0 },
        dom,
        cfg.p,
        Region::G,
        Weight::DeltaNGamma { n, gamma },
        &cfg.quad,
    )?;
    let den = lp_norm(&f, dom, cfg.p, Region::GStar, Weight::None, &cfg.quad)?;
    let ratio = num.value / (n as f64 * den.value);
    Ok(Record::new(format!("n {n} poly {i}"), ratio)
        .n(n)
        .item(i)
        .flagged(num.warning || den.warning)
        .with("weighted_tangential", num.value)
        .with("norm_gstar", den.value)
        .with("err_est", num.err_est.max(den.err_est)))
}
