use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use mzmesh_core::domain::{CapLadder, GraphDomain, Region};
use mzmesh_core::integrate::{region_rule, QuadratureSpec, Weight};
use mzmesh_core::{Error, Result, ScalarField};

use crate::common::{
    check_ensemble, check_n_list, check_p, ensemble_poly, model_domain, sup_per_n,
};
use crate::fit::loglog_fit;
use crate::report::{ConfigEcho, ExperimentReport, Record, Summary, Verdict};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovConfig {
    pub domain: String,
    pub n_list: Vec<usize>,
    pub p: f64,
    pub mu: f64,
    pub ensemble_size: usize,
    pub seed: u64,
    pub quad: QuadratureSpec,
    /// slack over `2/alpha` for the fitted slope
    pub slope_tol: f64,
    /// share of quadrature nodes whose cap scan may stop unconverged before an item is flagged
    pub cap_tolerance: f64,
}

impl MarkovConfig {
    pub fn new(domain: &str, n_list: &[usize], p: f64, mu: f64) -> Self {
        Self {
            domain: domain.to_string(),
            n_list: n_list.to_vec(),
            p,
            mu,
            ensemble_size: 50,
            seed: 7,
            quad: QuadratureSpec {
                kink_panels: 6,
                ..QuadratureSpec::default()
            },
            slope_tol: 0.15,
            cap_tolerance: 0.0,
        }
    }
}

/// `|D_{n,mu} f|_p / |f|_p` on `G`, both on the same quadrature nodes; the fitted slope
/// against `n` must stay below `2/alpha + slope_tol`.
pub fn markov_experiment(cfg: &MarkovConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    check_p(cfg.p)?;
    check_n_list(&cfg.n_list, 2)?;
    check_ensemble(cfg.ensemble_size)?;
    if !(cfg.mu > 1.0) {
        return Err(Error::Parameter(format!("mu = {} must exceed 1", cfg.mu)));
    }
    let dom = model_domain(&cfg.domain, 2, GraphDomain::standard)?;
    let alpha = dom.g().alpha();
    let mut records = Vec::new();
    for &n in &cfg.n_list {
        let rule = region_rule(&dom, Region::G, Weight::None, &cfg.quad, n, cfg.p, 0)?;
        // caps depend on n but not on f: build once, share over the ensemble
        let ladders: Vec<CapLadder<f64>> = (0..rule.len())
            .into_par_iter()
            .map(|i| CapLadder::new(&dom, rule.point(i), n, cfg.mu))
            .collect::<Result<_>>()?;
        let polys = (0..cfg.ensemble_size)
            .map(|i| ensemble_poly(&dom, Region::G, n, cfg.seed, i))
            .collect::<Result<Vec<_>>>()?;
        // per node: (cap max per poly, converged per poly, value per poly)
        let per_node: Vec<(Vec<f64>, Vec<bool>, Vec<f64>)> = ladders
            .into_par_iter()
            .enumerate()
            .map(|(j, mut ladder)| {
                let pt = rule.point(j);
                let mut grad = [0.0; 2];
                let mut caps = Vec::with_capacity(polys.len());
                let mut ok = Vec::with_capacity(polys.len());
                let mut vals = Vec::with_capacity(polys.len());
                for f in &polys {
                    vals.push(f.value_grad(pt, &mut grad));
                    let (c, conv) = ladder.max_tangential(&grad);
                    caps.push(c);
                    ok.push(conv);
                }
                (caps, ok, vals)
            })
            .collect();
        for i in 0..cfg.ensemble_size {
            let caps: Vec<f64> = per_node.iter().map(|r| r.0[i]).collect();
            let vals: Vec<f64> = per_node.iter().map(|r| r.2[i]).collect();
            let misses = per_node.iter().filter(|r| !r.1[i]).count();
            let num = rule.norm_of_values(&caps, cfg.p);
            let den = rule.norm_of_values(&vals, cfg.p);
            let share = misses as f64 / rule.len() as f64;
            records.push(
                Record::new(format!("n {n} poly {i}"), num / den)
                    .n(n)
                    .item(i)
                    .flagged(share > cfg.cap_tolerance)
                    .with("cap_norm", num)
                    .with("norm", den)
                    .with("unconverged_caps", misses as f64)
                    .with("nodes", rule.len() as f64),
            );
        }
    }
    let sups = sup_per_n(&records, &cfg.n_list);
    let ns: Vec<f64> = cfg.n_list.iter().map(|n| *n as f64).collect();
    let fit = loglog_fit(&ns, &sups);
    let bound = 2.0 / alpha + cfg.slope_tol;
    let mut summary = Summary::of(&records);
    summary.slope = fit;
    for (n, s) in cfg.n_list.iter().zip(&sups) {
        summary.extra.insert(format!("sup_n{n}"), *s);
    }
    if let Some(f) = fit {
        summary.constant = Some(f.intercept.exp());
    }
    let pass = fit.is_some_and(|f| f.slope <= bound);
    let mut extra = std::collections::BTreeMap::new();
    extra.insert("cap_tolerance".into(), serde_json::json!(cfg.cap_tolerance));
    Ok(ExperimentReport {
        experiment: "markov".into(),
        config: ConfigEcho {
            domain: Some(cfg.domain.clone()),
            d: Some(2),
            n_list: cfg.n_list.clone(),
            p: Some(cfg.p),
            alpha: Some(alpha),
            mu: Some(cfg.mu),
            seed: Some(cfg.seed),
            ensemble_size: Some(cfg.ensemble_size),
            extra,
            ..ConfigEcho::default()
        },
        verdict: Verdict {
            pass,
            criterion: format!("fitted slope <= 2/alpha + {} = {:.4}", cfg.slope_tol, bound),
            detail: match fit {
                Some(f) => format!(
                    "slope {:.4} [{:.4}, {:.4}], {} flagged",
                    f.slope, f.lo95, f.hi95, summary.flagged
                ),
                None => "no slope (too few usable points)".into(),
            },
        },
        records,
        summary,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}
