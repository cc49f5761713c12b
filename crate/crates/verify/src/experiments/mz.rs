use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use mzmesh_core::domain::{GraphDomain, Region};
use mzmesh_core::integrate::{discrete_lp_norm, lp_norm, QuadratureSpec, Weight};
use mzmesh_core::mesh::{build_mesh, MZMesh, MeshParams, NodePolicy};
use mzmesh_core::{Error, Result};

use crate::common::{check_ensemble, check_p, ensemble_poly, model_domain};
use crate::report::{ConfigEcho, ExperimentReport, Record, Summary, Verdict};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MzConfig {
    pub domain: String,
    pub d: usize,
    pub n: usize,
    pub p: f64,
    pub epsilon: f64,
    pub ensemble_size: usize,
    pub seed: u64,
    pub node_policy: NodePolicy,
    pub c0: f64,
    pub quad: QuadratureSpec,
    /// build meshes outside the proven range
    pub force: bool,
}

impl MzConfig {
    pub fn new(domain: &str, d: usize, n: usize, p: f64, epsilon: f64) -> Self {
        Self {
            domain: domain.to_string(),
            d,
            n,
            p,
            epsilon,
            ensemble_size: 50,
            seed: 7,
            node_policy: NodePolicy::Center,
            c0: 2.0,
            quad: QuadratureSpec::default(),
            force: false,
        }
    }
}

/// The proven range of the MZ bounds: `alpha > 1` in the plane, and
/// `alpha > 2 - 2/d`, `p > d - 1` above it.
fn check_range(alpha: f64, d: usize, p: f64) -> Result<()> {
    if d == 2 && !(alpha > 1.0) {
        return Err(Error::Parameter(format!(
            "alpha = {alpha} must exceed 1 for d = 2"
        )));
    }
    if d >= 3 {
        let t = 2.0 - 2.0 / d as f64;
        if !(alpha > t) {
            return Err(Error::Parameter(format!(
                "alpha = {alpha} must exceed 2 - 2/d = {t}"
            )));
        }
        if !(p > (d - 1) as f64) {
            return Err(Error::Parameter(format!(
                "p = {p} must exceed d - 1 = {}",
                d - 1
            )));
        }
    }
    if !(p >= 1.0) {
        return Err(Error::Parameter(format!("p = {p} must be at least 1")));
    }
    Ok(())
}

/// Mesh of the MZ setting for a config.
pub fn mz_mesh(cfg: &MzConfig) -> Result<(GraphDomain<f64>, MZMesh<f64>)> {
    let dom = model_domain(&cfg.domain, cfg.d, GraphDomain::mesh_setting)?;
    let alpha = dom.g().alpha();
    if !cfg.force {
        check_range(alpha, cfg.d, cfg.p)?;
    }
    let params = MeshParams::new(cfg.n, cfg.epsilon, alpha)
        .with_c0(cfg.c0)
        .with_policy(cfg.node_policy);
    let mesh = build_mesh(&dom, params, cfg.force)?;
    Ok((dom, mesh))
}

/// Ratios `sum |Omega_j| |f(xi_j)|^p / ∬_G |f|^p` over a random ensemble; every ratio must
/// lie in `[1/2, 2]`.
pub fn mz_experiment(cfg: &MzConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    check_p(cfg.p)?;
    check_ensemble(cfg.ensemble_size)?;
    let (dom, mesh) = mz_mesh(cfg)?;
    let measure_err =
        ((mesh.total_measure() - mesh.region_measure()) / mesh.region_measure()).abs();
    let records: Vec<Record> = (0..cfg.ensemble_size)
        .into_par_iter()
        .map(|i| -> Result<Record> {
            let f = ensemble_poly(&dom, Region::G, cfg.n, cfg.seed, i)?;
            let exact = lp_norm(&f, &dom, cfg.p, Region::G, Weight::None, &cfg.quad)?;
            let disc = discrete_lp_norm(&f, &mesh, cfg.p)?;
            let ratio = (disc / exact.value).powf(cfg.p);
            // the same ratio for 2f, from the already computed homogeneous parts
            let disc2 = discrete_lp_norm(&f.scaled(2.0), &mesh, cfg.p)?;
            let ratio2 = (disc2 / (2.0 * exact.value)).powf(cfg.p);
            Ok(Record::new(format!("poly {i}"), ratio)
                .n(cfg.n)
                .item(i)
                .flagged(exact.warning)
                .with("discrete", disc)
                .with("exact", exact.value)
                .with("err_est", exact.err_est)
                .with("scale_gap", (ratio2 - ratio).abs()))
        })
        .collect::<Result<_>>()?;
    let mut summary = Summary::of(&records);
    let used: Vec<&Record> = records.iter().filter(|r| !r.flagged).collect();
    let eps_attained = used
        .iter()
        .map(|r| (r.ratio - 1.0).abs())
        .fold(0.0, f64::max);
    summary
        .extra
        .insert("cells".into(), mesh.cell_count() as f64);
    summary.extra.insert("m".into(), mesh.m() as f64);
    summary.extra.insert("measure_rel_err".into(), measure_err);
    summary.extra.insert("eps_attained".into(), eps_attained);
    summary.constant = Some(summary.max_ratio.max(1.0 / summary.min_ratio));
    let pass = !used.is_empty() && used.iter().all(|r| (0.5..=2.0).contains(&r.ratio));
    let mut extra = std::collections::BTreeMap::new();
    extra.insert("c0".into(), serde_json::json!(cfg.c0));
    extra.insert("force".into(), serde_json::json!(cfg.force));
    Ok(ExperimentReport {
        experiment: "mz".into(),
        config: ConfigEcho {
            domain: Some(cfg.domain.clone()),
            d: Some(cfg.d),
            n_list: vec![cfg.n],
            p: Some(cfg.p),
            alpha: Some(dom.g().alpha()),
            epsilon: Some(cfg.epsilon),
            seed: Some(cfg.seed),
            ensemble_size: Some(cfg.ensemble_size),
            node_policy: Some(cfg.node_policy.name().into()),
            extra,
            ..ConfigEcho::default()
        },
        verdict: Verdict {
            pass,
            criterion: "all ratios in [1/2, 2]".into(),
            detail: format!(
                "ratios in [{:.4}, {:.4}], {} cells, {} flagged",
                summary.min_ratio,
                summary.max_ratio,
                mesh.cell_count(),
                summary.flagged
            ),
        },
        records,
        summary,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}
