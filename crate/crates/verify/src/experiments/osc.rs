use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use mzmesh_core::domain::{GraphDomain, Region};
use mzmesh_core::integrate::{lp_norm, QuadratureSpec, Weight};
use mzmesh_core::mesh::{build_mesh, MZMesh, MeshParams};
use mzmesh_core::poly::MultiPoly;
use mzmesh_core::scalar::CompensatedSum;
use mzmesh_core::{Error, Result};

use crate::common::{check_ensemble, check_p, ensemble_poly, model_domain};
use crate::report::{ConfigEcho, ExperimentReport, Record, Summary, Verdict};

/// `sum |cell| osc(f; cell)^p` with the oscillation over `per_axis^d` cell-interior points
/// (midpoints of a uniform split in `(x, z)`) and the `2^d` cell corners.
pub fn oscillation_sum(
    domain: &GraphDomain<f64>,
    mesh: &MZMesh<f64>,
    f: &MultiPoly<f64>,
    p: f64,
    per_axis: usize,
) -> f64 {
    let d = mesh.dim();
    let k = d - 1;
    let mut acc = CompensatedSum::new();
    let mut local = vec![0.0; d];
    let mut x = vec![0.0; k];
    let total_pts = per_axis.pow(d as u32);
    for id in 0..mesh.cell_count() {
        let c = mesh.cell(id);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut visit = |u: &[f64]| {
            for a in 0..k {
                x[a] = c.x_lo[a] + (c.x_hi[a] - c.x_lo[a]) * u[a];
            }
            let z = c.z_lo + (c.z_hi - c.z_lo) * u[k];
            let mut pt = x.clone();
            pt.push(domain.g().value(&x) - z);
            let v = f.eval(&pt);
            lo = lo.min(v);
            hi = hi.max(v);
        };
        for i in 0..total_pts {
            let mut r = i;
            for l in local.iter_mut() {
                *l = ((r % per_axis) as f64 + 0.5) / per_axis as f64;
                r /= per_axis;
            }
            visit(&local);
        }
        for i in 0..(1usize << d) {
            for (a, l) in local.iter_mut().enumerate() {
                *l = ((i >> a) & 1) as f64;
            }
            visit(&local);
        }
        acc.add(c.measure * (hi - lo).powf(p));
    }
    acc.value()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscConfig {
    pub domain: String,
    pub d: usize,
    pub n: usize,
    pub p: f64,
    pub epsilons: Vec<f64>,
    pub ensemble_size: usize,
    pub seed: u64,
    pub c0: f64,
    /// grid points per axis; a control run doubles it
    pub per_axis: usize,
    pub quad: QuadratureSpec,
}

impl OscConfig {
    pub fn new(domain: &str, d: usize, n: usize, p: f64, epsilons: &[f64]) -> Self {
        Self {
            domain: domain.to_string(),
            d,
            n,
            p,
            epsilons: epsilons.to_vec(),
            ensemble_size: 20,
            seed: 7,
            c0: 2.0,
            per_axis: 5,
            quad: QuadratureSpec::default(),
        }
    }
}

/// Per polynomial and budget: `sum |G_j| osc^p` against `eps^p |f|^p_{L^p(G_*)}`.
pub fn cell_oscillation_check(cfg: &OscConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    check_p(cfg.p)?;
    check_ensemble(cfg.ensemble_size)?;
    if cfg.epsilons.is_empty() || cfg.epsilons.iter().any(|e| !(*e > 0.0 && *e <= 1.0)) {
        return Err(Error::Parameter("budgets must lie in (0, 1]".into()));
    }
    if cfg.per_axis == 0 {
        return Err(Error::Parameter("grid density must be positive".into()));
    }
    let dom = model_domain(&cfg.domain, cfg.d, GraphDomain::mesh_setting)?;
    let alpha = dom.g().alpha();
    let meshes: Vec<MZMesh<f64>> = cfg
        .epsilons
        .iter()
        .map(|e| {
            build_mesh(
                &dom,
                MeshParams::new(cfg.n, *e, alpha).with_c0(cfg.c0),
                false,
            )
        })
        .collect::<Result<_>>()?;
    let per_poly: Vec<Vec<Record>> = (0..cfg.ensemble_size)
        .into_par_iter()
        .map(|i| -> Result<Vec<Record>> {
            let f = ensemble_poly(&dom, Region::GStar, cfg.n, cfg.seed, i)?;
            let norm = lp_norm(&f, &dom, cfg.p, Region::GStar, Weight::None, &cfg.quad)?;
            let base = norm.value.powf(cfg.p);
            let mut out = Vec::new();
            let mut prev = f64::INFINITY;
            for (e, mesh) in cfg.epsilons.iter().zip(&meshes) {
                let lhs = oscillation_sum(&dom, mesh, &f, cfg.p, cfg.per_axis);
                let control = oscillation_sum(&dom, mesh, &f, cfg.p, 2 * cfg.per_axis);
                let rhs = e.powf(cfg.p) * base;
                let worst = lhs.max(control);
                out.push(
                    Record::new(format!("eps {e} poly {i}"), worst / rhs)
                        .n(cfg.n)
                        .item(i)
                        .flagged(norm.warning)
                        .with("epsilon", *e)
                        .with("lhs", lhs)
                        .with("lhs_control", control)
                        .with("rhs", rhs)
                        .with("nonincreasing", (worst <= prev) as u8 as f64),
                );
                prev = worst;
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let records: Vec<Record> = per_poly.into_iter().flatten().collect();
    let mut summary = Summary::of(&records);
    summary.constant = Some(summary.max_ratio);
    let monotone = records.iter().all(|r| r.values["nonincreasing"] == 1.0);
    summary
        .extra
        .insert("monotone_in_eps".into(), monotone as u8 as f64);
    for (e, m) in cfg.epsilons.iter().zip(&meshes) {
        summary
            .extra
            .insert(format!("cells_eps{e}"), m.cell_count() as f64);
    }
    let used: Vec<&Record> = records.iter().filter(|r| !r.flagged).collect();
    let pass = !used.is_empty() && used.iter().all(|r| r.ratio <= 1.0);
    let mut extra = std::collections::BTreeMap::new();
    extra.insert("epsilons".into(), serde_json::json!(cfg.epsilons));
    extra.insert("per_axis".into(), serde_json::json!(cfg.per_axis));
    Ok(ExperimentReport::new(
        "osc-check",
        ConfigEcho {
            domain: Some(cfg.domain.clone()),
            d: Some(cfg.d),
            n_list: vec![cfg.n],
            p: Some(cfg.p),
            alpha: Some(alpha),
            seed: Some(cfg.seed),
            ensemble_size: Some(cfg.ensemble_size),
            extra,
            ..ConfigEcho::default()
        },
        records,
        summary.clone(),
        Verdict::new(
            pass,
            "sum |G_j| osc^p <= eps^p |f|^p on G_* for every polynomial and budget",
            format!(
                "largest LHS/RHS {:.4}, monotone in eps: {monotone}",
                summary.max_ratio
            ),
        ),
    )
    .timed(start))
}
