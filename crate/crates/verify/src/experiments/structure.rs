use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use mzmesh_core::domain::{
    model_function, steklov_transform, AlphaGraphFunction, GraphDomain, PhiGadget, Region,
    SteklovSpec,
};
use mzmesh_core::integrate::doubling_constant_estimate;
use mzmesh_core::mesh::{build_mesh, mesh_cardinality, MeshParams};
use mzmesh_core::poly::{jacobi_at_one, jacobi_eval, JacobiSpec};
use mzmesh_core::scalar::CompensatedSum;
use mzmesh_core::{AxisBox, Error, Result};

use crate::common::model_domain;
use crate::fit::loglog_fit;
use crate::report::{ConfigEcho, ExperimentReport, Record, Summary, Verdict};

fn echo(extra: BTreeMap<String, serde_json::Value>) -> ConfigEcho {
    ConfigEcho {
        extra,
        ..ConfigEcho::default()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteklovConfig {
    pub alphas: Vec<f64>,
    pub deltas: Vec<f64>,
    pub slope_tol: f64,
}

impl Default for SteklovConfig {
    fn default() -> Self {
        Self {
            alphas: vec![1.25, 1.5, 1.75],
            deltas: (3..=8).map(|k| 2f64.powi(-k)).collect(),
            slope_tol: 0.1,
        }
    }
}

/// Sup errors of the Steklov transform of `1 - |x|^alpha` and the size of its second derivative,
/// with slopes in `delta` compared to `alpha`, `alpha - 1` and `alpha - 2`.
pub fn steklov_experiment(cfg: &SteklovConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    if cfg.deltas.len() < 2 || cfg.deltas.iter().any(|d| !(*d > 0.0 && *d < 0.5)) {
        return Err(Error::Parameter(
            "need at least two deltas in (0, 1/2)".into(),
        ));
    }
    let mut records = Vec::new();
    let mut summary_extra = BTreeMap::new();
    let mut pass = true;
    let mut detail = Vec::new();
    for &alpha in &cfg.alphas {
        let g = model_function::<f64>(&format!("alpha:{alpha}"), 1)?;
        let rows: Vec<[f64; 3]> = cfg
            .deltas
            .par_iter()
            .map(|&delta| -> Result<[f64; 3]> {
                let gd = steklov_transform(&g, delta, SteklovSpec::default())?;
                let mut xs: Vec<f64> = (0..=160).map(|i| delta * (i as f64 / 20.0 - 4.0)).collect();
                xs.extend((0..=200).map(|i| i as f64 / 100.0 - 1.0));
                let mut e = [0.0f64; 3];
                for x in xs {
                    let p = [x];
                    e[0] = e[0].max((g.value(&p) - gd.value(&p)).abs());
                    e[1] = e[1].max((g.gradient(&p)[0] - gd.gradient(&p)[0]).abs());
                    let h = gd
                        .hessian(&p)
                        .ok_or_else(|| Error::Parameter("transform lost its Hessian".into()))?;
                    e[2] = e[2].max(h[0].abs());
                }
                Ok(e)
            })
            .collect::<Result<_>>()?;
        for (delta, e) in cfg.deltas.iter().zip(&rows) {
            records.push(
                Record::new(
                    format!("alpha {alpha} delta {delta}"),
                    e[0] / delta.powf(alpha),
                )
                .with("alpha", alpha)
                .with("delta", *delta)
                .with("err0", e[0])
                .with("err1", e[1])
                .with("d2", e[2]),
            );
        }
        for (order, target) in [(0usize, alpha), (1, alpha - 1.0), (2, alpha - 2.0)] {
            let ys: Vec<f64> = rows.iter().map(|e| e[order]).collect();
            let slope = loglog_fit(&cfg.deltas, &ys)
                .map(|f| f.slope)
                .unwrap_or(f64::NAN);
            let ok = (slope - target).abs() <= cfg.slope_tol;
            pass &= ok;
            summary_extra.insert(format!("slope{order}_alpha{alpha}"), slope);
            detail.push(format!("a={alpha} o{order} {slope:.3}/{target:.2}"));
        }
    }
    let mut summary = Summary::of(&records);
    summary.extra = summary_extra;
    let mut extra = BTreeMap::new();
    extra.insert("alphas".into(), serde_json::json!(cfg.alphas));
    extra.insert("deltas".into(), serde_json::json!(cfg.deltas));
    Ok(ExperimentReport::new(
        "steklov",
        echo(extra),
        records,
        summary,
        Verdict::new(
            pass,
            format!("slopes alpha, alpha-1, alpha-2 within {}", cfg.slope_tol),
            detail.join(", "),
        ),
    )
    .timed(start))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiConfig {
    pub grid: usize,
    pub points: usize,
    pub pairs: usize,
    pub seed: u64,
    pub jacobian_tol: f64,
    pub roundtrip_tol: f64,
}

impl Default for PhiConfig {
    fn default() -> Self {
        Self {
            grid: 50,
            points: 1000,
            pairs: 1000,
            seed: 7,
            jacobian_tol: 1e-6,
            roundtrip_tol: 1e-10,
        }
    }
}

fn phi_models() -> Result<Vec<(String, AlphaGraphFunction<f64>)>> {
    Ok(vec![
        (
            "x^2/4".to_string(),
            AlphaGraphFunction::paraboloid(1, 0.0, 0.25, AxisBox::cube(1, -4.0, 4.0))?,
        ),
        ("quad".to_string(), model_function("quad", 1)?),
        ("trig".to_string(), model_function("trig", 1)?),
    ])
}

/// Jacobian formula against finite differences on a grid of `E`, the inverse round trip on
/// random points of `G`, and distinct images for random and for nearby parameter pairs in `E+`.
pub fn phi_experiment(cfg: &PhiConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    if cfg.grid < 2 || cfg.points == 0 || cfg.pairs == 0 {
        return Err(Error::Parameter(
            "grid, points and pairs must be positive".into(),
        ));
    }
    let mut records = Vec::new();
    let (mut jac_worst, mut rt_worst) = (0.0f64, 0.0f64);
    let mut collisions = 0usize;
    let mut failures = 0usize;
    for (name, g) in phi_models()? {
        let gadget = PhiGadget::new(g)?;
        let r0 = gadget.r0();
        let mut jac = 0.0f64;
        let mut count = 0usize;
        for i in 0..cfg.grid {
            let z = -1.0 + 3.0 * i as f64 / (cfg.grid - 1) as f64;
            for j in 0..cfg.grid {
                // an even grid count keeps t away from 0
                let t = -r0 + 2.0 * r0 * j as f64 / (cfg.grid - 1) as f64;
                if t == 0.0 || !gadget.in_e(z, t) {
                    continue;
                }
                let img = gadget.forward(z, t)?;
                let fd = gadget.fd_jacobian(z, t, 1e-5);
                jac = jac.max((fd - img.jacobian).abs() / img.jacobian);
                count += 1;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let dom = gadget.domain();
        let mut rt = 0.0f64;
        for _ in 0..cfg.points {
            let p = dom.random_point(Region::G, &mut rng);
            match gadget.inverse_plus(p[0], p[1]) {
                Ok((z, t)) => {
                    let img = gadget.forward(z, t)?;
                    rt = rt.max((img.x - p[0]).abs().max((img.y - p[1]).abs()));
                    if !(t >= 0.0 && t <= gadget.r1()) {
                        failures += 1;
                    }
                }
                Err(_) => failures += 1,
            }
        }
        let mut coll = 0usize;
        let sample = |rng: &mut ChaCha8Rng| loop {
            let z = -1.0 + 3.0 * rng.random::<f64>();
            let t = r0 * rng.random::<f64>();
            if gadget.in_e_plus(z, t) {
                return (z, t);
            }
        };
        for k in 0..cfg.pairs {
            let (z1, t1) = sample(&mut rng);
            let (z2, t2) = if k % 2 == 0 {
                sample(&mut rng)
            } else {
                // a nearby pair probes local injectivity
                let s = 1e-6;
                let (dz, dt) = (
                    s * (rng.random::<f64>() - 0.5),
                    s * (rng.random::<f64>() - 0.5),
                );
                if !gadget.in_e_plus(z1 + dz, t1 + dt) {
                    continue;
                }
                (z1 + dz, t1 + dt)
            };
            if (z1 - z2).abs().max((t1 - t2).abs()) <= 1e-12 {
                continue;
            }
            let (a, b) = (gadget.forward(z1, t1)?, gadget.forward(z2, t2)?);
            if a.x == b.x && a.y == b.y {
                coll += 1;
            }
        }
        jac_worst = jac_worst.max(jac);
        rt_worst = rt_worst.max(rt);
        collisions += coll;
        records.push(
            Record::new(format!("{name} jacobian"), jac / cfg.jacobian_tol)
                .with("max_rel_err", jac)
                .with("grid_points", count as f64),
        );
        records.push(
            Record::new(format!("{name} round trip"), rt / cfg.roundtrip_tol)
                .with("max_residual", rt),
        );
        records.push(
            Record::new(format!("{name} injectivity"), coll as f64).with("collisions", coll as f64),
        );
    }
    let pass = jac_worst <= cfg.jacobian_tol
        && rt_worst <= cfg.roundtrip_tol
        && collisions == 0
        && failures == 0;
    let mut summary = Summary::of(&records);
    summary
        .extra
        .insert("jacobian_max_rel_err".into(), jac_worst);
    summary
        .extra
        .insert("roundtrip_max_residual".into(), rt_worst);
    summary.extra.insert("collisions".into(), collisions as f64);
    summary
        .extra
        .insert("inverse_failures".into(), failures as f64);
    let mut extra = BTreeMap::new();
    extra.insert("grid".into(), serde_json::json!(cfg.grid));
    extra.insert("points".into(), serde_json::json!(cfg.points));
    extra.insert("pairs".into(), serde_json::json!(cfg.pairs));
    Ok(ExperimentReport::new(
        "phi",
        ConfigEcho {
            seed: Some(cfg.seed),
            ..echo(extra)
        },
        records,
        summary,
        Verdict::new(
            pass,
            format!(
                "Jacobian rel err <= {:e}, round trip <= {:e}, no collisions",
                cfg.jacobian_tol, cfg.roundtrip_tol
            ),
            format!(
                "Jacobian {jac_worst:.2e}, round trip {rt_worst:.2e}, collisions {collisions}, inverse failures {failures}"
            ),
        ),
    )
    .timed(start))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichConfig {
    pub models: Vec<String>,
    pub points: usize,
    pub seed: u64,
    /// brute-force scan resolution over `D2`
    pub scan: usize,
}

impl Default for SandwichConfig {
    fn default() -> Self {
        Self {
            models: [
                "flat",
                "quad",
                "trig",
                "alpha:1.25",
                "alpha:1.5",
                "alpha:1.75",
                "alpha:2",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect(),
            points: 1000,
            seed: 7,
            scan: 20001,
        }
    }
}

/// Distance from `(x0, y0)` to `{(u, g(u)) : u in [lo, hi]}` by a uniform scan and golden-section
/// polishing of the best bracket.
fn brute_distance(
    g: &AlphaGraphFunction<f64>,
    lo: f64,
    hi: f64,
    x0: f64,
    y0: f64,
    scan: usize,
) -> f64 {
    let dist = |u: f64| (u - x0).hypot(g.value(&[u]) - y0);
    let h = (hi - lo) / (scan - 1) as f64;
    let (mut best, mut bu) = (f64::INFINITY, lo);
    for i in 0..scan {
        let u = lo + h * i as f64;
        let d = dist(u);
        if d < best {
            best = d;
            bu = u;
        }
    }
    let (mut a, mut b) = ((bu - h).max(lo), (bu + h).min(hi));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if dist(c) < dist(d) {
            b = d;
        } else {
            a = c;
        }
    }
    best.min(dist(0.5 * (a + b)))
}

/// `c_* delta <= dist(xi, Gamma') <= delta` with `delta = g(x) - y` on random points of `G`,
/// the distance taken by brute force.
pub fn sandwich_experiment(cfg: &SandwichConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    if cfg.points == 0 || cfg.scan < 3 {
        return Err(Error::Parameter(
            "points must be positive and the scan at least 3".into(),
        ));
    }
    let mut records = Vec::new();
    let mut violations = 0usize;
    let mut core_gap = 0.0f64;
    for (mi, id) in cfg.models.iter().enumerate() {
        let dom = model_domain(id, 2, GraphDomain::standard)?;
        let cs = dom.c_star();
        let outer = dom.outer_box().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(mi as u64));
        let pts: Vec<Vec<f64>> = (0..cfg.points)
            .map(|_| dom.random_point(Region::G, &mut rng))
            .collect();
        let rows: Vec<(f64, f64, f64)> = pts
            .par_iter()
            .map(|p| -> Result<(f64, f64, f64)> {
                let delta = dom.delta(p);
                let brute = brute_distance(dom.g(), outer.lo[0], outer.hi[0], p[0], p[1], cfg.scan);
                let (core, _) = dom.dist_to_essential_boundary(p)?;
                Ok((delta, brute, core))
            })
            .collect::<Result<_>>()?;
        let (mut lo_ratio, mut hi_ratio, mut bad) = (f64::INFINITY, 0.0f64, 0usize);
        for (delta, brute, core) in &rows {
            if *delta <= 0.0 {
                continue;
            }
            let r = brute / delta;
            lo_ratio = lo_ratio.min(r);
            hi_ratio = hi_ratio.max(r);
            let tol = 1e-12 * delta.max(1.0);
            if *brute < cs * delta - tol || *brute > delta + tol {
                bad += 1;
            }
            core_gap = core_gap.max((core - brute).abs());
        }
        violations += bad;
        records.push(
            Record::new(id.to_string(), hi_ratio)
                .item(mi)
                .with("c_star", cs)
                .with("min_dist_over_delta", lo_ratio)
                .with("max_dist_over_delta", hi_ratio)
                .with("violations", bad as f64),
        );
    }
    let mut summary = Summary::of(&records);
    summary.extra.insert("violations".into(), violations as f64);
    summary
        .extra
        .insert("core_vs_brute_max_gap".into(), core_gap);
    let mut extra = BTreeMap::new();
    extra.insert("models".into(), serde_json::json!(cfg.models));
    extra.insert("points".into(), serde_json::json!(cfg.points));
    Ok(ExperimentReport::new(
        "sandwich",
        ConfigEcho {
            d: Some(2),
            seed: Some(cfg.seed),
            ..echo(extra)
        },
        records,
        summary,
        Verdict::new(
            violations == 0,
            "c_* delta <= brute-force distance <= delta on every point",
            format!("{violations} violations, core distance within {core_gap:.1e} of brute force"),
        ),
    )
    .timed(start))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobiConfig {
    pub betas: Vec<f64>,
    pub max_n: usize,
    pub grid: usize,
    pub tol: f64,
}

impl Default for JacobiConfig {
    fn default() -> Self {
        Self {
            betas: vec![1.0, 7.0],
            max_n: 30,
            grid: 401,
            tol: 1e-7,
        }
    }
}

/// The derivative identity for `P_n^(beta, beta)` against central differences, relative to
/// `max |P_n'|` on the grid, and the endpoint value `binom(n + beta, n)`.
pub fn jacobi_experiment(cfg: &JacobiConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    let mut records = Vec::new();
    let mut worst = 0.0f64;
    let mut end_worst = 0.0f64;
    for &beta in &cfg.betas {
        for n in 0..=cfg.max_n {
            let spec = JacobiSpec::new(beta, n)?;
            let h = 1e-5 / ((n + 1) * (n + 1)) as f64;
            let (mut err, mut scale) = (0.0f64, 0.0f64);
            for i in 0..cfg.grid {
                let y = -1.0 + 2.0 * i as f64 / (cfg.grid - 1) as f64;
                let (_, d) = jacobi_eval(spec, y);
                let fd = (jacobi_eval(spec, y + h).0 - jacobi_eval(spec, y - h).0) / (2.0 * h);
                err = err.max((fd - d).abs());
                scale = scale.max(d.abs());
            }
            let rel = if n == 0 { err } else { err / scale };
            // binom(n + beta, n) from the product formula
            let binom: f64 = (1..=n).map(|k| (k as f64 + beta) / k as f64).product();
            let end = (jacobi_at_one(spec) - binom).abs() / binom;
            worst = worst.max(rel);
            end_worst = end_worst.max(end);
            records.push(
                Record::new(format!("beta {beta} n {n}"), rel)
                    .n(n)
                    .with("beta", beta)
                    .with("endpoint_rel_err", end),
            );
        }
    }
    let pass = worst <= cfg.tol && end_worst <= 1e-12;
    let mut summary = Summary::of(&records);
    summary
        .extra
        .insert("endpoint_max_rel_err".into(), end_worst);
    let mut extra = BTreeMap::new();
    extra.insert("betas".into(), serde_json::json!(cfg.betas));
    extra.insert("max_n".into(), serde_json::json!(cfg.max_n));
    Ok(ExperimentReport::new(
        "jacobi",
        echo(extra),
        records,
        summary,
        Verdict::new(
            pass,
            format!("derivative identity within relative {:e}", cfg.tol),
            format!("max rel err {worst:.2e}, endpoint {end_worst:.1e}"),
        ),
    )
    .timed(start))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoublingConfig {
    pub epsilons: Vec<f64>,
    pub num_intervals: usize,
    pub num_scales: usize,
    /// allowed `(max - min) / min` of the constants
    pub variation_tol: f64,
}

impl Default for DoublingConfig {
    fn default() -> Self {
        Self {
            epsilons: (0..=6).map(|k| 10f64.powi(-k)).rev().collect(),
            num_intervals: 64,
            num_scales: 20,
            variation_tol: 0.1,
        }
    }
}

/// Doubling constants of `(eps + z)^(-1/2)` on `[0, 1]`.
pub fn doubling_experiment(cfg: &DoublingConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    if cfg.epsilons.is_empty() || cfg.epsilons.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::Parameter("epsilons must be positive".into()));
    }
    let ests: Vec<_> = cfg
        .epsilons
        .par_iter()
        .map(|&e| {
            doubling_constant_estimate(
                &|z: f64| (e + z).powf(-0.5),
                0.0,
                1.0,
                cfg.num_intervals,
                cfg.num_scales,
            )
        })
        .collect::<Result<_>>()?;
    let records: Vec<Record> = cfg
        .epsilons
        .iter()
        .zip(&ests)
        .map(|(e, est)| {
            Record::new(format!("eps {e:e}"), est.constant)
                .with("epsilon", *e)
                .with("worst_lo", est.worst.0)
                .with("worst_hi", est.worst.1)
                .with("intervals", est.intervals_checked as f64)
        })
        .collect();
    let mut summary = Summary::of(&records);
    let variation = (summary.max_ratio - summary.min_ratio) / summary.min_ratio;
    summary.constant = Some(summary.max_ratio);
    summary.extra.insert("variation".into(), variation);
    let mut extra = BTreeMap::new();
    extra.insert("epsilons".into(), serde_json::json!(cfg.epsilons));
    extra.insert("num_intervals".into(), serde_json::json!(cfg.num_intervals));
    extra.insert("num_scales".into(), serde_json::json!(cfg.num_scales));
    Ok(ExperimentReport::new(
        "doubling",
        echo(extra),
        records,
        summary.clone(),
        Verdict::new(
            variation < cfg.variation_tol,
            format!(
                "doubling constant varies by < {} across eps",
                cfg.variation_tol
            ),
            format!(
                "constants in [{:.4}, {:.4}], variation {:.2}%",
                summary.min_ratio,
                summary.max_ratio,
                100.0 * variation
            ),
        ),
    )
    .timed(start))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CardinalityConfig {
    /// `(d, alpha, slope tolerance)`
    pub cases: Vec<(usize, f64, f64)>,
    pub n_list: Vec<usize>,
    pub epsilon: f64,
}

impl Default for CardinalityConfig {
    fn default() -> Self {
        Self {
            cases: vec![
                (2, 1.25, 0.1),
                (2, 1.5, 0.1),
                (2, 2.0, 0.1),
                (3, 1.75, 0.15),
                (3, 2.0, 0.15),
            ],
            n_list: vec![4, 8, 16, 32, 64],
            epsilon: 0.25,
        }
    }
}

/// Slope of `log N` against `log n`, compared to `d`.
pub fn cardinality_experiment(cfg: &CardinalityConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    let mut records = Vec::new();
    let mut pass = true;
    let mut detail = Vec::new();
    let mut summary_extra = BTreeMap::new();
    let ns: Vec<f64> = cfg.n_list.iter().map(|n| *n as f64).collect();
    for &(d, alpha, tol) in &cfg.cases {
        let mut totals = Vec::new();
        for &n in &cfg.n_list {
            let c = mesh_cardinality(&MeshParams::new(n, cfg.epsilon, alpha), d)?;
            totals.push(c.total as f64);
            records.push(
                Record::new(format!("d {d} alpha {alpha} n {n}"), c.normalized)
                    .n(n)
                    .with("d", d as f64)
                    .with("alpha", alpha)
                    .with("m", c.m as f64)
                    .with("total", c.total as f64),
            );
        }
        let slope = loglog_fit(&ns, &totals)
            .map(|f| f.slope)
            .unwrap_or(f64::NAN);
        pass &= (slope - d as f64).abs() <= tol;
        summary_extra.insert(format!("slope_d{d}_alpha{alpha}"), slope);
        detail.push(format!("d={d} a={alpha} {slope:.3}"));
    }
    let mut summary = Summary::of(&records);
    summary.constant = Some(summary.max_ratio);
    summary.extra = summary_extra;
    let mut extra = BTreeMap::new();
    extra.insert("cases".into(), serde_json::json!(cfg.cases));
    Ok(ExperimentReport::new(
        "cardinality",
        ConfigEcho {
            n_list: cfg.n_list.clone(),
            epsilon: Some(cfg.epsilon),
            ..echo(extra)
        },
        records,
        summary,
        Verdict::new(
            pass,
            "slope of log N vs log n equals d within tolerance",
            detail.join(", "),
        ),
    )
    .timed(start))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionConfig {
    /// `(d, alpha, n, epsilon)`
    pub cases: Vec<(usize, f64, usize, f64)>,
    pub tol: f64,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        let mut cases = Vec::new();
        for alpha in [1.25, 1.5, 2.0] {
            for n in [4, 8, 16] {
                cases.push((2, alpha, n, 0.25));
            }
        }
        cases.push((3, 1.75, 4, 0.5));
        cases.push((3, 2.0, 4, 0.5));
        Self { cases, tol: 1e-12 }
    }
}

/// Sum of the cell measures against the measure of the meshed region.
pub fn partition_experiment(cfg: &PartitionConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    let records: Vec<Record> = cfg
        .cases
        .iter()
        .map(|&(d, alpha, n, eps)| -> Result<Record> {
            let dom = model_domain(&format!("alpha:{alpha}"), d, GraphDomain::mesh_setting)?;
            let mesh = build_mesh(&dom, MeshParams::new(n, eps, alpha), false)?;
            let exact = mesh.region_measure();
            // cell by cell, with each measure checked against its (x, z) box
            let mut acc = CompensatedSum::new();
            let mut box_err = 0.0f64;
            for id in 0..mesh.cell_count() {
                let c = mesh.cell(id);
                let vol: f64 = c
                    .x_lo
                    .iter()
                    .zip(&c.x_hi)
                    .map(|(a, b)| b - a)
                    .product::<f64>()
                    * (c.z_hi - c.z_lo);
                box_err = box_err.max((vol - c.measure).abs() / c.measure);
                acc.add(c.measure);
            }
            let rel = (acc.value() - exact).abs() / exact;
            Ok(
                Record::new(format!("d {d} alpha {alpha} n {n} eps {eps}"), rel)
                    .n(n)
                    .with("sum_rel_err", rel)
                    .with("box_rel_err", box_err)
                    .with(
                        "closed_form_rel_err",
                        (mesh.total_measure() - exact).abs() / exact,
                    )
                    .with("cells", mesh.cell_count() as f64)
                    .with("region_measure", exact),
            )
        })
        .collect::<Result<_>>()?;
    let mut summary = Summary::of(&records);
    let box_err = records
        .iter()
        .map(|r| r.values["box_rel_err"])
        .fold(0.0, f64::max);
    summary.extra.insert("box_rel_err".into(), box_err);
    // box volumes carry rounding from the breakpoints, so they get a looser bound
    let pass = summary.max_ratio <= cfg.tol && box_err <= 1e-10;
    let mut extra = BTreeMap::new();
    extra.insert("cases".into(), serde_json::json!(cfg.cases));
    Ok(ExperimentReport::new(
        "partition",
        echo(extra),
        records,
        summary.clone(),
        Verdict::new(
            pass,
            format!(
                "cell measures sum to the region measure within relative {:e}",
                cfg.tol
            ),
            format!(
                "max rel err {:.2e}, cell boxes within {box_err:.1e}",
                summary.max_ratio
            ),
        ),
    )
    .timed(start))
}
