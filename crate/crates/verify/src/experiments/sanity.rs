use std::time::Instant;

use serde::{Deserialize, Serialize};

use mzmesh_core::poly::{clenshaw_with_derivative, ensemble_seed, random_poly, MultiPoly};
use mzmesh_core::{AxisBox, Result};

use crate::report::{ConfigEcho, ExperimentReport, Record, Summary, Verdict};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SanityConfig {
    /// Chebyshev degrees checked for `max |T_n'| = n^2`
    pub max_cheb: usize,
    pub ball_degree: usize,
    pub ball_ensemble: usize,
    pub seed: u64,
    /// relative slack for grid maxima
    pub grid_tol: f64,
}

impl Default for SanityConfig {
    fn default() -> Self {
        Self {
            max_cheb: 30,
            ball_degree: 5,
            ball_ensemble: 20,
            seed: 7,
            grid_tol: 1e-2,
        }
    }
}

const LINE_GRID: usize = 4001;

fn cheb_basis(n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    c
}

/// Max over a Chebyshev-dense grid of `[-1, 1]` (endpoints included) of `(|f|, |f'|, sqrt(1-x^2)|f'|)`.
fn line_maxima(c: &[f64]) -> (f64, f64, f64) {
    let mut out = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..LINE_GRID {
        let x = -(std::f64::consts::PI * i as f64 / (LINE_GRID - 1) as f64).cos();
        let (v, dv) = clenshaw_with_derivative(c, x);
        out.0 = out.0.max(v.abs());
        out.1 = out.1.max(dv.abs());
        out.2 = out.2.max((1.0 - x * x).max(0.0).sqrt() * dv.abs());
    }
    out
}

/// `sqrt(1 - |x|^2) |grad f|` and `|f|` maxima over a polar grid of the unit disc.
fn disc_maxima(f: &MultiPoly<f64>) -> (f64, f64) {
    let (nr, nt) = (201, 512);
    let mut g = [0.0; 2];
    let (mut lhs, mut sup) = (0.0f64, 0.0f64);
    for i in 0..nr {
        let r = i as f64 / (nr - 1) as f64;
        for j in 0..nt {
            let t = std::f64::consts::TAU * j as f64 / nt as f64;
            let v = f.eval_grad(&[r * t.cos(), r * t.sin()], &mut g);
            sup = sup.max(v.abs());
            lhs = lhs.max((1.0 - r * r).max(0.0).sqrt() * g[0].hypot(g[1]));
        }
    }
    (lhs, sup)
}

/// Classical one-dimensional Markov and Bernstein inequalities and the ball Bernstein bound.
pub fn classical_sanity_suite(cfg: &SanityConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    let mut records = Vec::new();
    let mut markov_err = 0.0f64;
    for n in 1..=cfg.max_cheb {
        let (sup, dsup, bern) = line_maxima(&cheb_basis(n));
        let n2 = (n * n) as f64;
        let err = (dsup - n2).abs() / n2;
        markov_err = markov_err.max(err);
        records.push(
            Record::new(format!("markov T_{n}"), dsup / n2)
                .n(n)
                .with("max_dT", dsup)
                .with("rel_err", err),
        );
        records.push(
            Record::new(format!("bernstein T_{n}"), bern / (n as f64 * sup))
                .n(n)
                .with("lhs", bern)
                .with("rhs", n as f64 * sup),
        );
    }
    let interval = AxisBox::cube(1, -1.0, 1.0);
    for i in 0..cfg.ball_ensemble {
        let n = cfg.ball_degree;
        let f = random_poly(1, n, ensemble_seed(cfg.seed, i as u64), interval.clone())?;
        let (sup, _, bern) = line_maxima(f.coeffs());
        records.push(
            Record::new(format!("bernstein poly {i}"), bern / (n as f64 * sup))
                .n(n)
                .item(i)
                .with("lhs", bern)
                .with("rhs", n as f64 * sup),
        );
    }
    let square = AxisBox::cube(2, -1.0, 1.0);
    for i in 0..cfg.ball_ensemble {
        let n = cfg.ball_degree;
        let f = random_poly(
            2,
            n,
            ensemble_seed(cfg.seed ^ 0xba11, i as u64),
            square.clone(),
        )?;
        let (lhs, sup) = disc_maxima(&f);
        records.push(
            Record::new(format!("ball poly {i}"), lhs / (n as f64 * sup))
                .n(n)
                .item(i)
                .with("lhs", lhs)
                .with("rhs", n as f64 * sup),
        );
    }
    let bound_ok = records
        .iter()
        .filter(|r| !r.label.starts_with("markov"))
        .all(|r| r.ratio <= 1.0 + cfg.grid_tol);
    let pass = markov_err <= 1e-10 && bound_ok;
    let mut summary = Summary::of(&records);
    summary
        .extra
        .insert("markov_max_rel_err".into(), markov_err);
    let worst_ball = records
        .iter()
        .filter(|r| r.label.starts_with("ball"))
        .map(|r| r.ratio)
        .fold(0.0, f64::max);
    summary.extra.insert("ball_max_ratio".into(), worst_ball);
    let mut extra = std::collections::BTreeMap::new();
    extra.insert("max_cheb".into(), serde_json::json!(cfg.max_cheb));
    extra.insert("grid_tol".into(), serde_json::json!(cfg.grid_tol));
    Ok(ExperimentReport::new(
        "sanity",
        ConfigEcho {
            seed: Some(cfg.seed),
            ensemble_size: Some(cfg.ball_ensemble),
            extra,
            ..ConfigEcho::default()
        },
        records,
        summary,
        Verdict::new(
            pass,
            "max |T_n'| = n^2 to 1e-10; Bernstein bounds within grid tolerance",
            format!("Markov rel err {markov_err:.2e}, worst ball ratio {worst_ball:.4}"),
        ),
    )
    .timed(start))
}
