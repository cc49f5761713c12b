use mzmesh_core::domain::{model_function, GraphDomain, Region};
use mzmesh_core::poly::{ensemble_seed, random_poly, MultiPoly};
use mzmesh_core::{Error, Result};

/// `g` for a model id over `d - 1` base variables.
pub fn model_domain(
    id: &str,
    d: usize,
    setting: fn(mzmesh_core::AlphaGraphFunction64) -> Result<GraphDomain<f64>>,
) -> Result<GraphDomain<f64>> {
    if d < 2 {
        return Err(Error::Parameter("d must be at least 2".into()));
    }
    setting(model_function::<f64>(id, d - 1)?)
}

/// Item `i` of the Gauss-Chebyshev ensemble, scaled to the bounding box of `region`.
pub fn ensemble_poly(
    domain: &GraphDomain<f64>,
    region: Region,
    n: usize,
    seed: u64,
    i: usize,
) -> Result<MultiPoly<f64>> {
    random_poly(
        domain.dim(),
        n,
        ensemble_seed(seed, i as u64),
        domain.bounding_box(region),
    )
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Parameter(format!(
            "p = {p} must be positive and finite"
        )));
    }
    Ok(())
}

pub(crate) fn check_n_list(n_list: &[usize], min_len: usize) -> Result<()> {
    if n_list.len() < min_len {
        return Err(Error::Parameter(format!(
            "need at least {min_len} values of n"
        )));
    }
    if n_list.contains(&0) {
        return Err(Error::Parameter("n must be positive".into()));
    }
    Ok(())
}

pub(crate) fn check_ensemble(size: usize) -> Result<()> {
    if size == 0 {
        return Err(Error::Parameter("ensemble size must be positive".into()));
    }
    Ok(())
}

/// Largest unflagged ratio per `n`, in `n_list` order.
pub(crate) fn sup_per_n(records: &[crate::Record], n_list: &[usize]) -> Vec<f64> {
    n_list
        .iter()
        .map(|n| {
            records
                .iter()
                .filter(|r| r.n == Some(*n) && !r.flagged)
                .map(|r| r.ratio)
                .fold(f64::NAN, f64::max)
        })
        .collect()
}

/// A domain builder fed with the exponent of the `alpha` model.
pub(crate) fn model_domain_alpha(
    alpha: f64,
    d: usize,
    build: fn(f64, usize) -> Result<GraphDomain<f64>>,
) -> Result<GraphDomain<f64>> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(Error::Parameter(format!(
            "alpha = {alpha} must lie in (1, 2]"
        )));
    }
    if d < 2 {
        return Err(Error::Parameter("d must be at least 2".into()));
    }
    build(alpha, d)
}
