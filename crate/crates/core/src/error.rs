use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point:?} is not in {region}")]
    Membership { point: Vec<f64>, region: String },

    #[error("base point {point:?} is outside {what}")]
    OutsideBox { point: Vec<f64>, what: String },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("({z}, {t}) is outside the parameter set E")]
    ParameterDomain { z: f64, t: f64 },

    #[error("no convergence: {0}")]
    Convergence(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown model domain id '{0}'")]
    UnknownModel(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn to_f64_vec<T: crate::Scalar>(p: &[T]) -> Vec<f64> {
    p.iter().map(|v| v.to_f64_lossy()).collect()
}
