//! Polynomials: the Chebyshev-basis `MultiPoly`, Jacobi polynomials and the extremal `Q`.

pub mod jacobi;
pub mod multi;
pub mod sharpness;

pub use jacobi::{jacobi_at_one, jacobi_eval, jacobi_value, JacobiSpec};
pub use multi::{
    chebyshev_values, clenshaw, clenshaw_with_derivative, ensemble_seed, multi_indices,
    random_poly, BoxJson, Ensemble, LineRestriction, MultiPoly, PolyJson,
};
pub use sharpness::{SharpnessPoly, SharpnessSpec};
