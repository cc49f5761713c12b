//! Reference integrals: `L^p` norms on graph regions, weighted 1D norms, doubling constants
//! and discrete norms on meshes.

pub mod discrete;
pub mod oned;
pub mod region;

pub use discrete::{discrete_lp_norm, discrete_sup};
pub use oned::{
    doubling_constant_estimate, integrate_graded_at_lo, weighted_1d_norm, DoublingEstimate,
};
pub use region::{
    lp_norm, lp_norm_region, region_rule, FrameGradientOf, LineIntegrand, NormResult,
    QuadratureSpec, RegionRule, TangentialOf, ValueOf, Weight,
};
