//! C^alpha graph functions, graph domains and their geometry.

pub mod function;
pub mod general;
pub mod graph;
pub mod phi;
pub mod steklov;

pub use function::{
    alpha_power_constant, model_function, AlphaGraphFunction, FnProfile, GraphProfile, Model,
};
pub use general::{GeneralCAlphaDomain, Orientation, Patch, RollingBallCheck};
pub use graph::{tangential_part, CapLadder, CapScan, GraphDomain, Region};
pub use phi::{PhiGadget, PhiImage};
pub use steklov::{delta_from_b, steklov_curvature_bound, steklov_transform, SteklovSpec};
