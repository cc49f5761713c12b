//! Marcinkiewicz-Zygmund meshes for polynomials on C^alpha graph domains.
//!
//! The numerical core is generic over the scalar type ([`Scalar`], implemented for `f32`
//! and `f64`); the aliases below fix it to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod domain;
pub mod error;
pub mod field;
pub mod geometry;
pub mod integrate;
pub mod mesh;
pub mod poly;
pub mod quadrature;
pub mod scalar;

pub use error::{Error, Result};
pub use field::ScalarField;
pub use geometry::AxisBox;
pub use scalar::Scalar;

pub type AlphaGraphFunction64 = domain::AlphaGraphFunction<f64>;
pub type GraphDomain64 = domain::GraphDomain<f64>;
pub type MultiPoly64 = poly::MultiPoly<f64>;
pub type MZMesh64 = mesh::MZMesh<f64>;
