mod bernstein;
mod lemma73;
mod markov;
mod mz;
mod osc;
mod sanity;
mod sharpness;
mod structure;

pub use bernstein::{bernstein_experiment, BernsteinConfig};
pub use lemma73::{lemma73_discretization_check, lemma73_experiment, Lemma73Config, Lemma73Result};
pub use markov::{markov_experiment, MarkovConfig};
pub use mz::{mz_experiment, mz_mesh, MzConfig};
pub use osc::{cell_oscillation_check, oscillation_sum, OscConfig};
pub use sanity::{classical_sanity_suite, SanityConfig};
pub use sharpness::{sharpness_domain, sharpness_experiment, SharpnessConfig};
pub use structure::{
    cardinality_experiment, doubling_experiment, jacobi_experiment, partition_experiment,
    phi_experiment, sandwich_experiment, steklov_experiment, CardinalityConfig, DoublingConfig,
    JacobiConfig, PartitionConfig, PhiConfig, SandwichConfig, SteklovConfig,
};
