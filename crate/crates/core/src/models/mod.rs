//! Problem instances: graphs, interaction operators, Ising models, spiked
//! Wigner matrices and two-community block models.
//!
//! Generators are pure functions of their parameters and a 64-bit seed.

mod graph;
pub mod io;
mod ising;
mod operator;
mod sbm;
mod spiked;

pub use graph::{gen_bipartite_regular, validate_triangle_free, Graph};
pub use ising::{curie_weiss, IsingModel};
pub use operator::{dense_column, InteractionOperator, RankOne, SparseSym};
pub use sbm::{adjacency_minus_mean, centered_adjacency, sample_sbm, SbmInstance};
pub use spiked::{gen_spiked_wigner, SpikedInstance, SPECTRUM_TOL};
