//! Anderson tight-binding models on locally finite graphs.
//!
//! The crate builds finite truncations of infinite graphs (lattice boxes, a
//! sparsely branching tree, a lattice with long-range hub edges), counts
//! self-avoiding walks on them, assembles random Schroedinger operators
//! `H = -Laplacian + lambda * V` with i.i.d. uniform disorder, and checks the
//! resolvent and dynamical estimates that connect walk growth to exponential
//! decay of Green-function moments.
//!
//! Layout follows the pipeline: [`graph`] -> [`saw`] -> [`operator`] ->
//! [`resolvent`] / [`dynamics`]. [`parallel`] holds the trial-map driver that
//! backs every Monte Carlo loop; with the default `parallel` feature it runs
//! on rayon, without it the same driver degrades to a sequential loop, and in
//! both cases results are reduced in fixed trial order so outputs are
//! bit-identical for any thread count.

pub mod dynamics;
pub mod graph;
pub mod linalg;
pub mod operator;
pub mod parallel;
pub mod quadrature;
pub mod resolvent;
pub mod saw;

pub use graph::{Graph, GraphError, VertexId};
pub use operator::{DisorderModel, FiniteVolume, HamiltonianMatrix, UniformDensity};
pub use parallel::Parallelism;
pub use resolvent::SpectralParams;
