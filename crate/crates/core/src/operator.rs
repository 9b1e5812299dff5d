//! Random Schrödinger operators on finite pieces of a graph.
//!
//! The operator acts on functions over a finite vertex set: the diagonal
//! carries the full-graph valence plus a coupled random potential, and each
//! retained edge contributes `-1` off the diagonal. Restricting to a volume
//! keeps the diagonal of the ambient operator — boundary vertices remember
//! their full valence even though some of their edges leave the volume.
//!
//! Disorder is sampled counter-style: the value at a vertex depends only on
//! the master seed, the trial index, and the vertex id, never on which volume
//! is being assembled or in what order vertices are visited. That makes every
//! Monte Carlo estimate reproducible and lets depleted and restricted
//! operators share one disorder realization exactly.

use crate::graph::{Graph, GraphError, VertexId};
use crate::linalg::{LinalgError, SymmetricCsr};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

/// Errors from density/model validation and operator assembly.
#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("density support [{a}, {b}] is not a nondegenerate finite interval")]
    InvalidDensity { a: f64, b: f64 },
    #[error("coupling must be finite and nonnegative, got {0}")]
    InvalidCoupling(f64),
    #[error("volume is empty")]
    EmptyVolume,
    #[error("vertex {0:?} listed twice in a volume")]
    DuplicateVertex(VertexId),
    #[error("vertex {0:?} is not part of the volume")]
    NotInVolume(VertexId),
    #[error("potential has {got} entries for a volume of {expected}")]
    PotentialLengthMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// The uniform probability density on `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformDensity {
    a: f64,
    b: f64,
}

impl UniformDensity {
    pub fn new(a: f64, b: f64) -> Result<Self, OperatorError> {
        if a.is_finite() && b.is_finite() && a < b {
            Ok(Self { a, b })
        } else {
            Err(OperatorError::InvalidDensity { a, b })
        }
    }

    /// Uniform on `[-1, 1]`.
    pub fn symmetric_unit() -> Self {
        Self { a: -1.0, b: 1.0 }
    }

    pub fn lower(&self) -> f64 {
        self.a
    }

    pub fn upper(&self) -> f64 {
        self.b
    }

    /// Sup norm of the density, `1 / (b - a)`.
    pub fn sup_norm(&self) -> f64 {
        1.0 / (self.b - self.a)
    }

    /// Total mass; one, because this is a probability density.
    pub fn l1_norm(&self) -> f64 {
        1.0
    }

    /// Maps a uniform draw from `[0, 1)` onto the support.
    pub fn quantile(&self, u: f64) -> f64 {
        self.a + (self.b - self.a) * u
    }
}

/// Coupled i.i.d. disorder: coupling strength, single-site density, and the
/// master seed all sampling derives from.
#[derive(Debug, Clone, Copy)]
pub struct DisorderModel {
    lambda: f64,
    density: UniformDensity,
    master_seed: u64,
}

impl DisorderModel {
    pub fn new(lambda: f64, density: UniformDensity, master_seed: u64) -> Result<Self, OperatorError> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(OperatorError::InvalidCoupling(lambda));
        }
        Ok(Self { lambda, density, master_seed })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn density(&self) -> &UniformDensity {
        &self.density
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    /// The potential at one vertex in one trial.
    ///
    /// Addressed, not sequential: the generator is keyed by the master seed,
    /// moved to stream `trial` and word position `2 * vertex`, and one draw
    /// is taken. Each 64-bit draw consumes two 32-bit words, so distinct
    /// vertices read disjoint counter positions.
    pub fn potential_at(&self, trial: u64, vertex: VertexId) -> f64 {
        let mut rng = ChaCha12Rng::seed_from_u64(self.master_seed);
        rng.set_stream(trial);
        rng.set_word_pos(u128::from(vertex.0) * 2);
        let u = (rng.next_u64() >> 11) as f64 * 2f64.powi(-53);
        self.density.quantile(u)
    }

    /// The potential over a whole volume, in volume order.
    pub fn sample_potential(&self, trial: u64, volume: &FiniteVolume) -> Vec<f64> {
        volume.vertices().iter().map(|&v| self.potential_at(trial, v)).collect()
    }
}

/// A finite set of vertices the operator is restricted to.
///
/// Vertices are kept sorted, so positions in the volume define the row and
/// column order of every matrix assembled over it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteVolume {
    vertices: Vec<VertexId>,
}

impl FiniteVolume {
    /// Builds a volume from a vertex list; order is normalized, duplicates
    /// and vertices outside the graph are rejected.
    pub fn new(graph: &Graph, mut vertices: Vec<VertexId>) -> Result<Self, OperatorError> {
        if vertices.is_empty() {
            return Err(OperatorError::EmptyVolume);
        }
        vertices.sort_unstable();
        for pair in vertices.windows(2) {
            if pair[0] == pair[1] {
                return Err(OperatorError::DuplicateVertex(pair[0]));
            }
        }
        for &v in &vertices {
            if !graph.contains(v) {
                return Err(GraphError::VertexOutOfRange(v.0).into());
            }
        }
        Ok(Self { vertices })
    }

    /// The whole graph as a volume.
    pub fn whole(graph: &Graph) -> Self {
        Self { vertices: graph.vertices().collect() }
    }

    /// The ball of the given radius around a center.
    pub fn ball(graph: &Graph, center: VertexId, radius: usize) -> Result<Self, OperatorError> {
        Self::new(graph, graph.ball(center, radius)?)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    /// Row/column index of a vertex, `None` when outside the volume.
    pub fn position(&self, v: VertexId) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.position(v).is_some()
    }

    /// The volume with the listed vertices removed.
    pub fn without(&self, removed: &[VertexId]) -> Result<Self, OperatorError> {
        let remaining: Vec<VertexId> =
            self.vertices.iter().copied().filter(|v| !removed.contains(v)).collect();
        if remaining.is_empty() {
            return Err(OperatorError::EmptyVolume);
        }
        Ok(Self { vertices: remaining })
    }

    fn require_subset(&self, block: &FiniteVolume) -> Result<(), OperatorError> {
        match block.vertices.iter().find(|&&v| !self.contains(v)) {
            Some(&v) => Err(OperatorError::NotInVolume(v)),
            None => Ok(()),
        }
    }
}

/// An assembled operator over one volume and one disorder realization.
#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    matrix: SymmetricCsr,
    volume: FiniteVolume,
    potential: Vec<f64>,
}

impl HamiltonianMatrix {
    /// Assembles the operator on a volume: diagonal `deg(v) + lambda * omega_v`,
    /// `-1` for every edge with both endpoints inside.
    pub fn assemble(
        graph: &Graph,
        model: &DisorderModel,
        trial: u64,
        volume: &FiniteVolume,
    ) -> Result<Self, OperatorError> {
        Self::assemble_with_filter(graph, model, trial, volume, |_, _| true)
    }

    /// Assembles the depleted operator: same diagonal, but edges crossing the
    /// boundary between `block` and the rest of the volume are dropped.
    pub fn assemble_depleted(
        graph: &Graph,
        model: &DisorderModel,
        trial: u64,
        volume: &FiniteVolume,
        block: &FiniteVolume,
    ) -> Result<Self, OperatorError> {
        volume.require_subset(block)?;
        Self::assemble_with_filter(graph, model, trial, volume, |v, u| {
            block.contains(v) == block.contains(u)
        })
    }

    /// Assembles the operator with a caller-supplied potential, one entry per
    /// volume vertex in volume order. Useful for perturbing a single site
    /// while all others stay frozen.
    pub fn with_potential(
        graph: &Graph,
        lambda: f64,
        volume: &FiniteVolume,
        potential: Vec<f64>,
    ) -> Result<Self, OperatorError> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(OperatorError::InvalidCoupling(lambda));
        }
        if potential.len() != volume.len() {
            return Err(OperatorError::PotentialLengthMismatch {
                got: potential.len(),
                expected: volume.len(),
            });
        }
        Self::build(graph, lambda, volume, potential, |_, _| true)
    }

    fn assemble_with_filter(
        graph: &Graph,
        model: &DisorderModel,
        trial: u64,
        volume: &FiniteVolume,
        keep_edge: impl Fn(VertexId, VertexId) -> bool,
    ) -> Result<Self, OperatorError> {
        let potential = model.sample_potential(trial, volume);
        Self::build(graph, model.lambda(), volume, potential, keep_edge)
    }

    fn build(
        graph: &Graph,
        lambda: f64,
        volume: &FiniteVolume,
        potential: Vec<f64>,
        keep_edge: impl Fn(VertexId, VertexId) -> bool,
    ) -> Result<Self, OperatorError> {
        let rows: Vec<Vec<(usize, f64)>> = volume
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let diagonal = graph.degree(v) as f64 + lambda * potential[i];
                let mut row: Vec<(usize, f64)> = graph
                    .neighbors(v)
                    .iter()
                    .filter(|&&u| keep_edge(v, u))
                    .filter_map(|&u| volume.position(u).map(|j| (j, -1.0)))
                    .collect();
                let at = row.partition_point(|&(j, _)| j < i);
                row.insert(at, (i, diagonal));
                row
            })
            .collect();
        Ok(Self { matrix: SymmetricCsr::from_rows(rows)?, volume: volume.clone(), potential })
    }

    /// The hopping terms removed by depletion: `+1` at every pair cut by the
    /// block boundary, so `depleted = full + difference`.
    pub fn hopping_difference(
        graph: &Graph,
        volume: &FiniteVolume,
        block: &FiniteVolume,
    ) -> Result<SymmetricCsr, OperatorError> {
        volume.require_subset(block)?;
        let rows: Vec<Vec<(usize, f64)>> = volume
            .vertices()
            .iter()
            .map(|&v| {
                graph
                    .neighbors(v)
                    .iter()
                    .filter(|&&u| block.contains(v) != block.contains(u))
                    .filter_map(|&u| volume.position(u).map(|j| (j, 1.0)))
                    .collect()
            })
            .collect();
        Ok(SymmetricCsr::from_rows(rows)?)
    }

    pub fn matrix(&self) -> &SymmetricCsr {
        &self.matrix
    }

    pub fn volume(&self) -> &FiniteVolume {
        &self.volume
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn dim(&self) -> usize {
        self.volume.len()
    }
}
