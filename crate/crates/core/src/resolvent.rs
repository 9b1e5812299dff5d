//! Green functions of the random operators and everything that checks or
//! averages them.
//!
//! The centerpiece is `G(z; x, y)`, the matrix element of `(H - z)^{-1}`
//! at complex energy `z` off the real axis. This module computes Green
//! entries with a verified residual, checks the algebraic identities the
//! decay theory rests on (depletion identity, self-avoiding-walk expansion,
//! rank-one dependence on a single site), evaluates the closed-form decay
//! constants, and estimates disordered moments `E|G|^s` and `|Im z| E|G|^2`
//! by seeded Monte Carlo against those bounds.
//!
//! Monte Carlo estimates are reduced in trial order after an order-preserving
//! parallel map, so results are bit-identical for any thread count.

use crate::graph::{Graph, GraphError, VertexId};
use crate::linalg::{LinalgError, ShiftedLu};
use crate::operator::{DisorderModel, FiniteVolume, HamiltonianMatrix, OperatorError};
use crate::operator::UniformDensity;
use crate::parallel::{self, Parallelism};
use crate::quadrature::{self, QuadratureError};
use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Relative residual every Green solve must meet.
pub const GREEN_RESIDUAL_TOL: f64 = 1e-10;

/// Fewest Monte Carlo trials accepted by the moment estimators.
pub const MIN_MC_TRIALS: u64 = 100;

/// One-sided 99% normal quantile used for bound verification.
pub const ONE_SIDED_99: f64 = 2.33;

/// Largest walk length the expansion check will iterate.
pub const MAX_EXPANSION_DISTANCE: usize = 5;

/// Largest volume the expansion check accepts.
pub const MAX_EXPANSION_VOLUME: usize = 50;

#[derive(Debug, Error)]
pub enum ResolventError {
    #[error("spectral point must lie off the real axis, got {0}")]
    RealEnergy(Complex64),
    #[error("moment exponent must lie in (0,1), got {0}")]
    ExponentOutOfRange(f64),
    #[error("vertex {0:?} is outside the volume")]
    NotInVolume(VertexId),
    #[error("solve residual {residual:e} exceeds the contract {tolerance:e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },
    #[error("expansion requires 1 <= distance <= {max}, got {got}")]
    DistanceOutOfRange { got: usize, max: usize },
    #[error("expansion volume has {got} vertices, limit {max}")]
    VolumeTooLarge { got: usize, max: usize },
    #[error("the two endpoints are disconnected inside the volume")]
    DisconnectedInVolume,
    #[error("diagonal Green entry is numerically zero (|G| = {magnitude:e}); \
             the affine fit cannot proceed at this disorder value")]
    GreenTooSmall { magnitude: f64 },
    #[error("need at least {min} trials, got {got}")]
    TooFewTrials { got: u64, min: u64 },
    #[error("trial {trial} failed: {source}")]
    TrialFailed { trial: u64, source: Box<ResolventError> },
    #[error("bound constants need coupling > 0, got {0}")]
    NonPositiveCoupling(f64),
    #[error("bound constants need a positive density height, got {0}")]
    NonPositiveDensity(f64),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// The off-axis energy and fractional exponent every moment run is keyed by.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParams {
    z: Complex64,
    s: f64,
}

impl SpectralParams {
    pub fn new(z: Complex64, s: f64) -> Result<Self, ResolventError> {
        if !(z.re.is_finite() && z.im.is_finite()) || z.im == 0.0 {
            return Err(ResolventError::RealEnergy(z));
        }
        if !(s.is_finite() && s > 0.0 && s < 1.0) {
            return Err(ResolventError::ExponentOutOfRange(s));
        }
        Ok(Self { z, s })
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn s(&self) -> f64 {
        self.s
    }
}

/// A factored resolvent over one assembled operator.
///
/// Factors `H - z` once; each extracted column is verified against the
/// sparse operator to [`GREEN_RESIDUAL_TOL`] before it is returned.
pub struct GreenSolver<'a> {
    h: &'a HamiltonianMatrix,
    z: Complex64,
    lu: ShiftedLu,
}

impl<'a> GreenSolver<'a> {
    pub fn new(h: &'a HamiltonianMatrix, z: Complex64) -> Result<Self, ResolventError> {
        if !(z.re.is_finite() && z.im.is_finite()) || z.im == 0.0 {
            return Err(ResolventError::RealEnergy(z));
        }
        let lu = ShiftedLu::new(h.matrix(), z)?;
        Ok(Self { h, z, lu })
    }

    /// One verified resolvent column: `G(z; ., y)`, indexed by volume position.
    pub fn column(&self, y: VertexId) -> Result<Vec<Complex64>, ResolventError> {
        let pos = self.h.volume().position(y).ok_or(ResolventError::NotInVolume(y))?;
        let col = self.lu.solve_unit(pos)?;
        let mut unit = vec![Complex64::ZERO; self.h.dim()];
        unit[pos] = Complex64::ONE;
        let residual = self.h.matrix().shifted_residual(self.z, &col, &unit)?;
        if residual > GREEN_RESIDUAL_TOL {
            return Err(ResolventError::ResidualTooLarge {
                residual,
                tolerance: GREEN_RESIDUAL_TOL,
            });
        }
        Ok(col)
    }

    pub fn entry(&self, x: VertexId, y: VertexId) -> Result<Complex64, ResolventError> {
        let pos = self.h.volume().position(x).ok_or(ResolventError::NotInVolume(x))?;
        Ok(self.column(y)?[pos])
    }

    /// The full dense resolvent, one verified column at a time.
    pub fn dense(&self) -> Result<DMatrix<Complex64>, ResolventError> {
        let n = self.h.dim();
        let mut out = DMatrix::zeros(n, n);
        for (j, &y) in self.h.volume().vertices().iter().enumerate() {
            let col = self.column(y)?;
            for (i, v) in col.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        Ok(out)
    }
}

/// Single Green entry `G(z; x, y)` of an assembled operator.
pub fn green_entry(
    h: &HamiltonianMatrix,
    z: Complex64,
    x: VertexId,
    y: VertexId,
) -> Result<Complex64, ResolventError> {
    GreenSolver::new(h, z)?.entry(x, y)
}

/// Outcome of the depletion identity check.
#[derive(Debug, Clone, Copy)]
pub struct IdentityReport {
    /// Max entrywise deviation of `G = G_dep + G T G_dep`.
    pub max_deviation: f64,
    /// Max magnitude of a depleted Green entry across the cut.
    pub cross_block_max: f64,
}

/// Verifies that cutting a block out of the volume changes the resolvent by
/// exactly `G T G_dep`, where `T` carries the severed hopping terms, and
/// that the depleted resolvent vanishes across the cut.
pub fn resolvent_identity_check(
    g: &Graph,
    model: &DisorderModel,
    trial: u64,
    volume: &FiniteVolume,
    block: &FiniteVolume,
    z: Complex64,
) -> Result<IdentityReport, ResolventError> {
    let full = HamiltonianMatrix::assemble(g, model, trial, volume)?;
    let depleted = HamiltonianMatrix::assemble_depleted(g, model, trial, volume, block)?;
    let t = HamiltonianMatrix::hopping_difference(g, volume, block)?;

    let g_full = GreenSolver::new(&full, z)?.dense()?;
    let g_dep = GreenSolver::new(&depleted, z)?.dense()?;
    let t_dense = t.to_dense().map(|v| Complex64::new(v, 0.0));

    let recomposed = &g_dep + &g_full * t_dense * &g_dep;
    let max_deviation = (&g_full - recomposed)
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);

    let mut cross_block_max = 0.0f64;
    for (i, &x) in volume.vertices().iter().enumerate() {
        for (j, &y) in volume.vertices().iter().enumerate() {
            if block.contains(x) != block.contains(y) {
                cross_block_max = cross_block_max.max(g_dep[(i, j)].norm());
            }
        }
    }
    Ok(IdentityReport { max_deviation, cross_block_max })
}

/// Outcome of the walk-expansion check.
#[derive(Debug, Clone, Copy)]
pub struct ExpansionReport {
    pub expansion: Complex64,
    pub direct: Complex64,
    pub relative_deviation: f64,
    /// Number of walk terms the expansion summed.
    pub walks: usize,
}

/// Breadth-first distances inside the subgraph induced by the volume.
fn induced_distances(g: &Graph, volume: &FiniteVolume, from: VertexId) -> Vec<u32> {
    let mut dist = vec![u32::MAX; volume.len()];
    let start = volume.position(from).expect("source inside volume");
    dist[start] = 0;
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        let dv = dist[volume.position(v).expect("queued vertex inside volume")];
        for &u in g.neighbors(v) {
            if let Some(pu) = volume.position(u) {
                if dist[pu] == u32::MAX {
                    dist[pu] = dv + 1;
                    queue.push_back(u);
                }
            }
        }
    }
    dist
}

/// Verifies the walk representation of an off-diagonal Green entry: peeling
/// the walk's vertices one at a time writes `G(z; x, y)` as a sum over
/// self-avoiding walks of length `d(x, y)` of diagonal Green factors on
/// shrinking volumes times a terminal entry on the fully peeled volume.
/// Returns the expansion, the directly solved entry, and their relative
/// deviation.
pub fn saw_expansion_check(
    g: &Graph,
    model: &DisorderModel,
    trial: u64,
    volume: &FiniteVolume,
    z: Complex64,
    x: VertexId,
    y: VertexId,
) -> Result<ExpansionReport, ResolventError> {
    for v in [x, y] {
        if !volume.contains(v) {
            return Err(ResolventError::NotInVolume(v));
        }
    }
    if volume.len() > MAX_EXPANSION_VOLUME {
        return Err(ResolventError::VolumeTooLarge {
            got: volume.len(),
            max: MAX_EXPANSION_VOLUME,
        });
    }
    let dist = induced_distances(g, volume, x);
    let l = dist[volume.position(y).expect("checked membership")];
    if l == u32::MAX {
        return Err(ResolventError::DisconnectedInVolume);
    }
    let l = l as usize;
    if l == 0 || l > MAX_EXPANSION_DISTANCE {
        return Err(ResolventError::DistanceOutOfRange { got: l, max: MAX_EXPANSION_DISTANCE });
    }

    fn expand(
        g: &Graph,
        model: &DisorderModel,
        trial: u64,
        volume: &FiniteVolume,
        z: Complex64,
        v: VertexId,
        y: VertexId,
        remaining: usize,
        walks: &mut usize,
    ) -> Result<Complex64, ResolventError> {
        let h = HamiltonianMatrix::assemble(g, model, trial, volume)?;
        let solver = GreenSolver::new(&h, z)?;
        if remaining == 0 {
            *walks += 1;
            return solver.entry(v, y);
        }
        let diagonal = solver.entry(v, v)?;
        let peeled = volume.without(&[v])?;
        let mut sum = Complex64::ZERO;
        for &k in g.neighbors(v) {
            if peeled.contains(k) {
                sum += expand(g, model, trial, &peeled, z, k, y, remaining - 1, walks)?;
            }
        }
        Ok(diagonal * sum)
    }

    let mut walks = 0usize;
    let expansion = expand(g, model, trial, volume, z, x, y, l, &mut walks)?;
    let h = HamiltonianMatrix::assemble(g, model, trial, volume)?;
    let direct = green_entry(&h, z, x, y)?;
    let scale = direct.norm();
    let deviation = (expansion - direct).norm();
    let relative_deviation = if scale > 0.0 { deviation / scale } else { deviation };
    Ok(ExpansionReport { expansion, direct, relative_deviation, walks })
}

/// Outcome of the single-site dependence check.
#[derive(Debug, Clone, Copy)]
pub struct RankOneReport {
    /// |fitted slope - lambda|.
    pub slope_deviation: f64,
    /// Max deviation of the three points from the fitted line.
    pub affine_residual: f64,
    /// The site-independent pole, recovered as -intercept / lambda. For a
    /// single-vertex volume this equals (z - valence(x)) / lambda.
    pub beta: Complex64,
    /// Magnitude scale of 1/G, for judging the residual.
    pub inverse_scale: f64,
}

/// Verifies that `1/G(z; x, x)` is affine in the potential at `x` with slope
/// exactly the coupling: the diagonal entry is evaluated at three values of
/// `omega_x` (all other sites frozen), `1/G` is fit as a line in `omega_x`,
/// and the slope is compared with `lambda`.
pub fn rank_one_structure_check(
    g: &Graph,
    model: &DisorderModel,
    trial: u64,
    volume: &FiniteVolume,
    z: Complex64,
    x: VertexId,
) -> Result<RankOneReport, ResolventError> {
    let pos = volume.position(x).ok_or(ResolventError::NotInVolume(x))?;
    let base = model.sample_potential(trial, volume);
    let offsets = [-0.5, 0.0, 0.5];
    let mut inverses = Vec::with_capacity(offsets.len());
    for offset in offsets {
        let mut potential = base.clone();
        potential[pos] += offset;
        let h = HamiltonianMatrix::with_potential(g, model.lambda(), volume, potential)?;
        let entry = green_entry(&h, z, x, x)?;
        if entry.norm() < 1e-14 {
            return Err(ResolventError::GreenTooSmall { magnitude: entry.norm() });
        }
        inverses.push((base[pos] + offset, entry.inv()));
    }
    // Least-squares line u = slope * omega + intercept through three points;
    // exact when the rank-one identity holds.
    let n = inverses.len() as f64;
    let mean_w: f64 = inverses.iter().map(|(w, _)| w).sum::<f64>() / n;
    let mean_u: Complex64 = inverses.iter().map(|(_, u)| u).sum::<Complex64>() / n;
    let var_w: f64 = inverses.iter().map(|(w, _)| (w - mean_w).powi(2)).sum();
    let cov: Complex64 = inverses.iter().map(|(w, u)| (u - mean_u) * (w - mean_w)).sum();
    let slope = cov / var_w;
    let intercept = mean_u - slope * mean_w;
    let affine_residual = inverses
        .iter()
        .map(|(w, u)| (u - (slope * *w + intercept)).norm())
        .fold(0.0, f64::max);
    let inverse_scale = inverses.iter().map(|(_, u)| u.norm()).fold(0.0, f64::max);
    Ok(RankOneReport {
        slope_deviation: (slope - Complex64::from(model.lambda())).norm(),
        affine_residual,
        beta: -intercept / model.lambda(),
        inverse_scale,
    })
}

/// The closed-form decay constants of the fractional-moment bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstants {
    c: f64,
    c_prime: f64,
    s: f64,
    rho_sup: f64,
}

impl BoundConstants {
    /// `C = lambda^(-s) rho_sup^s 2^s s^(-s) / (1-s)` and `C' = 2^(s+1) C`.
    pub fn new(s: f64, lambda: f64, rho_sup: f64) -> Result<Self, ResolventError> {
        if !(s.is_finite() && s > 0.0 && s < 1.0) {
            return Err(ResolventError::ExponentOutOfRange(s));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(ResolventError::NonPositiveCoupling(lambda));
        }
        if !(rho_sup.is_finite() && rho_sup > 0.0) {
            return Err(ResolventError::NonPositiveDensity(rho_sup));
        }
        let c = lambda.powf(-s) * rho_sup.powf(s) * 2f64.powf(s) * s.powf(-s) / (1.0 - s);
        Ok(Self { c, c_prime: 2f64.powf(s + 1.0) * c, s, rho_sup })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn c_prime(&self) -> f64 {
        self.c_prime
    }

    /// Whether the per-step factor contracts; exponential decay of the walk
    /// sum needs `C` below the critical walk weight, and `C < 1` is the
    /// coarse version volumes are usually run in.
    pub fn is_contracting(&self) -> bool {
        self.c < 1.0
    }

    /// Bound on `E|G(z; x, y)|^s`: `C' C^d c_x(d)`.
    pub fn fractional_bound(&self, d: usize, c_xd: u64) -> f64 {
        self.c_prime * self.c.powi(d as i32) * c_xd as f64
    }

    /// Bound on `|Im z| E|G(z; x, y)|^2`: `max(1, pi rho_sup) C' C^d c_x(d)`.
    pub fn second_moment_bound(&self, d: usize, c_xd: u64) -> f64 {
        (std::f64::consts::PI * self.rho_sup).max(1.0) * self.fractional_bound(d, c_xd)
    }
}

/// A disorder-averaged moment of one Green entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub x: VertexId,
    pub y: VertexId,
    /// Moment order: the fractional exponent, or 2 for the second moment
    /// (whose samples carry the extra `|Im z|` factor).
    pub order: f64,
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
    pub z: Complex64,
    /// Graph distance between the pair.
    pub distance: usize,
    /// Whether the walk count at this distance is exact for the graph family
    /// (no truncation boundary inside the relevant ball).
    pub clean: bool,
}

/// One verified bound comparison.
#[derive(Debug, Clone, Copy)]
pub struct BoundReport {
    pub estimate: MomentEstimate,
    pub c: f64,
    pub c_prime: f64,
    pub d: usize,
    pub c_xd: u64,
    pub bound: f64,
    /// One-sided confidence multiplier applied to the standard error.
    pub confidence_k: f64,
    pub passed: bool,
}

/// Checks `mean + k stderr <= C' C^d c_x(d)`.
pub fn verify_fractional_bound(
    estimate: MomentEstimate,
    constants: &BoundConstants,
    c_xd: u64,
    confidence_k: f64,
) -> BoundReport {
    let bound = constants.fractional_bound(estimate.distance, c_xd);
    BoundReport {
        estimate,
        c: constants.c(),
        c_prime: constants.c_prime(),
        d: estimate.distance,
        c_xd,
        bound,
        confidence_k,
        passed: estimate.mean + confidence_k * estimate.stderr <= bound,
    }
}

/// Checks `mean + k stderr <= max(1, pi rho_sup) C' C^d c_x(d)` for the
/// second moment (samples already include the `|Im z|` factor).
pub fn verify_second_moment_bound(
    estimate: MomentEstimate,
    constants: &BoundConstants,
    c_xd: u64,
    confidence_k: f64,
) -> BoundReport {
    let bound = constants.second_moment_bound(estimate.distance, c_xd);
    BoundReport {
        estimate,
        c: constants.c(),
        c_prime: constants.c_prime(),
        d: estimate.distance,
        c_xd,
        bound,
        confidence_k,
        passed: estimate.mean + confidence_k * estimate.stderr <= bound,
    }
}

fn moment_estimates(
    g: &Graph,
    volume: &FiniteVolume,
    model: &DisorderModel,
    z: Complex64,
    order: f64,
    sample_value: impl Fn(Complex64) -> f64 + Sync,
    x: VertexId,
    ys: &[VertexId],
    trials: u64,
    parallelism: Parallelism,
) -> Result<Vec<MomentEstimate>, ResolventError> {
    if trials < MIN_MC_TRIALS {
        return Err(ResolventError::TooFewTrials { got: trials, min: MIN_MC_TRIALS });
    }
    if !volume.contains(x) {
        return Err(ResolventError::NotInVolume(x));
    }
    let positions: Vec<usize> = ys
        .iter()
        .map(|&y| volume.position(y).ok_or(ResolventError::NotInVolume(y)))
        .collect::<Result<_, _>>()?;

    let per_trial = parallel::map_trials(trials, parallelism, |trial| {
        let run = || -> Result<Vec<f64>, ResolventError> {
            let h = HamiltonianMatrix::assemble(g, model, trial, volume)?;
            // One factorization serves every target: H is symmetric, so the
            // column at x is also the row G(z; x, .).
            let col = GreenSolver::new(&h, z)?.column(x)?;
            Ok(positions.iter().map(|&p| sample_value(col[p])).collect())
        };
        run().map_err(|source| ResolventError::TrialFailed { trial, source: Box::new(source) })
    });
    let mut samples: Vec<Vec<f64>> = Vec::with_capacity(trials as usize);
    for trial in per_trial {
        samples.push(trial?);
    }

    let unclean = g.distances_to_unclean();
    let n = trials as f64;
    ys.iter()
        .enumerate()
        .map(|(j, &y)| {
            let mean = samples.iter().map(|row| row[j]).sum::<f64>() / n;
            let var = samples.iter().map(|row| (row[j] - mean).powi(2)).sum::<f64>()
                / (n - 1.0);
            let distance = g.distance(x, y)?;
            Ok(MomentEstimate {
                x,
                y,
                order,
                mean,
                stderr: (var / n).sqrt(),
                trials,
                z,
                distance,
                clean: unclean[x.index()] as usize >= distance,
            })
        })
        .collect()
}

/// Monte Carlo estimate of `E|G(z; x, y)|^s` for several targets sharing one
/// factorization per trial. Deterministic for a fixed master seed.
pub fn fractional_moments_mc(
    g: &Graph,
    volume: &FiniteVolume,
    model: &DisorderModel,
    params: SpectralParams,
    x: VertexId,
    ys: &[VertexId],
    trials: u64,
    parallelism: Parallelism,
) -> Result<Vec<MomentEstimate>, ResolventError> {
    let s = params.s();
    moment_estimates(
        g,
        volume,
        model,
        params.z(),
        s,
        move |green| green.norm().powf(s),
        x,
        ys,
        trials,
        parallelism,
    )
}

/// Single-target version of [`fractional_moments_mc`].
pub fn fractional_moment_mc(
    g: &Graph,
    volume: &FiniteVolume,
    model: &DisorderModel,
    params: SpectralParams,
    x: VertexId,
    y: VertexId,
    trials: u64,
    parallelism: Parallelism,
) -> Result<MomentEstimate, ResolventError> {
    Ok(fractional_moments_mc(g, volume, model, params, x, &[y], trials, parallelism)?
        .pop()
        .expect("one target requested"))
}

/// Monte Carlo estimate of `|Im z| E|G(z; x, y)|^2` for several targets.
pub fn second_moments_mc(
    g: &Graph,
    volume: &FiniteVolume,
    model: &DisorderModel,
    z: Complex64,
    x: VertexId,
    ys: &[VertexId],
    trials: u64,
    parallelism: Parallelism,
) -> Result<Vec<MomentEstimate>, ResolventError> {
    if !(z.re.is_finite() && z.im.is_finite()) || z.im == 0.0 {
        return Err(ResolventError::RealEnergy(z));
    }
    let weight = z.im.abs();
    moment_estimates(
        g,
        volume,
        model,
        z,
        2.0,
        move |green| weight * green.norm_sqr(),
        x,
        ys,
        trials,
        parallelism,
    )
}

/// Single-target version of [`second_moments_mc`].
pub fn second_moment_mc(
    g: &Graph,
    volume: &FiniteVolume,
    model: &DisorderModel,
    z: Complex64,
    x: VertexId,
    y: VertexId,
    trials: u64,
    parallelism: Parallelism,
) -> Result<MomentEstimate, ResolventError> {
    Ok(second_moments_mc(g, volume, model, z, x, &[y], trials, parallelism)?
        .pop()
        .expect("one target requested"))
}

/// Quadrature check of the averaging inequality
/// `int |xi - beta|^(-s) rho(xi) dxi <= rho_sup^s * 2^s s^(-s) / (1-s)`
/// (the density has unit mass). Returns `(lhs, rhs)`; the left side is
/// integrated adaptively with the singularity at `Re beta` flattened by a
/// change of variables, the right side is the exact closed form.
pub fn spectral_averaging_check(
    density: &UniformDensity,
    s: f64,
    beta: Complex64,
) -> Result<(f64, f64), ResolventError> {
    if !(s.is_finite() && s > 0.0 && s < 1.0) {
        return Err(ResolventError::ExponentOutOfRange(s));
    }
    let (a, b) = (density.lower(), density.upper());
    let height = density.sup_norm();
    let rhs = height.powf(s) * density.l1_norm().powf(1.0 - s) * 2f64.powf(s) * s.powf(-s)
        / (1.0 - s);
    let lhs = if beta.im == 0.0 {
        quadrature::integrate_singular(|_| height, beta.re, s, a, b, 1e-9)?
    } else {
        let im2 = beta.im * beta.im;
        quadrature::integrate(
            |xi| height * ((xi - beta.re).powi(2) + im2).powf(-0.5 * s),
            a,
            b,
            1e-9,
        )?
    };
    Ok((lhs.value, rhs))
}
